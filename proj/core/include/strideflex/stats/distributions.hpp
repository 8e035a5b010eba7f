#pragma once

namespace strideflex::stats {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// P(F <= f) for an F distribution with (d1, d2) degrees of freedom.
double f_cdf(double f, double d1, double d2);
/// Upper tail P(F > f), computed without cancellation.
double f_sf(double f, double d1, double d2);
/// Inverse of f_cdf for p in (0, 1).
double f_quantile(double p, double d1, double d2);

double normal_cdf(double z);
/// Upper tail of the standard normal.
double normal_sf(double z);
/// Inverse standard normal CDF (Wichura's AS241, about 1e-16 relative).
double normal_quantile(double p);

} // namespace strideflex::stats
