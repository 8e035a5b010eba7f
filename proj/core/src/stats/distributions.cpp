#include "strideflex/stats/distributions.hpp"

#include "strideflex/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace strideflex::stats {
namespace {

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
// x < (a + 1) / (a + b + 2); callers use the symmetry otherwise.
double beta_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h;
        }
    }
    return h;
}

double log_beta_prefix(double a, double b, double x) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
}

// Both tails of the incomplete beta, each evaluated on its convergent side.
void beta_tails(double a, double b, double x, double& lower, double& upper) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw ValidationError("incomplete_beta: need a, b > 0 and x in [0, 1]");
    }
    if (x == 0.0) {
        lower = 0.0;
        upper = 1.0;
        return;
    }
    if (x == 1.0) {
        lower = 1.0;
        upper = 0.0;
        return;
    }
    const double front = std::exp(log_beta_prefix(a, b, x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        lower = front * beta_fraction(a, b, x) / a;
        upper = 1.0 - lower;
    } else {
        upper = front * beta_fraction(b, a, 1.0 - x) / b;
        lower = 1.0 - upper;
    }
}

void require_df(double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        throw ValidationError("F distribution: degrees of freedom must be positive, got (" + std::to_string(d1) +
                              ", " + std::to_string(d2) + ")");
    }
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    double lower = 0.0, upper = 0.0;
    beta_tails(a, b, x, lower, upper);
    return lower;
}

double f_cdf(double f, double d1, double d2) {
    require_df(d1, d2);
    if (std::isnan(f)) {
        throw ValidationError("f_cdf: NaN statistic");
    }
    if (f <= 0.0) {
        return 0.0;
    }
    if (std::isinf(f)) {
        return 1.0;
    }
    const double x = d1 * f / (d1 * f + d2);
    double lower = 0.0, upper = 0.0;
    beta_tails(0.5 * d1, 0.5 * d2, x, lower, upper);
    return lower;
}

double f_sf(double f, double d1, double d2) {
    require_df(d1, d2);
    if (std::isnan(f)) {
        throw ValidationError("f_sf: NaN statistic");
    }
    if (f <= 0.0) {
        return 1.0;
    }
    if (std::isinf(f)) {
        return 0.0;
    }
    // Upper tail of F is the lower tail of the beta at d2 / (d1 f + d2).
    const double x = d2 / (d1 * f + d2);
    double lower = 0.0, upper = 0.0;
    beta_tails(0.5 * d2, 0.5 * d1, x, lower, upper);
    return lower;
}

double f_quantile(double p, double d1, double d2) {
    require_df(d1, d2);
    if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("f_quantile: p must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (f_cdf(hi, d1, d2) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            return std::numeric_limits<double>::infinity();
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, d1, d2) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        if (p == 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        throw ValidationError("normal_quantile: p must lie in [0, 1]");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val = 0.0;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                   1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                   0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                   0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                   7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

} // namespace strideflex::stats
