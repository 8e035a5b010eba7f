#pragma once

#include <span>
#include <vector>

namespace strideflex::stats {

struct LeveneResult {
    double statistic = 0.0; ///< W, an F statistic on absolute deviations from group medians
    double df_between = 0.0;
    double df_within = 0.0;
    double p = 1.0;
};

/// Brown-Forsythe variant of Levene's test. Needs at least 2 groups of at
/// least 2 observations; throws ValidationError otherwise or when every
/// observation equals its group median.
LeveneResult levene_test(std::span<const std::vector<double>> groups);

struct ShapiroWilkResult {
    double w = 1.0;
    double p = 1.0;
    bool normal = true; ///< p >= 0.05
};

/// Royston's approximation of the Shapiro-Wilk test, 3 <= n <= 5000.
/// Throws ValidationError for too few values or a constant sample.
ShapiroWilkResult shapiro_wilk(std::span<const double> values);

/// Shapiro-Wilk per group. Advisory only: nothing downstream branches on it.
std::vector<ShapiroWilkResult> normality_screen(std::span<const std::vector<double>> groups);

/// min(1, p * m) for each p. Throws ValidationError when m is zero, smaller
/// than the number of p-values, or a p-value lies outside [0, 1].
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

} // namespace strideflex::stats
