#include "strideflex/stats/tests.hpp"

#include "strideflex/error.hpp"
#include "strideflex/stats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace strideflex::stats {
namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double r = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
        r = r * x + c[i];
    }
    return r;
}

} // namespace

LeveneResult levene_test(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) {
        throw ValidationError("levene_test: need at least 2 groups");
    }
    std::vector<std::vector<double>> z(groups.size());
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].size() < 2) {
            throw ValidationError("levene_test: group " + std::to_string(g) + " has fewer than 2 observations");
        }
        const double med = median_of(groups[g]);
        for (double v : groups[g]) {
            z[g].push_back(std::abs(v - med));
        }
        total += groups[g].size();
    }
    double grand = 0.0;
    for (const auto& zg : z) {
        grand += std::accumulate(zg.begin(), zg.end(), 0.0);
    }
    grand /= static_cast<double>(total);

    double between = 0.0;
    double within = 0.0;
    bool all_zero = true;
    for (const auto& zg : z) {
        const double m = mean_of(zg);
        between += static_cast<double>(zg.size()) * (m - grand) * (m - grand);
        for (double v : zg) {
            within += (v - m) * (v - m);
            all_zero = all_zero && v == 0.0;
        }
    }
    if (all_zero) {
        throw ValidationError("levene_test: every observation equals its group median");
    }
    LeveneResult r;
    r.df_between = static_cast<double>(groups.size() - 1);
    r.df_within = static_cast<double>(total - groups.size());
    if (within == 0.0) {
        r.statistic = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        r.statistic = (between / r.df_between) / (within / r.df_within);
    }
    r.p = f_sf(r.statistic, r.df_between, r.df_within);
    return r;
}

ShapiroWilkResult shapiro_wilk(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) {
        throw ValidationError("shapiro_wilk: need at least 3 observations, got " + std::to_string(n));
    }
    if (n > 5000) {
        throw ValidationError("shapiro_wilk: the approximation holds for n <= 5000");
    }
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 1e-12 * std::max(std::abs(x.front()), std::abs(x.back())))) {
        throw ValidationError("shapiro_wilk: sample has zero variance");
    }

    // Coefficients a_i for the lower half, from Royston's polynomial fits.
    const std::size_t half = n / 2;
    const double an = static_cast<double>(n);
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
    } else {
        static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
        static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - m[0] / ssumm2;
        std::size_t first = 1;
        double fac = 0.0;
        if (n > 5) {
            first = 2;
            const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first; i < half; ++i) {
            a[i] = -m[i] / fac;
        }
    }

    const double mean = mean_of(x);
    double ssq = 0.0;
    for (double v : x) {
        ssq += (v - mean) * (v - mean);
    }
    double num = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        num += a[i] * (x[n - 1 - i] - x[i]);
    }
    ShapiroWilkResult r;
    r.w = std::min(1.0, num * num / ssq);

    if (n == 3) {
        constexpr double kSixOverPi = 6.0 / std::numbers::pi;
        constexpr double kAsinThreshold = std::numbers::pi / 3.0; // asin(sqrt(3/4))
        r.p = std::clamp(kSixOverPi * (std::asin(std::sqrt(r.w)) - kAsinThreshold), 0.0, 1.0);
    } else if (r.w >= 1.0) {
        r.p = 1.0;
    } else {
        static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
        static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
        static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
        static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
        static constexpr double g[] = {-2.273, 0.459};
        double w1 = std::log(1.0 - r.w);
        double mu = 0.0;
        double sigma = 0.0;
        if (n <= 11) {
            const double gamma = poly(g, an);
            if (w1 >= gamma) {
                r.p = 0.0;
                r.normal = false;
                return r;
            }
            w1 = -std::log(gamma - w1);
            mu = poly(c3, an);
            sigma = std::exp(poly(c4, an));
        } else {
            const double ln = std::log(an);
            mu = poly(c5, ln);
            sigma = std::exp(poly(c6, ln));
        }
        r.p = normal_sf((w1 - mu) / sigma);
    }
    r.normal = r.p >= 0.05;
    return r;
}

std::vector<ShapiroWilkResult> normality_screen(std::span<const std::vector<double>> groups) {
    std::vector<ShapiroWilkResult> out;
    out.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        try {
            out.push_back(shapiro_wilk(groups[g]));
        } catch (const ValidationError& e) {
            throw ValidationError("normality_screen: group " + std::to_string(g) + ": " + e.what());
        }
    }
    return out;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
    if (m == 0 || m < p_values.size()) {
        throw ValidationError("bonferroni: m must be at least the number of tests (" +
                              std::to_string(p_values.size()) + ")");
    }
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("bonferroni: p-value outside [0, 1]");
        }
        out.push_back(std::min(1.0, p * static_cast<double>(m)));
    }
    return out;
}

} // namespace strideflex::stats
