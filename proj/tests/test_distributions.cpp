#include "strideflex/stats/distributions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#ifdef STRIDEFLEX_HAVE_BOOST_MATH
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#endif

using namespace strideflex::stats;

TEST(IncompleteBeta, ClosedForms) {
    // I_x(1, 1) = x, I_x(a, 1) = x^a, I_x(1, b) = 1 - (1 - x)^b.
    for (double x : {0.0, 0.01, 0.37, 0.5, 0.99, 1.0}) {
        EXPECT_NEAR(incomplete_beta(1.0, 1.0, x), x, 1e-14);
        EXPECT_NEAR(incomplete_beta(3.5, 1.0, x), std::pow(x, 3.5), 1e-14);
        EXPECT_NEAR(incomplete_beta(1.0, 2.25, x), 1.0 - std::pow(1.0 - x, 2.25), 1e-14);
    }
    // arcsine law
    EXPECT_NEAR(incomplete_beta(0.5, 0.5, 0.9), 2.0 / M_PI * std::asin(std::sqrt(0.9)), 1e-13);
}

TEST(IncompleteBeta, ReferenceValues) {
    EXPECT_NEAR(incomplete_beta(2.5, 3.5, 0.3), 0.29675298929566646, 1e-13);
    EXPECT_NEAR(incomplete_beta(50.0, 40.0, 0.6), 0.8011534179744886, 1e-12);
}

TEST(IncompleteBeta, Symmetry) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> shape(0.2, 40.0), unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double a = shape(rng), b = shape(rng), x = unit(rng);
        EXPECT_NEAR(incomplete_beta(a, b, x) + incomplete_beta(b, a, 1.0 - x), 1.0, 1e-12) << a << ' ' << b << ' ' << x;
    }
}

TEST(FDistribution, TabulatedCriticalValues) {
    EXPECT_NEAR(f_quantile(0.95, 1, 10), 4.96460274373071, 1e-9);
    EXPECT_NEAR(f_quantile(0.95, 3, 20), 3.09839121214078, 1e-9);
    EXPECT_NEAR(f_quantile(0.99, 2, 8), 8.649110640673515, 1e-9);
    EXPECT_NEAR(f_quantile(0.95, 7, 32), 2.3127411866337537, 1e-9);
}

TEST(FDistribution, UpperTail) {
    EXPECT_NEAR(f_sf(19.776470588235295, 1, 2), 0.04702688780523276, 1e-13);
    EXPECT_NEAR(f_sf(3.5, 4, 12), 0.04089467166212072, 1e-13);
    // deep tail keeps relative precision
    EXPECT_NEAR(f_sf(120.0, 2, 30) / 4.8569357496188575e-15, 1.0, 1e-9);
    EXPECT_EQ(f_sf(0.0, 3, 9), 1.0);
    EXPECT_EQ(f_cdf(0.0, 3, 9), 0.0);
}

TEST(FDistribution, QuantileInvertsCdf) {
    for (double d1 : {1.0, 2.0, 5.0, 30.0}) {
        for (double d2 : {1.0, 4.0, 12.0, 200.0}) {
            for (double p : {0.001, 0.05, 0.5, 0.95, 0.999}) {
                EXPECT_NEAR(f_cdf(f_quantile(p, d1, d2), d1, d2), p, 1e-10) << d1 << ' ' << d2 << ' ' << p;
            }
        }
    }
}

TEST(Normal, QuantileAndTails) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_sf(8.0) / 6.220960574271785e-16, 1.0, 1e-12);
    for (double p = 1e-6; p < 1.0; p += 0.0371) {
        EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14);
    }
}

#ifdef STRIDEFLEX_HAVE_BOOST_MATH
TEST(BoostOracle, IncompleteBetaAndF) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> shape(0.3, 60.0), unit(0.0, 1.0), stat(0.0, 25.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = shape(rng), b = shape(rng), x = unit(rng);
        EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12);
        const double d1 = std::floor(shape(rng)) + 1.0, d2 = std::floor(shape(rng)) + 1.0, f = stat(rng);
        const boost::math::fisher_f dist(d1, d2);
        EXPECT_NEAR(f_cdf(f, d1, d2), boost::math::cdf(dist, f), 1e-12);
        const double p = unit(rng) * 0.98 + 0.01;
        const double q = boost::math::quantile(dist, p);
        EXPECT_NEAR(f_quantile(p, d1, d2), q, 1e-9 * std::max(1.0, q));
    }
    const boost::math::normal n;
    for (double p = 0.0005; p < 1.0; p += 0.0123) {
        EXPECT_NEAR(normal_quantile(p), boost::math::quantile(n, p), 1e-13);
    }
}
#endif
