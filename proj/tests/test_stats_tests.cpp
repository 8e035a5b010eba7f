#include "strideflex/error.hpp"
#include "strideflex/stats/tests.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace strideflex;
using namespace strideflex::stats;

TEST(Levene, EqualSpreadGivesZero) {
    const std::vector<std::vector<double>> g = {{1, 2, 3, 4}, {11, 12, 13, 14}, {-5, -4, -3, -2}};
    const LeveneResult r = levene_test(g);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p, 1.0, 1e-12);
    EXPECT_EQ(r.df_between, 2.0);
    EXPECT_EQ(r.df_within, 9.0);
}

TEST(Levene, HandComputedStatistic) {
    // |x - median|: {1, 0, 1} and {10, 0, 10}. Between SS 54, within SS 606 / 9.
    const std::vector<std::vector<double>> g = {{1, 2, 3}, {10, 20, 30}};
    const LeveneResult r = levene_test(g);
    EXPECT_NEAR(r.statistic, 324.0 / 101.0, 1e-12);
    EXPECT_NEAR(r.p, 0.1477669257618933, 1e-10);
}

TEST(Levene, ReferenceThreeGroups) {
    const std::vector<std::vector<double>> g = {{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0},
                                                {7.5, 6.1, 9.8, 3.2, 12.4, 8.8, 5.0, 10.1},
                                                {4.4, 4.6, 4.5, 4.9, 4.1, 4.3, 4.8, 4.2}};
    const LeveneResult r = levene_test(g);
    EXPECT_NEAR(r.statistic, 9.753798863240924, 1e-10);
    EXPECT_NEAR(r.p, 0.0010096467838206038, 1e-10);
}

TEST(Levene, ConstantAgainstVaryingIsDetected) {
    const std::vector<std::vector<double>> g = {{5, 5, 5, 5, 5}, {1, 4, 9, 2, 7}};
    EXPECT_GT(levene_test(g).statistic, 0.0);
}

TEST(Levene, DegenerateInputThrows) {
    EXPECT_THROW(levene_test(std::vector<std::vector<double>>{{1, 2, 3}}), ValidationError);
    EXPECT_THROW(levene_test(std::vector<std::vector<double>>{{1, 2}, {3}}), ValidationError);
    EXPECT_THROW(levene_test(std::vector<std::vector<double>>{{2, 2}, {3, 3}}), ValidationError);
}

TEST(ShapiroWilk, ReferenceValues) {
    struct Case {
        std::vector<double> x;
        double w, p;
    };
    const std::vector<Case> cases = {
        {{2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0, 7.7, 1.2}, 0.9396305920541561, 0.5489102288677282},
        {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 50}, 0.5625546287148264, 5.317526449810243e-05},
        {{-2, -1, 0, 1, 2}, 0.986762155211559, 0.9671739349728582},
        {{1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377}, 0.6912209367998683, 0.00030013044299196236},
        {{2.0409, -2.5557, 0.4181, -0.5678, -0.4526, -0.2156, -2.02,  -0.2319, -0.8652, 3.323,
          0.2258, -0.3526, -0.2813, -0.668,  -1.0552, -0.3908, 0.4819, -0.2386, 0.9578,  -0.1998,
          0.0243, 1.5458,  0.5451, -0.5052, -0.1828, 0.5405,  1.9351, -0.2696, -0.2436, 1.0023},
         0.9292004783792421, 0.04676175390559486},
    };
    for (const Case& c : cases) {
        const ShapiroWilkResult r = shapiro_wilk(c.x);
        EXPECT_NEAR(r.w, c.w, 1e-6) << c.x.size();
        EXPECT_NEAR(r.p, c.p, 1e-4 * std::max(c.p, 0.01)) << c.x.size();
        EXPECT_EQ(r.normal, c.p >= 0.05);
    }
}

TEST(ShapiroWilk, InvariantUnderAffineMaps) {
    const std::vector<double> x = {2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0, 7.7, 1.2};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(-3.0 * v + 100.0);
    }
    EXPECT_NEAR(shapiro_wilk(x).w, shapiro_wilk(y).w, 1e-12);
    EXPECT_NEAR(shapiro_wilk(x).p, shapiro_wilk(y).p, 1e-12);
}

TEST(ShapiroWilk, UniformLooksLessNormalThanGaussian) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> flat;
    double normal_w = 0.0, uniform_w = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> a(200), b(200);
        for (std::size_t i = 0; i < 200; ++i) {
            a[i] = gauss(rng);
            b[i] = flat(rng);
        }
        normal_w += shapiro_wilk(a).w;
        uniform_w += shapiro_wilk(b).w;
    }
    EXPECT_LT(uniform_w, normal_w);
}

TEST(ShapiroWilk, RejectsDegenerateSamples) {
    EXPECT_THROW(shapiro_wilk(std::vector<double>{1.0, 2.0}), ValidationError);
    EXPECT_THROW(shapiro_wilk(std::vector<double>{4.0, 4.0, 4.0, 4.0}), ValidationError);
}

TEST(Bonferroni, ScalesAndCaps) {
    const std::vector<double> p = {0.01, 0.02, 0.3, 0.0};
    EXPECT_EQ(bonferroni(p, 4), (std::vector<double>{0.04, 0.08, 1.0, 0.0}));
    EXPECT_EQ(bonferroni(p, 7)[0], 0.07);
    EXPECT_THROW(bonferroni(p, 3), ValidationError);
    EXPECT_THROW(bonferroni(std::vector<double>{1.2}, 1), ValidationError);
    EXPECT_THROW(bonferroni(std::vector<double>{}, 0), ValidationError);
}

TEST(Bonferroni, MonotoneInTheFamilySize) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u;
    std::vector<double> p(6);
    for (double& v : p) {
        v = u(rng);
    }
    for (std::size_t m = 6; m < 20; ++m) {
        const auto a = bonferroni(p, m), b = bonferroni(p, m + 1);
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_LE(a[i], b[i]);
            EXPECT_GE(a[i], p[i]);
        }
    }
}
