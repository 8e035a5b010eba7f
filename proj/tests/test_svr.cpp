#include "strideflex/cleaning.hpp"
#include "strideflex/error.hpp"
#include "strideflex/svr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace strideflex;

namespace {

Series sine(std::size_t n, double amplitude, double period) {
    Series s(n);
    for (std::size_t f = 0; f < n; ++f) {
        s[f] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(f) / period);
    }
    return s;
}

} // namespace

TEST(SvrModel, FitsASmoothCurveInsideTheTube) {
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
        x.push_back(i);
        y.push_back(std::sin(i / 15.0) + 0.3 * std::cos(i / 4.0));
    }
    SvrParams p;
    p.epsilon = 0.01;
    p.c = 100.0;
    p.bandwidth = 3.0;
    const SvrModel m = SvrModel::fit(x, y, p);
    EXPECT_TRUE(m.converged());
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(m(x[i]), y[i], 0.03) << i;
    }
    EXPECT_GT(m.support_count(), 0u);
}

TEST(SvrModel, FlatTargetInsideTheTubeNeedsNoSupportVectors) {
    const std::vector<double> x = {0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> y = {0.05, -0.05, 0.02, 0.0, -0.01, 0.03, -0.04, 0.01};
    SvrParams p;
    p.epsilon = 0.1;
    const SvrModel m = SvrModel::fit(x, y, p);
    EXPECT_EQ(m.support_count(), 0u);
    EXPECT_LE(std::abs(m(3.5)), 0.1);
}

TEST(FitSvrCurve, ConstantSeries) {
    const Series s(100, 5.0);
    const SeriesCurve c = fit_svr_curve(s, 100.0, {});
    for (double f = -5.0; f < 105.0; f += 0.5) {
        EXPECT_NEAR(c(f), 5.0, 1e-6);
    }
}

TEST(FitSvrCurve, LinearRampWithinTwoTenths) {
    Series s(100);
    for (std::size_t f = 0; f < 100; ++f) {
        s[f] = static_cast<double>(f);
    }
    CleaningConfig cfg;
    cfg.svr_epsilon = 0.1;
    const SeriesCurve c = fit_svr_curve(s, 100.0, cfg);
    for (std::size_t f = 0; f < 100; ++f) {
        EXPECT_NEAR(c(static_cast<double>(f)), static_cast<double>(f), 0.2);
    }
}

TEST(FitSvrCurve, SpikeBarelyMovesThePrediction) {
    Series clean = sine(200, 10.0, 40.0);
    Series spiked = clean;
    *spiked[90] += 50.0;
    Series without = clean;
    without[90].reset();
    const SeriesCurve a = fit_svr_curve(spiked, 100.0, {});
    const SeriesCurve b = fit_svr_curve(without, 100.0, {});
    EXPECT_NEAR(a(90.0), *clean[90], 2.0);
    EXPECT_NEAR(a(90.0), b(90.0), 2.0);
}

TEST(FitSvrCurve, NeedsEnoughSamples) {
    Series s(100);
    for (std::size_t f = 0; f < 7; ++f) {
        s[f * 10] = 1.0;
    }
    EXPECT_THROW(fit_svr_curve(s, 100.0, {}), ValidationError);
}

TEST(DetectOutliers, ZeroResidualsGiveNone) {
    const Series s = sine(120, 5.0, 30.0);
    EXPECT_TRUE(detect_outliers(s, fit_svr_curve(s, 100.0, {}), {}).empty());
}

TEST(DetectOutliers, FlagsASampleHundredScalesOff) {
    Series s = sine(150, 5.0, 40.0);
    // mild deterministic noise so the robust scale is well defined
    for (std::size_t f = 0; f < s.size(); ++f) {
        *s[f] += 0.05 * std::sin(7.3 * static_cast<double>(f));
    }
    const SeriesCurve c0 = fit_svr_curve(s, 100.0, {});
    const double scale = robust_residual_scale(s, c0);
    ASSERT_GT(scale, 0.0);
    *s[70] += 100.0 * scale;
    const SeriesCurve c = fit_svr_curve(s, 100.0, {});
    const auto out = detect_outliers(s, c, {});
    ASSERT_FALSE(out.empty());
    EXPECT_NE(std::find(out.begin(), out.end(), 70u), out.end());
    EXPECT_LE(out.size(), 3u);
}

TEST(DetectOutliers, EightCleanSamplesGiveNone) {
    Series s(100);
    for (std::size_t k = 0; k < 8; ++k) {
        s[k * 12] = 2.0 + 0.1 * static_cast<double>(k);
    }
    EXPECT_TRUE(detect_outliers(s, fit_svr_curve(s, 100.0, {}), {}).empty());
}

TEST(RobustScale, IsScaledMedianAbsoluteResidual) {
    Series s = {1.0, -2.0, 3.0, -4.0, 5.0, -6.0, 7.0, -8.0, 9.0};
    // A zero predictor: build it from a constant series fit.
    const SeriesCurve zero = fit_svr_curve(Series(9, 0.0), 100.0, {});
    EXPECT_NEAR(robust_residual_scale(s, zero), 1.4826 * 5.0, 1e-12);
}
