#include "strideflex/error.hpp"
#include "strideflex/error_metrics.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

using namespace strideflex;

namespace {

StrideSummary summary(const std::string& subject, const std::string& sprint, Side side, const std::string& source,
                      std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-20.0, 120.0);
    StrideSummary s;
    s.key = {subject, sprint, side};
    s.source = source;
    for (auto& g : s.mean) {
        for (double& v : g) {
            v = u(rng);
        }
    }
    s.n_strides_averaged = 3;
    return s;
}

std::vector<StrideSummary> cohort(std::uint64_t seed, std::size_t subjects = 3, std::size_t sprints = 4) {
    std::mt19937_64 rng(seed);
    std::vector<StrideSummary> out;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t r = 0; r < sprints; ++r) {
            for (Side side : kBothSides) {
                out.push_back(summary("S" + std::to_string(s + 1), "0" + std::to_string(r + 1), side, "manual", rng));
            }
        }
    }
    return out;
}

template <typename F>
std::vector<StrideSummary> offset(std::vector<StrideSummary> v, F delta) {
    for (StrideSummary& s : v) {
        s.source = "movenet";
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t k = 0; k < kGridPoints; ++k) {
                s.mean[c][k] += delta(s, c, k);
            }
        }
    }
    return v;
}

} // namespace

TEST(Compare, IdenticalInputsHaveZeroError) {
    const auto truth = cohort(1);
    const ErrorReport r = compare(truth, truth);
    EXPECT_EQ(r.cells.size(), truth.size() * 3 * kErrorBins);
    for (const ErrorCell& c : r.cells) {
        EXPECT_EQ(c.abs_error, 0.0);
        EXPECT_EQ(c.signed_diff, 0.0);
    }
    for (const JointError& j : r.joints) {
        EXPECT_EQ(j.pooled.mean_abs, 0.0);
        EXPECT_EQ(j.balanced.mean_abs, 0.0);
    }
    r.check_invariants();
}

TEST(Compare, ConstantOffsetOfTwoDegrees) {
    const auto truth = cohort(2);
    const auto cand = offset(truth, [](auto&, auto, auto) { return 2.0; });
    const ErrorReport r = compare(cand, truth);
    EXPECT_EQ(r.candidate_source, "movenet");
    EXPECT_EQ(r.truth_source, "manual");
    for (const JointError& j : r.joints) {
        EXPECT_NEAR(j.pooled.mean_signed, 2.0, 1e-12);
        EXPECT_NEAR(j.pooled.mean_abs, 2.0, 1e-12);
        EXPECT_NEAR(j.pooled.sd_abs, 0.0, 1e-12);
    }
}

TEST(Compare, OffsetsOfOppositeSignCancelInTheAverageDifference) {
    const auto truth = cohort(3);
    const auto cand = offset(truth, [](auto&, auto, std::size_t k) { return k < 5 ? 3.0 : -3.0; });
    const CurveDifference d = mean_curve_difference(cand, truth);
    for (const auto& per_side : d) {
        for (double v : per_side) {
            EXPECT_NEAR(v, 0.0, 1e-12);
        }
    }
    const ErrorReport r = compare(cand, truth);
    for (const JointError& j : r.joints) {
        EXPECT_NEAR(j.pooled.mean_abs, 3.0, 1e-12);
        EXPECT_NEAR(j.pooled.mean_signed, 0.0, 1e-12);
    }
}

TEST(Compare, ConstantOffsetIsRecoveredExactly) {
    const auto truth = cohort(4);
    const auto cand = offset(truth, [](auto&, auto, auto) { return 4.0; });
    const CurveDifference d = mean_curve_difference(cand, truth);
    for (const auto& per_side : d) {
        for (double v : per_side) {
            EXPECT_NEAR(v, 4.0, 1e-12);
        }
    }
}

TEST(Compare, HundredPercentPointIsNotScored) {
    const auto truth = cohort(5);
    const auto cand = offset(truth, [](auto&, auto, std::size_t k) { return k == 10 ? 50.0 : 0.0; });
    const ErrorReport r = compare(cand, truth);
    for (const JointError& j : r.joints) {
        EXPECT_EQ(j.pooled.mean_abs, 0.0);
    }
}

TEST(Compare, MissingSprintIsNamed) {
    const auto truth = cohort(6);
    auto cand = offset(truth, [](auto&, auto, auto) { return 1.0; });
    cand.erase(cand.begin() + 5);
    try {
        compare(cand, truth);
        FAIL();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(truth[5].key.subject_id), std::string::npos) << msg;
        EXPECT_NE(msg.find(truth[5].key.sprint_id), std::string::npos) << msg;
    }
    auto dup = truth;
    dup.push_back(truth.front());
    EXPECT_THROW(compare(truth, dup), ValidationError);
}

TEST(Compare, AggregatesMatchABruteForceRecomputation) {
    const auto truth = cohort(7, 4, 3);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> noise(1.0, 4.0);
    const auto cand = offset(truth, [&](auto&, auto, auto) { return noise(rng); });
    const ErrorReport r = compare(cand, truth);
    r.check_invariants();

    std::map<std::pair<int, int>, std::vector<double>> abs_by_joint;
    std::map<std::pair<int, int>, std::map<std::string, std::vector<double>>> abs_by_subject;
    std::map<std::tuple<int, int, std::size_t>, std::vector<double>> abs_by_bin;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            for (std::size_t k = 0; k < kErrorBins; ++k) {
                const double e = std::abs(cand[i].mean[c][k] - truth[i].mean[c][k]);
                const auto key = std::make_pair(c, static_cast<int>(truth[i].key.side));
                abs_by_joint[key].push_back(e);
                abs_by_subject[key][truth[i].key.subject_id].push_back(e);
                abs_by_bin[{c, key.second, k}].push_back(e);
            }
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s / static_cast<double>(v.size());
    };
    auto sd = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) {
            s += (x - m) * (x - m);
        }
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    for (const auto& [key, v] : abs_by_joint) {
        const JointError& j = r.joint(static_cast<Channel>(key.first), static_cast<Side>(key.second));
        EXPECT_EQ(j.pooled.n, v.size());
        EXPECT_NEAR(j.pooled.mean_abs, mean(v), 1e-12);
        EXPECT_NEAR(j.pooled.sd_abs, sd(v), 1e-12);
        EXPECT_NEAR(j.pooled.sem_abs, sd(v) / std::sqrt(static_cast<double>(v.size())), 1e-12);

        std::vector<double> subject_means;
        for (const auto& [subject, e] : abs_by_subject[key]) {
            subject_means.push_back(mean(e));
        }
        EXPECT_EQ(j.balanced.n, subject_means.size());
        EXPECT_NEAR(j.balanced.mean_abs, mean(subject_means), 1e-12);
        EXPECT_NEAR(j.balanced.sd_abs, sd(subject_means), 1e-12);
    }
    for (const BinMean& b : r.bin_means) {
        for (std::size_t k = 0; k < kErrorBins; ++k) {
            const auto& v = abs_by_bin[{static_cast<int>(b.channel), static_cast<int>(b.side), k}];
            EXPECT_NEAR(b.bins[k].mean_abs, mean(v), 1e-12);
        }
    }
    EXPECT_EQ(r.subjects(), (std::vector<std::string>{"S1", "S2", "S3", "S4"}));
}

TEST(Compare, MeanAbsoluteErrorBoundsTheMeanDifference) {
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const auto truth = cohort(seed, 2, 2);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.5, 3.0);
        const auto cand = offset(truth, [&](auto&, auto, auto) { return noise(rng); });
        const ErrorReport r = compare(cand, truth);
        for (const JointError& j : r.joints) {
            EXPECT_GE(j.pooled.mean_abs, std::abs(j.pooled.mean_signed));
            EXPECT_GE(j.balanced.mean_abs, std::abs(j.balanced.mean_signed));
        }
        for (const ErrorCell& c : r.cells) {
            EXPECT_EQ(std::abs(c.signed_diff), c.abs_error);
        }
    }
}

TEST(Compare, SubjectCurvesAverageOverSprints) {
    const auto truth = cohort(8, 2, 2);
    const auto cand = offset(truth, [](const StrideSummary& s, auto, auto) { return s.key.sprint_id == "01" ? 1.0 : 5.0; });
    const ErrorReport r = compare(cand, truth);
    ASSERT_EQ(r.subject_curves.size(), 2u * 3u * 2u);
    for (const SubjectCurve& c : r.subject_curves) {
        for (std::size_t k = 0; k < kErrorBins; ++k) {
            EXPECT_NEAR(c.mean_abs[k], 3.0, 1e-12);
            EXPECT_NEAR(c.mean_candidate[k] - c.mean_truth[k], 3.0, 1e-9);
        }
    }
}

TEST(Compare, OutputsAreWellFormed) {
    const auto truth = cohort(9, 2, 1);
    const auto cand = offset(truth, [](auto&, auto, auto) { return 1.5; });
    const ErrorReport r = compare(cand, truth);
    const auto j = nlohmann::json::parse(r.to_json());
    EXPECT_TRUE(j.contains("joints"));

    std::ostringstream cells, joints, curves;
    write_error_cells_csv(cells, r);
    write_joint_errors_csv(joints, r);
    write_subject_curves_csv(curves, r);
    const std::string c = cells.str();
    EXPECT_EQ(c.substr(0, c.find('\n')), "subject,sprint,side,channel,percent,candidate,truth,signed_diff,abs_error");
    EXPECT_EQ(static_cast<std::size_t>(std::count(c.begin(), c.end(), '\n')), r.cells.size() + 1);
    const std::string js = joints.str(), cs = curves.str();
    EXPECT_EQ(std::count(js.begin(), js.end(), '\n'), 7);
    EXPECT_EQ(static_cast<std::size_t>(std::count(cs.begin(), cs.end(), '\n')),
              r.subject_curves.size() * kErrorBins + 1);
}
