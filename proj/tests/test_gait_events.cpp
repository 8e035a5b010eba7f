#include "strideflex/error.hpp"
#include "strideflex/gait_events.hpp"
#include "strideflex/synthetic.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>

using namespace strideflex;

namespace {

void expect_matches(const std::vector<std::size_t>& detected, const std::vector<std::size_t>& truth, long tol) {
    ASSERT_EQ(detected.size(), truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        EXPECT_LE(std::labs(static_cast<long>(detected[i]) - static_cast<long>(truth[i])), tol)
            << "strike " << i << ": " << detected[i] << " vs " << truth[i];
    }
}

AngleSeries ramp_series(std::size_t n) {
    AngleSeries a;
    a.frames.resize(n);
    for (std::size_t f = 0; f < n; ++f) {
        for (Side s : kBothSides) {
            a.frames[f][s].trunk_deg = 37.0;
            a.frames[f][s].hip_deg = static_cast<double>(f);
            a.frames[f][s].knee_deg = -static_cast<double>(f);
        }
    }
    return a;
}

} // namespace

TEST(FootStrikes, ScriptedAtFrames20_120_220) {
    GaitModel m = default_gait_model();
    // One stride per second: phase 0 (the left strike) falls at t = 0.2 s.
    m.stride_hz = 1.0;
    m.forward_speed *= 0.8;
    m.start_phase = -0.2;
    m.duration_s = 2.6;
    const GeneratedSprint g = generate(m);
    ASSERT_EQ(g.strikes[Side::left], (std::vector<std::size_t>{20, 120, 220}));
    expect_matches(detect_foot_strikes(g.trajectory, Side::left), g.strikes[Side::left], 2);
}

TEST(FootStrikes, DefaultModelWithinOneFrame) {
    const GeneratedSprint g = generate(default_gait_model());
    const FootStrikeList d = detect_foot_strikes(g.trajectory);
    for (Side s : kBothSides) {
        expect_matches(d[s], g.strikes[s], 1);
    }
}

TEST(FootStrikes, SeededModelsRecoverEveryStrike) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GaitModel m = seeded_gait_model(seed);
        m.duration_s = 5.0 / m.stride_hz;
        const GeneratedSprint g = generate(m);
        const FootStrikeList d = detect_foot_strikes(g.trajectory);
        for (Side s : kBothSides) {
            SCOPED_TRACE("seed " + std::to_string(seed));
            expect_matches(d[s], g.strikes[s], 2);
        }
    }
}

TEST(FootStrikes, FasterPlaybackKeepsCountAndScalesDuration) {
    const GeneratedSprint g = generate(default_gait_model());
    CaptureMeta fast = g.trajectory.meta();
    fast.fps *= 1.25;
    const TrajectorySet t(fast, g.trajectory.frames(), CoordinateFrame::canonical, Direction::positive_x);
    for (Side s : kBothSides) {
        const auto a = detect_foot_strikes(g.trajectory, s);
        const auto b = detect_foot_strikes(t, s);
        ASSERT_EQ(a.size(), b.size());
        const double da = static_cast<double>(a.back() - a.front()) / g.trajectory.fps();
        const double db = static_cast<double>(b.back() - b.front()) / t.fps();
        EXPECT_NEAR(db / da, 0.8, 1e-9);
    }
}

TEST(FootStrikes, ConstantPositionHasNoStrikes) {
    std::vector<Frame> frames(200);
    for (Frame& fr : frames) {
        for (JointId j : kAllJoints) {
            fr[index_of(j)].position = {100.0, 50.0 * static_cast<double>(3 - index_of(j) / 2)};
        }
    }
    const TrajectorySet t(CaptureMeta{}, frames, CoordinateFrame::canonical, Direction::positive_x);
    EXPECT_THROW(detect_foot_strikes(t, Side::left), ValidationError);
}

TEST(FootStrikes, RequiresCleanCanonicalInput) {
    const GeneratedSprint g = generate(default_gait_model());
    EXPECT_THROW(detect_foot_strikes(to_image_coordinates(g.trajectory), Side::left), ValidationError);
    GaitEventConfig bad;
    bad.max_stride_s = 0.1;
    EXPECT_THROW(detect_foot_strikes(g.trajectory, Side::left, bad), ValidationError);
}

TEST(SegmentStrides, Arithmetic) {
    const AngleSeries a = ramp_series(300);
    const std::vector<std::size_t> two = {10, 110};
    const auto s1 = segment_strides(two, Side::left, a);
    ASSERT_EQ(s1.size(), 1u);
    EXPECT_EQ(s1[0].frame_count(), 101u);
    EXPECT_EQ(s1[0].channels[1].front(), 10.0);
    EXPECT_EQ(s1[0].channels[1].back(), 110.0);
    const std::vector<std::size_t> three = {10, 110, 205};
    EXPECT_EQ(segment_strides(three, Side::right, a).size(), 2u);
    const std::vector<std::size_t> one = {10};
    EXPECT_THROW(segment_strides(one, Side::left, a), ValidationError);
    const std::vector<std::size_t> outside = {10, 400};
    EXPECT_THROW(segment_strides(outside, Side::left, a), ValidationError);
}

TEST(TimeNormalize, RampConstantAndTooShort) {
    std::vector<double> ramp(101);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const Grid g = time_normalize(ramp);
    for (std::size_t k = 0; k < kGridPoints; ++k) {
        EXPECT_DOUBLE_EQ(g[k], 10.0 * static_cast<double>(k));
    }
    const Grid c = time_normalize(std::vector<double>(57, 37.0));
    for (double v : c) {
        EXPECT_DOUBLE_EQ(v, 37.0);
    }
    EXPECT_THROW(time_normalize(std::vector<double>(10, 1.0)), ValidationError);
}

TEST(TimeNormalize, InterpolatesBetweenFrames) {
    // 16 frames: 10 % of 15 intervals is frame 1.5
    std::vector<double> v(16);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(i * i);
    }
    const Grid g = time_normalize(v);
    EXPECT_DOUBLE_EQ(g[1], 0.5 * (1.0 + 4.0));
    EXPECT_DOUBLE_EQ(g[10], 225.0);
}

TEST(SelectStrides, CentralMatchesBruteForce) {
    for (std::size_t available = 1; available <= 12; ++available) {
        for (std::size_t count = 1; count <= 5; ++count) {
            const auto idx = select_strides(available, StrideSelection::central, count);
            const std::size_t k = std::min(available, count);
            ASSERT_EQ(idx.size(), k);
            // Brute force: the contiguous run whose centre is closest to the middle, earliest on ties.
            const double mid = (static_cast<double>(available) - 1.0) / 2.0;
            std::size_t best = 0;
            double best_d = 1e9;
            for (std::size_t s = 0; s + k <= available; ++s) {
                const double d = std::abs(static_cast<double>(s) + (static_cast<double>(k) - 1.0) / 2.0 - mid);
                if (d < best_d - 1e-12) {
                    best_d = d;
                    best = s;
                }
            }
            EXPECT_EQ(idx.front(), best) << available << " " << count;
        }
    }
    EXPECT_EQ(select_strides(5, StrideSelection::first, 3), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(select_strides(5, StrideSelection::last, 3), (std::vector<std::size_t>{2, 3, 4}));
    EXPECT_EQ(stride_selection_from_name("last"), StrideSelection::last);
    EXPECT_THROW(stride_selection_from_name("middle"), ValidationError);
}

TEST(SummarizeStrides, MeansAndSelection) {
    auto segment = [](double offset) {
        StrideSegment s;
        for (auto& ch : s.channels) {
            for (int i = 0; i <= 50; ++i) {
                ch.push_back(i * 0.5 + offset);
            }
        }
        s.last_frame = 50;
        return s;
    };
    const std::vector<StrideSegment> same = {segment(0), segment(0), segment(0)};
    const StrideSummary a = summarize_strides(same);
    EXPECT_EQ(a.n_strides_averaged, 3u);
    EXPECT_EQ(a.mean, a.per_stride[0]);

    const std::vector<StrideSegment> sym = {segment(0), segment(2), segment(-2)};
    const StrideSummary b = summarize_strides(sym);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < kGridPoints; ++k) {
            EXPECT_NEAR(b.mean[c][k], a.mean[c][k], 1e-12);
        }
    }

    const std::vector<StrideSegment> five = {segment(100), segment(1), segment(2), segment(3), segment(100)};
    const StrideSummary c = summarize_strides(five);
    EXPECT_EQ(c.n_strides_averaged, 3u);
    EXPECT_NEAR(c.mean[0][0], 2.0, 1e-12);
    EXPECT_THROW(summarize_strides(std::vector<StrideSegment>{}), ValidationError);
}

TEST(SummarizeStrides, GridEndpointsComeFromTheBoundingStrikes) {
    const GeneratedSprint g = generate(default_gait_model());
    const AngleSeries a = compute_angles(g.trajectory);
    const auto segs = segment_strides(g.strikes[Side::left], Side::left, a);
    const StrideSummary s = summarize_strides(segs);
    for (std::size_t i = 0; i < s.per_stride.size(); ++i) {
        const auto [first, last] = s.stride_frames[i];
        EXPECT_DOUBLE_EQ(s.per_stride[i][1][0], a.frames[first][Side::left].hip_deg);
        EXPECT_DOUBLE_EQ(s.per_stride[i][1][10], a.frames[last][Side::left].hip_deg);
    }
}
