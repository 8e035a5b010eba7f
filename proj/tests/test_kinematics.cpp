#include "strideflex/error.hpp"
#include "strideflex/kinematics.hpp"
#include "strideflex/synthetic.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace strideflex;

TEST(TrunkAngle, Examples) {
    EXPECT_DOUBLE_EQ(trunk_angle({0, 1}, {0, 0}), 0.0);
    EXPECT_NEAR(trunk_angle({1, 1}, {0, 0}), 45.0, 1e-12);
    EXPECT_NEAR(trunk_angle({-1, 1}, {0, 0}), -45.0, 1e-12);
    EXPECT_NEAR(trunk_angle_from_horizontal({0, 1}, {0, 0}), 90.0, 1e-12);
}

TEST(HipAngle, Examples) {
    EXPECT_DOUBLE_EQ(hip_angle({0, 2}, {0, 1}, {0, 0}), 0.0);
    EXPECT_NEAR(hip_angle({0, 2}, {0, 1}, {0.5, 0.5}), 45.0, 1e-12);
    EXPECT_NEAR(hip_angle({0, 2}, {0, 1}, {-0.5, 0.5}), -45.0, 1e-12);
}

TEST(KneeAngle, Examples) {
    EXPECT_DOUBLE_EQ(knee_angle({0, 2}, {0, 1}, {0, 0}), 0.0);
    EXPECT_NEAR(knee_angle({0, 2}, {0, 1}, {-1, 1}), 90.0, 1e-12);
}

TEST(JointAngles, RotationLeavesRelativeAnglesAndShiftsTrunk) {
    const Vec2 s{0.3, 2.1}, h{0.1, 1.0}, k{0.6, 0.4}, a{0.1, -0.2};
    const double phi = deg_to_rad(30.0);
    auto r = [&](Vec2 v) { return rotate(v, phi); };
    EXPECT_NEAR(hip_angle(r(s), r(h), r(k)), hip_angle(s, h, k), 1e-9);
    EXPECT_NEAR(knee_angle(r(h), r(k), r(a)), knee_angle(h, k, a), 1e-9);
    // counter-clockwise rotation tips the trunk backward
    EXPECT_NEAR(trunk_angle(r(s), r(h)), trunk_angle(s, h) - 30.0, 1e-9);
}

TEST(JointAngles, MirrorNegatesKnee) {
    const Vec2 h{0.2, 2.0}, k{0.5, 1.0}, a{-0.4, 0.3};
    auto m = [](Vec2 v) { return Vec2{-v.x, v.y}; };
    EXPECT_NEAR(knee_angle(h, k, a), -knee_angle(m(h), m(k), m(a)), 1e-12);
}

TEST(JointAngles, CoincidentPointsAreErrors) {
    EXPECT_THROW(hip_angle({0, 1}, {0, 0}, {0, 0}), ValidationError);
    EXPECT_THROW(knee_angle({0, 1}, {0, 0}, {0, 0}), ValidationError);
}

TEST(ComputeAngles, ReproducesTheGeneratorCurves) {
    for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
        const GeneratedSprint g = generate(seeded_gait_model(seed));
        const AngleSeries a = compute_angles(g.trajectory);
        ASSERT_EQ(a.frame_count(), g.truth.frame_count());
        for (std::size_t f = 0; f < a.frame_count(); ++f) {
            for (Side s : kBothSides) {
                EXPECT_NEAR(a.frames[f][s].trunk_deg, g.truth.frames[f][s].trunk_deg, 1e-6);
                EXPECT_NEAR(a.frames[f][s].hip_deg, g.truth.frames[f][s].hip_deg, 1e-6);
                EXPECT_NEAR(a.frames[f][s].knee_deg, g.truth.frames[f][s].knee_deg, 1e-6);
                EXPECT_NEAR(a.frames[f][s].trunk_from_horizontal_deg, 90.0 - a.frames[f][s].trunk_deg, 1e-9);
            }
        }
    }
}

TEST(ComputeAngles, ScaleInvariant) {
    const GeneratedSprint g = generate(default_gait_model());
    const AngleSeries a = compute_angles(g.trajectory);
    const AngleSeries b = compute_angles(transform_positions(g.trajectory, 3.7, {12.0, -40.0}));
    for (std::size_t f = 0; f < a.frame_count(); ++f) {
        for (Side s : kBothSides) {
            EXPECT_NEAR(a.frames[f][s].hip_deg, b.frames[f][s].hip_deg, 1e-9);
            EXPECT_NEAR(a.frames[f][s].knee_deg, b.frames[f][s].knee_deg, 1e-9);
            EXPECT_NEAR(a.frames[f][s].trunk_deg, b.frames[f][s].trunk_deg, 1e-9);
        }
    }
}

TEST(ComputeAngles, ZeroAmplitudeModelGivesZeroAngles) {
    GaitModel m = default_gait_model();
    m.trunk = {};
    m.hip = {};
    m.knee = {};
    m.vertical_oscillation = 0.0;
    const GeneratedSprint g = generate(m);
    const AngleSeries a = compute_angles(g.trajectory);
    for (const AngleFrame& fr : a.frames) {
        for (Side s : kBothSides) {
            EXPECT_NEAR(fr[s].trunk_deg, 0.0, 1e-12);
            EXPECT_NEAR(fr[s].hip_deg, 0.0, 1e-12);
            EXPECT_NEAR(fr[s].knee_deg, 0.0, 1e-12);
        }
    }
    for (const AngleFrame& fr : g.truth.frames) {
        EXPECT_EQ(fr[Side::left].hip_deg, 0.0);
    }
}

TEST(ComputeAngles, RequiresCanonicalGapFreeInput) {
    const GeneratedSprint g = generate(default_gait_model());
    EXPECT_THROW(compute_angles(to_image_coordinates(g.trajectory)), ValidationError);
    NoiseSpec ns;
    ns.loss_rate[index_of(JointId::r_knee)] = 1.0;
    try {
        compute_angles(inject_noise(g.trajectory, ns).trajectory);
        FAIL();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("frame"), std::string::npos) << msg;
        EXPECT_NE(msg.find("r_knee"), std::string::npos) << msg;
    }
}

TEST(AngleCsv, WriteThenParse) {
    const GeneratedSprint g = generate(seeded_gait_model(9));
    const AngleSeries a = compute_angles(g.trajectory);
    std::ostringstream out;
    write_angle_csv(out, a, 12);
    std::istringstream in(out.str());
    const AngleSeries b = parse_angle_csv(in, a.fps);
    ASSERT_EQ(b.frame_count(), a.frame_count());
    for (std::size_t f = 0; f < a.frame_count(); ++f) {
        for (Side s : kBothSides) {
            EXPECT_NEAR(b.frames[f][s].knee_deg, a.frames[f][s].knee_deg, 1e-11);
            EXPECT_NEAR(b.frames[f][s].trunk_from_horizontal_deg, a.frames[f][s].trunk_from_horizontal_deg, 1e-11);
        }
    }
    const std::string header = out.str().substr(0, out.str().find('\n'));
    EXPECT_EQ(header, "frame,time_s,left_trunk,left_hip,left_knee,right_trunk,right_hip,right_knee,"
                      "left_trunk_from_horizontal,right_trunk_from_horizontal");
}
