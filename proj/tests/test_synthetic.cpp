#include "strideflex/error.hpp"
#include "strideflex/synthetic.hpp"

#include <gtest/gtest.h>

using namespace strideflex;

TEST(Generate, DefaultModelHasFiveStridesPerSideAtPointEightSeconds) {
    const GaitModel m = default_gait_model();
    ASSERT_DOUBLE_EQ(m.fps, 100.0);
    ASSERT_DOUBLE_EQ(m.stride_hz, 1.25);
    ASSERT_DOUBLE_EQ(m.duration_s, 4.0);
    const GeneratedSprint g = generate(m);
    EXPECT_EQ(g.trajectory.frame_count(), 401u);
    for (Side s : kBothSides) {
        const auto& k = g.strikes[s];
        ASSERT_EQ(k.size(), 5u) << name_of(s);
        for (std::size_t i = 1; i < k.size(); ++i) {
            EXPECT_EQ(k[i] - k[i - 1], 80u);
        }
    }
}

TEST(Generate, IsDeterministic) {
    const GaitModel m = seeded_gait_model(42);
    EXPECT_EQ(generate(m).trajectory, generate(m).trajectory);
    EXPECT_EQ(seeded_gait_model(42).hip.mean, m.hip.mean);
    EXPECT_NE(seeded_gait_model(43).hip.mean, m.hip.mean);
}

TEST(Generate, ScriptedStrikesSitAtAnkleHeightMinima) {
    const GeneratedSprint g = generate(seeded_gait_model(5));
    for (Side s : kBothSides) {
        const JointId ankle = joint(s, Segment::ankle);
        for (std::size_t f : g.strikes[s]) {
            if (f == 0 || f + 1 >= g.trajectory.frame_count()) {
                continue;
            }
            const double y = g.trajectory.at(f, ankle).position.y;
            // within one frame of the analytic minimum: no neighbour two frames off is lower
            if (f >= 2) {
                EXPECT_LE(std::min(y, g.trajectory.at(f - 1, ankle).position.y),
                          g.trajectory.at(f - 2, ankle).position.y);
            }
            if (f + 2 < g.trajectory.frame_count()) {
                EXPECT_LE(std::min(y, g.trajectory.at(f + 1, ankle).position.y),
                          g.trajectory.at(f + 2, ankle).position.y);
            }
        }
    }
}

TEST(GaitModel, RejectsNonPhysiologicalCurves) {
    GaitModel m = default_gait_model();
    m.knee.mean = 150.0;
    EXPECT_THROW(m.validate(), ValidationError);
    m = default_gait_model();
    m.hip.cos_coef[0] = 80.0;
    EXPECT_THROW(generate(m), ValidationError);
    m = default_gait_model();
    m.fps = 0.0;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(GaitModel, SeededModelsAreValid) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        EXPECT_NO_THROW(seeded_gait_model(seed).validate()) << seed;
    }
}

TEST(InjectNoise, ZeroSpecIsIdentity) {
    const GeneratedSprint g = generate(default_gait_model());
    const NoisyTrajectory n = inject_noise(g.trajectory, NoiseSpec{});
    EXPECT_EQ(n.trajectory, g.trajectory);
    EXPECT_TRUE(n.log.events.empty());
}

TEST(InjectNoise, FullLossOnOneJoint) {
    const GeneratedSprint g = generate(default_gait_model());
    NoiseSpec ns;
    ns.loss_rate[index_of(JointId::l_knee)] = 1.0;
    const NoisyTrajectory n = inject_noise(g.trajectory, ns);
    EXPECT_EQ(n.trajectory.missing_count(JointId::l_knee), g.trajectory.frame_count());
    EXPECT_EQ(n.trajectory.missing_count(), g.trajectory.frame_count());
}

TEST(InjectNoise, SwapWindowTouchesExactlyItsRows) {
    const GeneratedSprint g = generate(default_gait_model());
    NoiseSpec ns;
    ns.seed = 77;
    ns.swap_windows.push_back({Segment::ankle, 40, 55});
    const NoisyTrajectory n = inject_noise(g.trajectory, ns);
    for (std::size_t f = 0; f < g.trajectory.frame_count(); ++f) {
        for (JointId j : kAllJoints) {
            const bool inside = f >= 40 && f <= 55 && segment_of(j) == Segment::ankle;
            if (inside) {
                EXPECT_EQ(n.trajectory.at(f, j), g.trajectory.at(f, contralateral(j)));
                EXPECT_NE(n.trajectory.at(f, j), g.trajectory.at(f, j));
            } else {
                EXPECT_EQ(n.trajectory.at(f, j), g.trajectory.at(f, j));
            }
        }
    }
    ASSERT_EQ(n.log.swaps.size(), 1u);
    EXPECT_EQ(n.log.events.size(), 32u);
}

TEST(InjectNoise, UntouchedCellsAreBitIdenticalAndLogIsExact) {
    const GeneratedSprint g = generate(seeded_gait_model(3));
    NoiseSpec ns;
    ns.set_loss_rate(0.05);
    ns.misallocation_rate = 0.03;
    ns.random_swaps_per_pair = 1;
    ns.seed = 9;
    const NoisyTrajectory n = inject_noise(g.trajectory, ns);
    std::vector<std::array<bool, kJointCount>> touched(g.trajectory.frame_count());
    for (const InjectedEvent& e : n.log.events) {
        touched[e.frame][index_of(e.joint)] = true;
    }
    std::size_t lost = 0;
    for (std::size_t f = 0; f < g.trajectory.frame_count(); ++f) {
        for (JointId j : kAllJoints) {
            if (!touched[f][index_of(j)]) {
                EXPECT_EQ(n.trajectory.at(f, j), g.trajectory.at(f, j));
            }
            lost += n.trajectory.at(f, j).missing;
        }
    }
    std::size_t logged_lost = 0;
    for (const InjectedEvent& e : n.log.events) {
        logged_lost += e.kind == InjectedKind::lost;
    }
    EXPECT_EQ(lost, logged_lost);
    EXPECT_EQ(n.log.swaps.size(), 4u);
    EXPECT_EQ(inject_noise(g.trajectory, ns).trajectory, n.trajectory);
}

TEST(InjectNoise, RejectsInvalidSpecs) {
    NoiseSpec ns;
    ns.misallocation_rate = 1.2;
    EXPECT_THROW(ns.validate(), ValidationError);
    ns = {};
    ns.swap_windows.push_back({Segment::knee, 10, 5});
    EXPECT_THROW(ns.validate(), ValidationError);
}
