#include "strideflex/error.hpp"
#include "strideflex/keypoint_io.hpp"
#include "strideflex/synthetic.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace strideflex;

namespace {

// Three frames; the runner moves right by 10 px per frame, y grows downward.
std::string three_frame_csv(double dx = 10.0, const std::string& conf = "0.9") {
    std::ostringstream os;
    os << keypoint_csv_header() << '\n';
    for (int f = 0; f < 3; ++f) {
        os << f << ',' << f * 0.01;
        for (JointId j : kAllJoints) {
            const double y = 200.0 + 100.0 * static_cast<double>(index_of(j) / 2);
            os << ',' << 500.0 + dx * f << ',' << y << ',' << conf;
        }
        os << '\n';
    }
    return os.str();
}

TrajectorySet parse(const std::string& text) {
    std::istringstream in(text);
    return parse_keypoint_csv(in, CaptureMeta{});
}

std::string replace_line(const std::string& text, int line_no, const std::string& line) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string l;
    for (int i = 0; std::getline(in, l); ++i) {
        out << (i == line_no ? line : l) << '\n';
    }
    return out.str();
}

} // namespace

TEST(KeypointCsv, MinimalValidFile) {
    const TrajectorySet t = parse(three_frame_csv());
    EXPECT_EQ(t.frame_count(), 3u);
    EXPECT_EQ(t.coordinates(), CoordinateFrame::image);
    EXPECT_EQ(t.missing_count(), 0u);
    EXPECT_DOUBLE_EQ(t.at(2, JointId::r_ankle).position.x, 520.0);
    EXPECT_DOUBLE_EQ(*t.at(0, JointId::l_hip).confidence, 0.9);
}

TEST(KeypointCsv, EmptyCellsMarkMissing) {
    std::string text = three_frame_csv();
    std::istringstream in(text);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    // Blank the l_knee x and y of frame 1 (cells 2 + 4*3 and the next one).
    std::vector<std::string> cells;
    std::stringstream ss(row1);
    for (std::string c; std::getline(ss, c, ',');) {
        cells.push_back(c);
    }
    cells[2 + 3 * index_of(JointId::l_knee)] = "";
    cells[3 + 3 * index_of(JointId::l_knee)] = "";
    std::string joined;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        joined += (i ? "," : "") + cells[i];
    }
    const TrajectorySet t = parse(replace_line(text, 2, joined));
    EXPECT_TRUE(t.at(1, JointId::l_knee).missing);
    EXPECT_EQ(t.missing_count(), 1u);
    EXPECT_FALSE(t.at(1, JointId::r_knee).missing);
}

TEST(KeypointCsv, DuplicateFrameIndexIsRejected) {
    std::string text = three_frame_csv();
    std::istringstream in(text);
    std::string header, row0;
    std::getline(in, header);
    std::getline(in, row0);
    try {
        parse(replace_line(text, 2, row0));
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate frame"), std::string::npos) << e.what();
    }
}

TEST(KeypointCsv, MalformedInputsAreRejected) {
    EXPECT_THROW(parse(""), ValidationError);
    EXPECT_THROW(parse("frame,time\n"), ValidationError);
    EXPECT_THROW(parse(replace_line(three_frame_csv(), 1, "0,0,1,2")), ValidationError);
    EXPECT_THROW(parse(three_frame_csv(10.0, "1.5")), ValidationError);
    EXPECT_THROW(parse(three_frame_csv(10.0, "abc")), ValidationError);
    // one row: fewer than two frames
    EXPECT_THROW(parse(keypoint_csv_header() + "\n"), ValidationError);
}

TEST(KeypointCsv, WriteThenParseRoundTripsExactly) {
    const GeneratedSprint g = generate(seeded_gait_model(4));
    NoiseSpec ns;
    ns.set_loss_rate(0.05);
    ns.jitter_sd = 1.3;
    const TrajectorySet noisy = to_image_coordinates(inject_noise(g.trajectory, ns).trajectory);
    std::ostringstream out;
    write_keypoint_csv(out, noisy);
    std::istringstream in(out.str());
    const TrajectorySet back = parse_keypoint_csv(in, noisy.meta());
    EXPECT_EQ(back, noisy);
}

TEST(KeypointCsv, ColumnOrderIsFreeAfterTheFirstTwo) {
    const TrajectorySet base = parse(three_frame_csv());
    // Move the l_shoulder triple to the end of each row.
    std::istringstream in(three_frame_csv());
    std::ostringstream out;
    for (std::string l; std::getline(in, l);) {
        std::vector<std::string> c;
        std::stringstream ss(l);
        for (std::string x; std::getline(ss, x, ',');) {
            c.push_back(x);
        }
        std::vector<std::string> r = {c[0], c[1]};
        r.insert(r.end(), c.begin() + 5, c.end());
        r.insert(r.end(), c.begin() + 2, c.begin() + 5);
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << r[i];
        }
        out << '\n';
    }
    EXPECT_EQ(parse(out.str()), base);
}

TEST(Canonicalize, LeftToRightFlipsOnlyY) {
    const TrajectorySet t = parse(three_frame_csv(10.0));
    const TrajectorySet c = canonicalize(t);
    EXPECT_EQ(c.coordinates(), CoordinateFrame::canonical);
    EXPECT_EQ(c.direction_raw(), Direction::positive_x);
    for (std::size_t f = 0; f < 3; ++f) {
        for (JointId j : kAllJoints) {
            EXPECT_DOUBLE_EQ(c.at(f, j).position.x, t.at(f, j).position.x);
            EXPECT_DOUBLE_EQ(c.at(f, j).position.y, 1080.0 - t.at(f, j).position.y);
        }
    }
    // shoulders stay above hips after the flip
    EXPECT_GT(c.at(0, JointId::l_shoulder).position.y, c.at(0, JointId::l_hip).position.y);
    EXPECT_EQ(canonicalize(c), c);
}

TEST(Canonicalize, RightToLeftMirrorsXAndKeepsLabels) {
    const TrajectorySet t = parse(three_frame_csv(-10.0));
    const TrajectorySet c = canonicalize(t);
    EXPECT_EQ(c.direction_raw(), Direction::negative_x);
    EXPECT_LT(c.at(0, JointId::l_hip).position.x, c.at(2, JointId::l_hip).position.x);
    EXPECT_DOUBLE_EQ(c.at(1, JointId::r_knee).position.x, 1920.0 - t.at(1, JointId::r_knee).position.x);
}

TEST(Canonicalize, StationaryRunnerIsADirectionError) {
    EXPECT_THROW(canonicalize(parse(three_frame_csv(0.0))), ValidationError);
}

TEST(Canonicalize, MirroredRecordingGivesTheSameCanonicalTrajectory) {
    const GeneratedSprint g = generate(default_gait_model());
    const TrajectorySet ltr = canonicalize(to_image_coordinates(g.trajectory, false));
    const TrajectorySet rtl = canonicalize(to_image_coordinates(g.trajectory, true));
    for (std::size_t f = 0; f < g.trajectory.frame_count(); f += 17) {
        for (JointId j : kAllJoints) {
            EXPECT_NEAR(rtl.at(f, j).position.x, g.trajectory.at(f, j).position.x, 1e-9);
            EXPECT_NEAR(ltr.at(f, j).position.y, g.trajectory.at(f, j).position.y, 1e-9);
        }
    }
}

TEST(ConfidenceMask, ZeroThresholdIsIdentity) {
    const TrajectorySet t = parse(three_frame_csv());
    const MaskResult m = mask_low_confidence(t, 0.0);
    EXPECT_EQ(m.trajectory, t);
    EXPECT_EQ(m.masked, 0u);
}

TEST(ConfidenceMask, ThresholdOneMasksEverythingBelowIt) {
    const MaskResult m = mask_low_confidence(parse(three_frame_csv()), 1.0);
    EXPECT_EQ(m.masked, 3u * kJointCount);
    EXPECT_EQ(m.trajectory.missing_count(), 3u * kJointCount);
}

TEST(ConfidenceMask, MasksExactlyTheLowSamples) {
    std::vector<Frame> frames(4);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (JointId j : kAllJoints) {
            KeypointSample& s = frames[f][index_of(j)];
            s.position = {static_cast<double>(f), static_cast<double>(index_of(j))};
            s.confidence = ((f + index_of(j)) % 2 == 0) ? 0.2 : 0.8;
        }
    }
    frames[3][0].confidence.reset(); // absent confidence is never masked
    const TrajectorySet t(CaptureMeta{}, frames);
    const MaskResult m = mask_low_confidence(t, 0.5);
    std::size_t expected = 0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (JointId j : kAllJoints) {
            const auto& in = frames[f][index_of(j)];
            const bool low = in.confidence && *in.confidence < 0.5;
            expected += low;
            EXPECT_EQ(m.trajectory.at(f, j).missing, low);
            if (!low) {
                EXPECT_EQ(m.trajectory.at(f, j), in);
            }
        }
    }
    EXPECT_EQ(m.masked, expected);
    EXPECT_THROW(mask_low_confidence(t, 1.5), ValidationError);
}

TEST(TrajectorySet, ConstructorEnforcesInvariants) {
    std::vector<Frame> one(1);
    EXPECT_THROW(TrajectorySet(CaptureMeta{}, one), ValidationError);
    std::vector<Frame> two(2);
    CaptureMeta bad;
    bad.fps = 0.0;
    EXPECT_THROW(TrajectorySet(bad, two), ValidationError);
    two[0][0].confidence = -0.1;
    EXPECT_THROW(TrajectorySet(CaptureMeta{}, two), ValidationError);
    two[0][0].confidence.reset();
    two[1][3].position.x = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(TrajectorySet(CaptureMeta{}, two), ValidationError);
    two[1][3].missing = true; // missing cells may hold anything
    EXPECT_NO_THROW(TrajectorySet(CaptureMeta{}, two));
}

TEST(KeypointCsv, MissingFileIsAnIoErrorNamingThePath) {
    try {
        load_keypoint_csv("/nonexistent/run.csv", CaptureMeta{});
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/run.csv"), std::string::npos);
    }
}
