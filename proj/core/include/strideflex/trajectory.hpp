#pragma once

#include "strideflex/geometry.hpp"
#include "strideflex/joint.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace strideflex {

struct KeypointSample {
    Vec2 position;
    std::optional<double> confidence;
    bool missing = false;

    bool operator==(const KeypointSample&) const = default;
};

using Frame = std::array<KeypointSample, kJointCount>;

enum class CoordinateFrame {
    image,     ///< pixels, y grows downward, runner may move either way
    canonical, ///< y up, runner moves toward +x
};

enum class Direction { positive_x, negative_x };

struct CaptureMeta {
    double fps = 100.0;
    std::string source;
    std::string subject_id;
    std::string sprint_id;
    double image_width = 1920.0;
    double image_height = 1080.0;
    std::string notes;

    bool operator==(const CaptureMeta&) const = default;
};

/// Per-frame positions of the eight tracked joint centers for one sprint.
///
/// Immutable once built; every processing step returns a new set. The
/// constructor enforces the structural invariants (fps > 0, at least two
/// frames, confidences in [0, 1], finite coordinates on present samples).
class TrajectorySet {
public:
    TrajectorySet(CaptureMeta meta, std::vector<Frame> frames,
                  CoordinateFrame coordinates = CoordinateFrame::image,
                  std::optional<Direction> direction_raw = std::nullopt);

    const CaptureMeta& meta() const { return meta_; }
    double fps() const { return meta_.fps; }
    std::size_t frame_count() const { return frames_.size(); }
    const std::vector<Frame>& frames() const { return frames_; }
    const Frame& frame(std::size_t f) const { return frames_.at(f); }
    const KeypointSample& at(std::size_t f, JointId j) const { return frames_.at(f)[index_of(j)]; }
    CoordinateFrame coordinates() const { return coordinates_; }
    std::optional<Direction> direction_raw() const { return direction_raw_; }

    std::size_t missing_count() const;
    std::size_t missing_count(JointId j) const;

    /// Same metadata and coordinate frame, new samples.
    TrajectorySet with_frames(std::vector<Frame> frames) const;

    bool operator==(const TrajectorySet&) const = default;

private:
    CaptureMeta meta_;
    std::vector<Frame> frames_;
    CoordinateFrame coordinates_;
    std::optional<Direction> direction_raw_;
};

/// Uniform scale about the origin followed by a translation; used by the
/// invariance tests and by the simulator's image mapping.
TrajectorySet transform_positions(const TrajectorySet& t, double scale, Vec2 offset);

} // namespace strideflex
