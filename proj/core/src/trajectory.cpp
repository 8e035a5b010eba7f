#include "strideflex/trajectory.hpp"

#include "strideflex/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace strideflex {

TrajectorySet::TrajectorySet(CaptureMeta meta, std::vector<Frame> frames, CoordinateFrame coordinates,
                             std::optional<Direction> direction_raw)
    : meta_(std::move(meta)), frames_(std::move(frames)), coordinates_(coordinates),
      direction_raw_(direction_raw) {
    if (!(meta_.fps > 0.0) || !std::isfinite(meta_.fps)) {
        throw ValidationError("fps must be positive, got " + std::to_string(meta_.fps));
    }
    if (frames_.size() < 2) {
        throw ValidationError("a trajectory needs at least 2 frames, got " +
                              std::to_string(frames_.size()));
    }
    for (std::size_t f = 0; f < frames_.size(); ++f) {
        for (JointId j : kAllJoints) {
            const KeypointSample& s = frames_[f][index_of(j)];
            if (s.confidence && !(*s.confidence >= 0.0 && *s.confidence <= 1.0)) {
                throw ValidationError("frame " + std::to_string(f) + ", " + std::string(name_of(j)) +
                                      ": confidence outside [0,1]");
            }
            if (!s.missing && !(std::isfinite(s.position.x) && std::isfinite(s.position.y))) {
                throw ValidationError("frame " + std::to_string(f) + ", " + std::string(name_of(j)) +
                                      ": non-finite position");
            }
        }
    }
}

std::size_t TrajectorySet::missing_count() const {
    std::size_t n = 0;
    for (JointId j : kAllJoints) {
        n += missing_count(j);
    }
    return n;
}

std::size_t TrajectorySet::missing_count(JointId j) const {
    return static_cast<std::size_t>(std::count_if(frames_.begin(), frames_.end(), [j](const Frame& fr) {
        return fr[index_of(j)].missing;
    }));
}

TrajectorySet TrajectorySet::with_frames(std::vector<Frame> frames) const {
    return TrajectorySet(meta_, std::move(frames), coordinates_, direction_raw_);
}

TrajectorySet transform_positions(const TrajectorySet& t, double scale, Vec2 offset) {
    std::vector<Frame> frames = t.frames();
    for (Frame& fr : frames) {
        for (KeypointSample& s : fr) {
            if (!s.missing) {
                s.position = s.position * scale + offset;
            }
        }
    }
    return t.with_frames(std::move(frames));
}

} // namespace strideflex
