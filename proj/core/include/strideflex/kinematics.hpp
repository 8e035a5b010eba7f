#pragma once

#include "strideflex/geometry.hpp"
#include "strideflex/trajectory.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace strideflex {

// Sagittal angles in the canonical frame (y up, runner moving toward +x).
// Flexion is positive for every angle; trunk flexion is forward lean.

/// Forward lean of the hip->shoulder segment from vertical: 0 upright,
/// positive with the shoulder ahead of the hip.
double trunk_angle(Vec2 shoulder, Vec2 hip);

/// Inclination of the hip->shoulder segment from the forward horizontal
/// (90 when upright). Equals 90 - trunk_angle.
double trunk_angle_from_horizontal(Vec2 shoulder, Vec2 hip);

/// Rotation from the downward extension of the trunk to the thigh; positive
/// with the knee in front of the trunk line.
double hip_angle(Vec2 shoulder, Vec2 hip, Vec2 knee);

/// Rotation from the thigh's extension past the knee to the shank; 0 for a
/// straight leg, positive with the ankle behind the thigh line.
double knee_angle(Vec2 hip, Vec2 knee, Vec2 ankle);

struct AngleSample {
    double trunk_deg = 0.0;
    double hip_deg = 0.0;
    double knee_deg = 0.0;
    double trunk_from_horizontal_deg = 90.0;

    bool operator==(const AngleSample&) const = default;
};

enum class Channel { trunk = 0, hip, knee };

inline constexpr std::array<Channel, 3> kAllChannels = {Channel::trunk, Channel::hip, Channel::knee};

std::string_view name_of(Channel c);
double value_of(const AngleSample& s, Channel c);

struct AngleFrame {
    std::array<AngleSample, 2> side; ///< indexed by Side

    const AngleSample& operator[](Side s) const { return side[static_cast<std::size_t>(s)]; }
    AngleSample& operator[](Side s) { return side[static_cast<std::size_t>(s)]; }
    bool operator==(const AngleFrame&) const = default;
};

struct AngleSeries {
    std::vector<AngleFrame> frames;
    double fps = 100.0;
    CaptureMeta source; ///< metadata of the trajectory the angles came from

    std::size_t frame_count() const { return frames.size(); }
    std::vector<double> channel(Side s, Channel c) const;
};

/// Per frame and side angles of a cleaned, canonical trajectory. Throws
/// ValidationError naming the frame and joints on missing samples or
/// coincident points.
AngleSeries compute_angles(const TrajectorySet& t);

/// CSV with header frame,time_s,left_trunk,left_hip,left_knee,right_trunk,
/// right_hip,right_knee,left_trunk_from_horizontal,right_trunk_from_horizontal.
void write_angle_csv(std::ostream& out, const AngleSeries& a, int decimals = 6);
AngleSeries parse_angle_csv(std::istream& in, double fps);

} // namespace strideflex
