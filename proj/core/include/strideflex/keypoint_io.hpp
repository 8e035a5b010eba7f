#pragma once

#include "strideflex/trajectory.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace strideflex {

/// Reads the canonical keypoint CSV:
///
///     frame,time_s,l_shoulder_x,l_shoulder_y,l_shoulder_conf,...,r_ankle_conf
///
/// One row per frame, frame indices 0,1,2,... Empty x/y cells mark a missing
/// sample, an empty conf cell an absent confidence. The result is in image
/// coordinates; call canonicalize() before any geometry.
TrajectorySet parse_keypoint_csv(std::istream& in, const CaptureMeta& meta);
TrajectorySet load_keypoint_csv(const std::filesystem::path& path, const CaptureMeta& meta);

void write_keypoint_csv(std::ostream& out, const TrajectorySet& t);
void save_keypoint_csv(const std::filesystem::path& path, const TrajectorySet& t);

std::string keypoint_csv_header();

/// Maps image coordinates to the canonical frame: y flipped upward and,
/// when the hips travel toward -x, x mirrored about the image width. Joint
/// labels are never changed. Already canonical input is returned unchanged.
TrajectorySet canonicalize(const TrajectorySet& t);

struct MaskResult {
    TrajectorySet trajectory;
    std::size_t masked = 0; ///< samples newly flagged missing
};

/// Flags present samples whose confidence is below min_conf as missing.
/// Samples without a confidence value are kept.
MaskResult mask_low_confidence(const TrajectorySet& t, double min_conf);

} // namespace strideflex
