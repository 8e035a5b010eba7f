#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace strideflex {

enum class Side { left = 0, right = 1 };

enum class Segment { shoulder = 0, hip, knee, ankle };

// Column order of the keypoint CSV.
enum class JointId : int {
    l_shoulder = 0,
    r_shoulder,
    l_hip,
    r_hip,
    l_knee,
    r_knee,
    l_ankle,
    r_ankle,
};

inline constexpr std::size_t kJointCount = 8;

inline constexpr std::array<JointId, kJointCount> kAllJoints = {
    JointId::l_shoulder, JointId::r_shoulder, JointId::l_hip,   JointId::r_hip,
    JointId::l_knee,     JointId::r_knee,     JointId::l_ankle, JointId::r_ankle,
};

inline constexpr std::array<Side, 2> kBothSides = {Side::left, Side::right};

inline constexpr std::array<Segment, 4> kAllSegments = {Segment::shoulder, Segment::hip,
                                                          Segment::knee, Segment::ankle};

constexpr std::size_t index_of(JointId j) { return static_cast<std::size_t>(j); }

constexpr Side side_of(JointId j) { return (index_of(j) % 2 == 0) ? Side::left : Side::right; }

constexpr Segment segment_of(JointId j) { return static_cast<Segment>(index_of(j) / 2); }

constexpr JointId joint(Side s, Segment g) {
    return static_cast<JointId>(static_cast<int>(g) * 2 + static_cast<int>(s));
}

constexpr JointId contralateral(JointId j) {
    return joint(side_of(j) == Side::left ? Side::right : Side::left, segment_of(j));
}

constexpr std::string_view name_of(JointId j) {
    constexpr std::array<std::string_view, kJointCount> names = {
        "l_shoulder", "r_shoulder", "l_hip", "r_hip", "l_knee", "r_knee", "l_ankle", "r_ankle",
    };
    return names[index_of(j)];
}

constexpr std::string_view name_of(Side s) { return s == Side::left ? "left" : "right"; }

constexpr std::string_view name_of(Segment g) {
    constexpr std::array<std::string_view, 4> names = {"shoulder", "hip", "knee", "ankle"};
    return names[static_cast<std::size_t>(g)];
}

constexpr std::optional<JointId> joint_from_name(std::string_view name) {
    for (JointId j : kAllJoints) {
        if (name_of(j) == name) {
            return j;
        }
    }
    return std::nullopt;
}

} // namespace strideflex
