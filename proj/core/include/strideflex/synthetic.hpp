#pragma once

#include "strideflex/gait_events.hpp"
#include "strideflex/kinematics.hpp"
#include "strideflex/trajectory.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace strideflex {

/// mean + sum_k a_k cos(2 pi k p) + b_k sin(2 pi k p), p in stride cycles, degrees.
struct FourierCurve {
    double mean = 0.0;
    std::array<double, 4> cos_coef{};
    std::array<double, 4> sin_coef{};

    double operator()(double phase) const;
};

/// Parametric sprinter seen from the side. The right limb runs the same
/// angle curves half a cycle after the left one; both hips sit on the
/// root, which advances at forward_speed with a vertical bob at twice the
/// stride frequency (lowest at each mid-stance).
struct GaitModel {
    double stride_hz = 1.25;
    FourierCurve trunk; ///< forward lean from vertical
    FourierCurve hip;
    FourierCurve knee;
    double trunk_length = 105.0;
    double thigh_length = 86.0;
    double shank_length = 86.0;
    double forward_speed = 418.0;
    double hip_height = 155.7;
    double vertical_oscillation = 4.3;
    double start_x = 100.0;
    double start_phase = -0.57; ///< left-limb phase at t = 0 (cycles); mid-flight by default
    double fps = 100.0;
    double duration_s = 4.0;
    std::uint64_t seed = 0;

    std::size_t frame_count() const;
    /// Throws ValidationError when the hip or knee curve leaves the
    /// physiological band (hip [-30, 110], knee [-5, 140]) or a field is out of range.
    void validate() const;
};

/// Default curves: stance ankle nearly stationary, hip about -11..80 deg,
/// knee about 15..104 deg, 0.8 s stride.
GaitModel default_gait_model();

/// A valid random variation of the default model, deterministic in seed.
GaitModel seeded_gait_model(std::uint64_t seed);

struct GeneratedSprint {
    TrajectorySet trajectory; ///< canonical coordinates
    AngleSeries truth;
    FootStrikeList strikes;
};

GeneratedSprint generate(const GaitModel& model, const CaptureMeta& meta_template = {});

/// Canonical to image pixels: y flipped about the image height and, for a
/// right-to-left recording, x mirrored about the image width.
TrajectorySet to_image_coordinates(const TrajectorySet& canonical, bool right_to_left = false);

struct InjectedSwap {
    Segment segment = Segment::ankle;
    std::size_t first = 0;
    std::size_t last = 0; ///< inclusive
};

struct NoiseSpec {
    std::array<double, kJointCount> loss_rate{};
    std::vector<InjectedSwap> swap_windows;
    std::size_t random_swaps_per_pair = 0; ///< extra windows placed by seed
    std::size_t random_swap_length = 12;
    double misallocation_rate = 0.0;
    double displacement_min = 25.0;
    double displacement_max = 60.0;
    double jitter_sd = 0.0;
    std::uint64_t seed = 1;

    void set_loss_rate(double rate) { loss_rate.fill(rate); }
    void validate() const;
};

enum class InjectedKind { lost, swapped, misallocated };

struct InjectedEvent {
    std::size_t frame = 0;
    JointId joint = JointId::l_ankle;
    InjectedKind kind = InjectedKind::lost;
    Vec2 displacement;
};

struct InjectionLog {
    std::vector<InjectedEvent> events;
    std::vector<InjectedSwap> swaps;
};

struct NoisyTrajectory {
    TrajectorySet trajectory;
    InjectionLog log;
};

/// Applies swaps, then misallocations, jitter and losses, in that order.
/// Cells not touched by any injection are bit-identical to the input.
NoisyTrajectory inject_noise(const TrajectorySet& t, const NoiseSpec& spec);

/// Mean Euclidean distance between present samples of a and the matching samples of truth.
double mean_position_error(const TrajectorySet& a, const TrajectorySet& truth);

} // namespace strideflex
