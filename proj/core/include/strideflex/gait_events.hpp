#pragma once

#include "strideflex/kinematics.hpp"
#include "strideflex/trajectory.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace strideflex {

struct GaitEventConfig {
    double window_s = 0.25;       ///< ankle-y local minimum search window
    double gate_s = 0.05;         ///< horizon of the stance velocity gate
    double velocity_ratio = 0.3;  ///< ankle forward speed must stay below this x mean hip speed
    double min_stride_s = 0.3;
    double max_stride_s = 1.5;

    void validate() const;
};

struct FootStrikeList {
    std::array<std::vector<std::size_t>, 2> frames; ///< indexed by Side

    const std::vector<std::size_t>& operator[](Side s) const { return frames[static_cast<std::size_t>(s)]; }
    std::vector<std::size_t>& operator[](Side s) { return frames[static_cast<std::size_t>(s)]; }
};

/// Foot floor strikes of one side: ankle-y local minima within the search
/// window whose following ankle forward velocity is below the stance gate.
/// Events closer than min_stride_s keep the deeper minimum; the longest run
/// of strikes whose spacing stays within max_stride_s is returned.
/// Throws ValidationError when fewer than two strikes remain.
std::vector<std::size_t> detect_foot_strikes(const TrajectorySet& t, Side side, const GaitEventConfig& cfg = {});
FootStrikeList detect_foot_strikes(const TrajectorySet& t, const GaitEventConfig& cfg = {});

inline constexpr std::size_t kGridPoints = 11; ///< 0, 10, ..., 100 % of stride

using Grid = std::array<double, kGridPoints>;
using ChannelGrids = std::array<Grid, 3>; ///< indexed by Channel

struct StrideSegment {
    Side side = Side::left;
    std::size_t first_frame = 0;
    std::size_t last_frame = 0; ///< inclusive; the next same-side strike
    std::array<std::vector<double>, 3> channels;

    std::size_t frame_count() const { return last_frame - first_frame + 1; }
};

/// One segment per consecutive pair of strikes, endpoints included.
std::vector<StrideSegment> segment_strides(std::span<const std::size_t> strikes, Side side, const AngleSeries& angles);

/// Linear interpolation at 0, 10, ..., 100 % of the segment duration.
/// Throws ValidationError for fewer than 11 samples.
Grid time_normalize(std::span<const double> values);
ChannelGrids time_normalize(const StrideSegment& segment);

enum class StrideSelection { central, first, last };

StrideSelection stride_selection_from_name(const std::string& name);
std::string_view name_of(StrideSelection s);

/// Indices of the strides the policy keeps out of `available`.
std::vector<std::size_t> select_strides(std::size_t available, StrideSelection policy, std::size_t count);

struct SummaryKey {
    std::string subject_id;
    std::string sprint_id;
    Side side = Side::left;

    auto operator<=>(const SummaryKey&) const = default;
};

struct StrideSummary {
    SummaryKey key;
    std::string source;
    ChannelGrids mean{};
    std::vector<ChannelGrids> per_stride;
    std::vector<std::pair<std::size_t, std::size_t>> stride_frames;
    std::size_t n_strides_averaged = 0;

    std::string to_json() const;
};

/// Time-normalizes the selected strides and averages them pointwise.
StrideSummary summarize_strides(std::span<const StrideSegment> segments, StrideSelection policy = StrideSelection::central,
                                std::size_t count = 3);

/// percent,trunk,hip,knee rows for the mean grid.
void write_stride_csv(std::ostream& out, const StrideSummary& s, int decimals = 6);

} // namespace strideflex
