#pragma once

#include "strideflex/svr.hpp"
#include "strideflex/trajectory.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace strideflex {

/// One coordinate of one joint over the sprint; nullopt marks a missing frame.
using Series = std::vector<std::optional<double>>;

enum class Axis { x, y };

Series extract_series(const TrajectorySet& t, JointId j, Axis axis);

/// Hyperparameters of the tracking post-processing. Unset values are
/// resolved per series:
///   svr_epsilon      0.5% of the detrended series range
///   svr_c            10 x the detrended series variance
///   kernel_bandwidth 0.08 x fps frames
struct CleaningConfig {
    std::optional<double> svr_epsilon;
    std::optional<double> svr_c;
    std::optional<double> kernel_bandwidth;
    double outlier_k = 3.0;
    int swap_window = 3;       ///< shortest run of frames relabeled as one left/right confusion
    double min_coverage = 0.2; ///< below this fraction of present samples a joint is unrecoverable
    std::size_t min_samples = 8;

    void validate() const;
};

/// Smooth predictor over frame index: a least-squares line plus an
/// epsilon-SVR fit of the standardized residual around it.
class SeriesCurve {
public:
    double operator()(double frame) const;
    /// Tube half-width in series units.
    double epsilon() const { return epsilon_; }

private:
    friend SeriesCurve fit_svr_curve(std::span<const std::optional<double>>, double, const CleaningConfig&);

    double intercept_ = 0.0;
    double slope_ = 0.0;
    double scale_ = 0.0;
    double epsilon_ = 0.0;
    std::optional<SvrModel> model_;
};

/// Throws ValidationError when fewer than cfg.min_samples values are present.
SeriesCurve fit_svr_curve(std::span<const std::optional<double>> series, double fps, const CleaningConfig& cfg);

/// 1.4826 x median absolute residual over present samples.
double robust_residual_scale(std::span<const std::optional<double>> series, const SeriesCurve& curve);

/// Frames whose residual exceeds outlier_k x robust scale (and the tube
/// half-width, so samples inside the insensitive tube are never flagged).
std::vector<std::size_t> detect_outliers(std::span<const std::optional<double>> series, const SeriesCurve& curve,
                                         const CleaningConfig& cfg);

enum class SampleClass { clean = 0, lost, swapped, misallocated };

std::string_view name_of(SampleClass c);

struct SwapWindow {
    Segment segment;
    std::size_t first = 0;
    std::size_t last = 0; ///< inclusive

    bool operator==(const SwapWindow&) const = default;
};

struct CorrectedRange {
    JointId joint;
    SampleClass kind;
    std::size_t first = 0;
    std::size_t last = 0; ///< inclusive
};

struct JointCounts {
    std::size_t clean = 0;
    std::size_t lost = 0;
    std::size_t swapped = 0;
    std::size_t misallocated = 0;

    std::size_t total() const { return clean + lost + swapped + misallocated; }
};

/// Per frame and joint classification of what the cleaning did.
struct CleaningReport {
    std::vector<std::array<SampleClass, kJointCount>> classes;
    std::vector<SwapWindow> swap_windows;

    JointCounts counts(JointId j) const;
    std::vector<CorrectedRange> corrected_ranges() const;
    bool all_clean() const;
    std::string to_json() const;
};

struct SwapRepair {
    TrajectorySet trajectory;
    std::vector<SwapWindow> windows;
    /// swapped[f][segment] is true when frame f of that left/right pair was relabeled.
    std::vector<std::array<bool, 4>> swapped;
};

/// Finds runs of frames whose left/right labels break the continuity of
/// both tracks, then exchanges the samples of each run at least swap_window
/// frames long where doing so at least halves the summed residual against
/// both sides' predictors.
SwapRepair repair_swaps(const TrajectorySet& t, const CleaningConfig& cfg);

struct FillRepair {
    TrajectorySet trajectory;
    /// lost / misallocated / clean per frame and joint.
    std::vector<std::array<SampleClass, kJointCount>> classes;
};

/// Replaces missing samples and remaining outliers with the refitted
/// predictor value. The output has no missing samples.
FillRepair repair_loss_and_misallocation(const TrajectorySet& t, const CleaningConfig& cfg);

struct CleanResult {
    TrajectorySet trajectory;
    CleaningReport report;
};

/// Full post-processing: swap repair, then loss and misallocation repair.
CleanResult clean(const TrajectorySet& t, const CleaningConfig& cfg = {});

} // namespace strideflex
