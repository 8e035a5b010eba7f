#pragma once

#include "strideflex/gait_events.hpp"
#include "strideflex/kinematics.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace strideflex {

/// Bins compared per stride: the 0, 10, ..., 90 % grid points. The 100 %
/// point is the next stride's 0 % and is left out.
inline constexpr std::size_t kErrorBins = 10;

struct ErrorCell {
    SummaryKey key;
    Channel channel = Channel::trunk;
    std::size_t bin = 0;
    double candidate = 0.0;
    double truth = 0.0;
    double signed_diff = 0.0; ///< candidate - truth
    double abs_error = 0.0;
};

struct ErrorAggregate {
    std::size_t n = 0;
    double mean_abs = 0.0;
    double sd_abs = 0.0;
    double sem_abs = 0.0;
    double mean_signed = 0.0;
    double sd_signed = 0.0;
    double sem_signed = 0.0;
};

/// Mean, sample SD and SEM of both error forms over the given cells.
ErrorAggregate aggregate(std::span<const ErrorCell* const> cells);

struct JointError {
    Channel channel = Channel::trunk;
    Side side = Side::left;
    ErrorAggregate pooled;   ///< over every cell of the joint
    ErrorAggregate balanced; ///< over per-subject means; n is the subject count
};

struct SubjectCurve {
    std::string subject_id;
    Channel channel = Channel::trunk;
    Side side = Side::left;
    std::array<double, kErrorBins> mean_abs{};
    std::array<double, kErrorBins> mean_signed{};
    std::array<double, kErrorBins> mean_truth{};
    std::array<double, kErrorBins> mean_candidate{};
};

struct BinMean {
    Channel channel = Channel::trunk;
    Side side = Side::left;
    std::array<ErrorAggregate, kErrorBins> bins{};
};

struct ErrorReport {
    std::string candidate_source;
    std::string truth_source;
    std::vector<ErrorCell> cells; ///< sorted by key, channel, bin
    std::vector<JointError> joints; ///< trunk, hip, knee for left then right
    std::vector<SubjectCurve> subject_curves;
    std::vector<BinMean> bin_means;

    const JointError& joint(Channel c, Side s) const;
    std::vector<std::string> subjects() const;
    /// Throws std::logic_error if a cell breaks |signed| = abs or an
    /// aggregate has mean abs below |mean signed|.
    void check_invariants() const;
    std::string to_json() const;
};

/// Cellwise candidate - truth over matching (subject, sprint, side) keys.
/// Throws ValidationError naming the first key present in only one set or
/// listed twice.
ErrorReport compare(std::span<const StrideSummary> candidate, std::span<const StrideSummary> truth);

/// Mean signed difference per joint, [channel][side]; offsets of opposite
/// sign cancel.
using CurveDifference = std::array<std::array<double, 2>, 3>;
CurveDifference mean_curve_difference(std::span<const StrideSummary> candidate, std::span<const StrideSummary> truth);

/// subject,sprint,side,channel,percent,candidate,truth,signed_diff,abs_error
void write_error_cells_csv(std::ostream& out, const ErrorReport& r);
/// One row per joint with pooled and subject-balanced aggregates.
void write_joint_errors_csv(std::ostream& out, const ErrorReport& r);
/// subject,side,channel,percent,mean_abs,mean_signed,mean_truth,mean_candidate
void write_subject_curves_csv(std::ostream& out, const ErrorReport& r);

} // namespace strideflex
