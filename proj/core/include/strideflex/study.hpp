#pragma once

#include "strideflex/error_metrics.hpp"
#include "strideflex/gait_events.hpp"
#include "strideflex/stats/anova.hpp"
#include "strideflex/stats/tests.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace strideflex {

/// An ANOVA together with its assumption screens: Levene across the levels
/// of the between factor and Shapiro-Wilk within each of them. The screens
/// are advisory and never change the table.
struct ScreenedAnova {
    std::string name;
    stats::AnovaTable table;
    std::optional<stats::LeveneResult> levene;
    std::string levene_note; ///< why Levene could not be computed
    std::vector<std::string> groups;
    std::vector<std::optional<stats::ShapiroWilkResult>> normality;
    std::vector<std::string> normality_notes;

    std::string to_json() const;
    void write_text(std::ostream& out) const;
};

ScreenedAnova screened_anova(std::string name, const stats::Design& d);

/// Per joint: the angle ANOVA over every source (when there are at least
/// two) and the absolute-error ANOVA of every other source against
/// `truth_source` (method x time with two or more candidates, time alone
/// with one). Names look like "angle_left_hip" and "error_right_knee".
std::vector<ScreenedAnova> study_anovas(std::span<const StrideSummary> summaries, const std::string& truth_source);

/// Distinct source names in first-seen order.
std::vector<std::string> sources_in(std::span<const StrideSummary> summaries);

} // namespace strideflex
