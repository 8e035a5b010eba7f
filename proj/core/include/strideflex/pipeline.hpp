#pragma once

#include "strideflex/cleaning.hpp"
#include "strideflex/error_metrics.hpp"
#include "strideflex/gait_events.hpp"
#include "strideflex/kinematics.hpp"
#include "strideflex/manifest.hpp"
#include "strideflex/stats/anova.hpp"
#include "strideflex/trajectory.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace strideflex {

struct PipelineConfig {
    CleaningConfig cleaning;
    GaitEventConfig events;
    StrideSelection selection = StrideSelection::central;
    std::size_t stride_count = 3;
    double min_conf = 0.3;
    std::filesystem::path output_dir = "strideflex-out";
    bool write_json = true;
    bool write_csv = true;
    bool clean_manual = false; ///< manual labels are taken as ground truth and left as they are
    std::size_t jobs = 1;
    int decimals = 6;

    void validate() const;
};

/// Overlays the fields present in a JSON object onto `base`. Unknown keys
/// are rejected so that typos do not pass silently.
PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig base = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path, PipelineConfig base = {});
std::string pipeline_config_to_json(const PipelineConfig& cfg);

struct SprintResult {
    CaptureMeta meta;
    bool cleaned = false;
    std::size_t masked = 0;
    TrajectorySet trajectory; ///< canonical, gap-free
    std::optional<CleaningReport> report;
    AngleSeries angles;
    FootStrikeList strikes;
    std::array<StrideSummary, 2> summaries; ///< indexed by Side
};

/// Mask, canonicalize, clean, angles, strikes, segmentation and summaries
/// for one trajectory in image coordinates. Errors carry the subject,
/// sprint and source in their message.
SprintResult analyze_trajectory(const TrajectorySet& raw, const PipelineConfig& cfg);

/// Loads one manifest entry and analyzes it.
SprintResult analyze_source(const ManifestSprint& sprint, const ManifestSource& source, const PipelineConfig& cfg);

/// Every (sprint, source) pair of the manifest, optionally restricted to
/// the named sources, processed on up to cfg.jobs threads. Results keep
/// manifest order.
std::vector<SprintResult> analyze_manifest(const Manifest& m, const PipelineConfig& cfg,
                                           const std::vector<std::string>& sources = {});

/// <output_dir>/<subject>/<sprint>/<source>/ for one result.
std::filesystem::path sprint_directory(const PipelineConfig& cfg, const CaptureMeta& meta);

/// Per-sprint files: angles.csv, keypoints_clean.csv, strikes.json,
/// cleaning.json, summary_<side>.json / .csv.
void write_sprint_outputs(const SprintResult& r, const PipelineConfig& cfg);

/// subject,sprint,source,side,channel,percent,value over all 11 grid points.
void write_summaries_csv(std::ostream& out, const std::vector<SprintResult>& results, int decimals = 6);

/// Reads the file written by write_summaries_csv back into summaries
/// (per-stride detail is not stored, so only the mean grids come back).
std::vector<StrideSummary> read_summaries_csv(std::istream& in);

/// The summaries of one source, for compare().
std::vector<StrideSummary> summaries_of(const std::vector<SprintResult>& results, const std::string& source);

/// Long table subject,sprint,method,time,value of one joint angle on the
/// ten compared bins, one method per source name.
stats::LongTable angle_table(std::span<const StrideSummary> summaries, Channel c, Side s);

/// Long table subject,sprint,method,time,value of the absolute errors of
/// one joint, one method per report.
stats::LongTable error_table(std::span<const ErrorReport> reports, Channel c, Side s);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace strideflex
