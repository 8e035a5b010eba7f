#pragma once

#include "strideflex/trajectory.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strideflex {

struct ManifestSource {
    std::string source;          ///< tracker name, or "manual"
    std::filesystem::path csv;   ///< resolved against the manifest directory
    bool ground_truth = false;
};

struct ManifestSprint {
    std::string subject_id;
    std::string sprint_id;
    double fps = 100.0;
    double image_width = 1920.0;
    double image_height = 1080.0;
    std::string notes;
    std::vector<ManifestSource> sources;

    CaptureMeta meta_for(const ManifestSource& s) const;
    const ManifestSource* find(const std::string& source) const;
};

/// Sprint manifest. Two JSON layouts are accepted:
///
///     {"subject_id": "S1", "sprint_id": "03", "source": "movenet", "csv": "a.csv",
///      "fps": 100, "image_width": 1920, "image_height": 1080, "notes": ""}
///
/// or a "sprints" array whose entries carry the capture fields plus a
/// "sources" array of {"source", "csv", "ground_truth"} objects, so one
/// manifest can list the manual labels and every tracker for a sprint.
struct Manifest {
    std::vector<ManifestSprint> sprints;

    /// Distinct source names in first-seen order.
    std::vector<std::string> source_names() const;
    /// The source flagged ground_truth, else "manual" when present.
    std::optional<std::string> ground_truth_source() const;
};

Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Writes the "sprints" layout; csv paths are written relative to base_dir when possible.
std::string manifest_to_json(const Manifest& m, const std::filesystem::path& base_dir);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

} // namespace strideflex
