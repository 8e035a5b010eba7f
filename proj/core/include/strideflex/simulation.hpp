#pragma once

#include "strideflex/manifest.hpp"
#include "strideflex/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strideflex {

/// A synthetic study: subjects x sprints noise-free "manual" recordings
/// plus one noisy copy per tracker source.
struct SimulationSpec {
    std::size_t subjects = 5;
    std::size_t sprints = 8;
    std::uint64_t seed = 1;
    bool seeded_models = true; ///< vary the model per sprint; otherwise every sprint uses `model`
    GaitModel model = default_gait_model();
    std::optional<double> strides; ///< when set, duration = strides / stride_hz
    std::vector<std::string> sources = {"synthetic"};
    NoiseSpec noise;
    bool right_to_left = false;

    void validate() const;
};

SimulationSpec parse_simulation_spec(const std::string& json_text, SimulationSpec base = {});
SimulationSpec load_simulation_spec(const std::filesystem::path& path, SimulationSpec base = {});

/// Model of one sprint of the study.
GaitModel sprint_model(const SimulationSpec& spec, std::size_t subject, std::size_t sprint);

/// Noise of one tracker source on one sprint; the seed mixes all three indices.
NoiseSpec sprint_noise(const SimulationSpec& spec, std::size_t subject, std::size_t sprint, std::size_t source);

std::string subject_id(std::size_t subject);
std::string sprint_id(std::size_t sprint);

std::string injection_log_to_json(const InjectionLog& log);

/// Writes, per sprint, <subject>/<sprint>/manual.csv, <source>.csv,
/// truth_angles.csv, truth_strikes.json and injected_<source>.json, and a
/// manifest.json at the root listing every source. Returns the manifest.
Manifest write_simulated_dataset(const SimulationSpec& spec, const std::filesystem::path& dir);

} // namespace strideflex
