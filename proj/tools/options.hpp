#pragma once

#include <CLI11.hpp>

#include "strideflex/pipeline.hpp"
#include "strideflex/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace strideflex::cli {

// Every PipelineConfig field as an optional flag, applied on top of --config.
struct PipelineFlags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> jobs;
    std::optional<double> min_conf;
    std::optional<std::string> selection;
    std::optional<std::size_t> stride_count;
    std::optional<int> decimals;
    bool clean_manual = false;

    std::optional<double> svr_epsilon;
    std::optional<double> svr_c;
    std::optional<double> kernel_bandwidth;
    std::optional<double> outlier_k;
    std::optional<int> swap_window;
    std::optional<double> min_coverage;
    std::optional<std::size_t> min_samples;

    std::optional<double> window_s;
    std::optional<double> gate_s;
    std::optional<double> velocity_ratio;
    std::optional<double> min_stride_s;
    std::optional<double> max_stride_s;

    void attach(CLI::App& app);
    PipelineConfig resolve() const;
};

struct SimulateFlags {
    std::string config;
    std::string out = "strideflex-sim";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> subjects;
    std::optional<std::size_t> sprints;
    std::optional<double> strides;
    std::optional<double> fps;
    std::vector<std::string> sources;
    std::optional<double> loss_rate;
    std::optional<std::size_t> swaps_per_pair;
    std::optional<std::size_t> swap_length;
    std::optional<double> misallocation_rate;
    std::optional<double> jitter_sd;
    bool fixed_model = false;
    bool right_to_left = false;

    void attach(CLI::App& app);
    SimulationSpec resolve() const;
};

} // namespace strideflex::cli
