#pragma once

#include "options.hpp"

#include <optional>
#include <string>
#include <vector>

namespace strideflex::cli {

struct AnalyzeArgs {
    std::string manifest;
    std::vector<std::string> sources;
    PipelineFlags flags;
};

struct CompareArgs {
    std::string truth;
    std::optional<std::string> candidate;
    std::optional<std::string> truth_source;
    std::vector<std::string> candidate_sources;
    PipelineFlags flags;
};

struct StatsArgs {
    std::string input;
    bool table = false;
    std::optional<std::string> truth_source;
    std::string between = "subject";
    std::string unit = "sprint";
    std::vector<std::string> within = {"method", "time"};
    std::string value = "value";
    PipelineFlags flags;
};

int run_analyze(const AnalyzeArgs& a);
int run_compare(const CompareArgs& a);
int run_stats(const StatsArgs& a);
int run_simulate(const SimulateFlags& a);

} // namespace strideflex::cli
