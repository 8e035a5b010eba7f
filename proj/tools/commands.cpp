#include "commands.hpp"

#include "strideflex/error.hpp"
#include "strideflex/study.hpp"
#include "strideflex/svg.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace strideflex::cli {
namespace {

using nlohmann::json;

bool is_csv(const std::string& path) { return std::filesystem::path(path).extension() == ".csv"; }

std::vector<StrideSummary> load_summaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open summaries " + path);
    }
    return read_summaries_csv(in);
}

std::vector<StrideSummary> filter(const std::vector<StrideSummary>& all, const std::string& source) {
    std::vector<StrideSummary> out;
    for (const StrideSummary& s : all) {
        if (s.source == source) {
            out.push_back(s);
        }
    }
    if (out.empty()) {
        throw ValidationError("no summaries for source '" + source + "'");
    }
    return out;
}

std::string truth_of(const Manifest& m, const std::optional<std::string>& wanted, const std::string& path) {
    if (wanted) {
        return *wanted;
    }
    if (auto gt = m.ground_truth_source()) {
        return *gt;
    }
    throw ValidationError(path + " has no ground-truth source; pass --truth-source");
}

// Analyzes a manifest and keeps the summaries table of the run.
std::vector<StrideSummary> analyze_to_summaries(const Manifest& m, const PipelineConfig& cfg,
                                                const std::vector<std::string>& sources) {
    const std::vector<SprintResult> results = analyze_manifest(m, cfg, sources);
    std::ostringstream os;
    write_summaries_csv(os, results, 17);
    std::istringstream is(os.str());
    for (const SprintResult& r : results) {
        write_sprint_outputs(r, cfg);
    }
    std::ostringstream rounded;
    write_summaries_csv(rounded, results, cfg.decimals);
    write_text_file(cfg.output_dir / "summaries.csv", rounded.str());
    return read_summaries_csv(is);
}

void print_joint_table(std::ostream& out, const ErrorReport& r) {
    out << r.candidate_source << " vs " << r.truth_source << "\n";
    out << "  joint          mean abs    SEM      SD   mean signed   subj-balanced abs\n";
    out << std::fixed;
    for (const JointError& j : r.joints) {
        std::string label = std::string(name_of(j.side)) + " " + std::string(name_of(j.channel));
        out << "  " << std::left << std::setw(13) << label << std::right << std::setprecision(2) << std::setw(9)
            << j.pooled.mean_abs << std::setw(8) << j.pooled.sem_abs << std::setw(8) << j.pooled.sd_abs
            << std::setw(13) << j.pooled.mean_signed << std::setw(18) << j.balanced.mean_abs << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

} // namespace

int run_analyze(const AnalyzeArgs& a) {
    const PipelineConfig cfg = a.flags.resolve();
    const Manifest m = load_manifest(a.manifest);
    const std::vector<SprintResult> results = analyze_manifest(m, cfg, a.sources);

    json run;
    run["config"] = json::parse(pipeline_config_to_json(cfg));
    run["sprints"] = json::array();
    for (const SprintResult& r : results) {
        write_sprint_outputs(r, cfg);
        json entry = {{"subject_id", r.meta.subject_id},
                      {"sprint_id", r.meta.sprint_id},
                      {"source", r.meta.source},
                      {"cleaned", r.cleaned},
                      {"masked_low_confidence", r.masked},
                      {"frames", r.trajectory.frame_count()},
                      {"strikes_left", r.strikes[Side::left].size()},
                      {"strikes_right", r.strikes[Side::right].size()},
                      {"directory", std::filesystem::relative(sprint_directory(cfg, r.meta), cfg.output_dir).string()}};
        if (r.report) {
            entry["swap_windows"] = r.report->swap_windows.size();
        }
        run["sprints"].push_back(entry);
        std::cout << r.meta.subject_id << '/' << r.meta.sprint_id << " (" << r.meta.source << "): "
                  << r.strikes[Side::left].size() << " left and " << r.strikes[Side::right].size()
                  << " right strikes" << (r.report ? ", " + std::to_string(r.report->swap_windows.size()) +
                                                         " swap windows repaired"
                                                   : std::string())
                  << '\n';
    }
    std::ostringstream os;
    write_summaries_csv(os, results, cfg.decimals);
    write_text_file(cfg.output_dir / "summaries.csv", os.str());
    write_text_file(cfg.output_dir / "run.json", run.dump(2) + "\n");
    std::cout << "wrote " << results.size() << " analyses to " << cfg.output_dir.string() << '\n';
    return 0;
}

int run_compare(const CompareArgs& a) {
    const PipelineConfig cfg = a.flags.resolve();
    std::vector<StrideSummary> truth_all, cand_all;
    std::string truth_source;
    if (is_csv(a.truth)) {
        truth_all = load_summaries(a.truth);
        truth_source = a.truth_source.value_or("manual");
    } else {
        const Manifest m = load_manifest(a.truth);
        truth_source = truth_of(m, a.truth_source, a.truth);
        std::vector<std::string> wanted = {truth_source};
        if (!a.candidate) {
            wanted = a.candidate_sources.empty() ? m.source_names() : a.candidate_sources;
            wanted.push_back(truth_source);
        }
        truth_all = analyze_to_summaries(m, cfg, wanted);
    }
    if (!a.candidate) {
        cand_all = truth_all;
    } else if (is_csv(*a.candidate)) {
        cand_all = load_summaries(*a.candidate);
    } else {
        PipelineConfig ccfg = cfg;
        ccfg.output_dir = cfg.output_dir / "candidate";
        cand_all = analyze_to_summaries(load_manifest(*a.candidate), ccfg, a.candidate_sources);
    }

    const std::vector<StrideSummary> truth = filter(truth_all, truth_source);
    std::vector<std::string> candidates = a.candidate_sources;
    if (candidates.empty()) {
        for (const std::string& s : sources_in(cand_all)) {
            if (s != truth_source || a.candidate) {
                candidates.push_back(s);
            }
        }
    }
    if (candidates.empty()) {
        throw ValidationError("no candidate source to compare against '" + truth_source + "'");
    }

    json index = json::array();
    for (const std::string& src : candidates) {
        const ErrorReport r = compare(filter(cand_all, src), truth);
        const std::filesystem::path dir = cfg.output_dir / "compare" / src;
        if (cfg.write_json) {
            write_text_file(dir / "report.json", r.to_json() + "\n");
        }
        if (cfg.write_csv) {
            std::ostringstream joints;
            write_joint_errors_csv(joints, r);
            write_text_file(dir / "joints.csv", joints.str());
        }
        std::ostringstream cells, curves;
        write_error_cells_csv(cells, r);
        write_subject_curves_csv(curves, r);
        write_text_file(dir / "cells.csv", cells.str());
        write_text_file(dir / "subject_curves.csv", curves.str());
        write_text_file(dir / "mean_curves.svg", svg::mean_curves(r));
        write_text_file(dir / "subject_errors.svg", svg::subject_error_curves(r));
        print_joint_table(std::cout, r);
        index.push_back({{"candidate", src}, {"truth", truth_source}, {"directory", (std::filesystem::path("compare") / src).string()}});
    }
    write_text_file(cfg.output_dir / "compare" / "index.json", index.dump(2) + "\n");
    return 0;
}

int run_stats(const StatsArgs& a) {
    PipelineConfig cfg = a.flags.resolve();
    std::vector<ScreenedAnova> analyses;
    if (a.table) {
        std::ifstream in(a.input);
        if (!in) {
            throw IoError("cannot open table " + a.input);
        }
        const stats::LongTable t = stats::read_long_table(in);
        const stats::DesignSpec spec{a.between, a.unit, a.within, a.value};
        analyses.push_back(screened_anova(std::filesystem::path(a.input).stem().string(), stats::design_from_table(t, spec)));
    } else {
        std::vector<StrideSummary> all;
        std::string truth;
        if (is_csv(a.input)) {
            all = load_summaries(a.input);
            truth = a.truth_source.value_or("manual");
        } else {
            const Manifest m = load_manifest(a.input);
            truth = truth_of(m, a.truth_source, a.input);
            all = analyze_to_summaries(m, cfg, {});
        }
        analyses = study_anovas(all, truth);
    }

    json index = json::array();
    const std::filesystem::path dir = cfg.output_dir / "stats";
    for (const ScreenedAnova& s : analyses) {
        std::ostringstream text;
        s.write_text(text);
        std::cout << text.str() << '\n';
        write_text_file(dir / (s.name + ".txt"), text.str());
        if (cfg.write_json) {
            write_text_file(dir / (s.name + ".json"), s.to_json() + "\n");
        }
        if (cfg.write_csv) {
            std::ostringstream csv;
            stats::write_anova_csv(csv, s.table);
            write_text_file(dir / (s.name + ".csv"), csv.str());
        }
        index.push_back(s.name);
    }
    write_text_file(dir / "index.json", index.dump(2) + "\n");
    return 0;
}

int run_simulate(const SimulateFlags& a) {
    const SimulationSpec spec = a.resolve();
    const Manifest m = write_simulated_dataset(spec, a.out);
    std::cout << "wrote " << m.sprints.size() << " sprints (" << spec.subjects << " subjects x " << spec.sprints
              << ") with sources manual";
    for (const std::string& s : spec.sources) {
        std::cout << ", " << s;
    }
    std::cout << " to " << (std::filesystem::path(a.out) / "manifest.json").string() << '\n';
    return 0;
}

} // namespace strideflex::cli
