#include "strideflex/pipeline.hpp"

#include "strideflex/error.hpp"
#include "strideflex/keypoint_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace strideflex {
namespace {

using nlohmann::json;

std::string context(const CaptureMeta& m) {
    return "subject " + m.subject_id + ", sprint " + m.sprint_id + " (" + m.source + ")";
}

// Keeps ids usable as directory names.
std::string path_safe(const std::string& s) {
    std::string out = s.empty() ? std::string("_") : s;
    for (char& c : out) {
        if (c == '/' || c == '\\' || c == ':' || c == ' ') {
            c = '_';
        }
    }
    if (out == "." || out == "..") {
        out = "_";
    }
    return out;
}

template <typename T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key)) {
        field = j.at(key).get<T>();
    }
}

void take_optional(const json& j, const char* key, std::optional<double>& field) {
    if (j.contains(key)) {
        if (j.at(key).is_null()) {
            field.reset();
        } else {
            field = j.at(key).get<double>();
        }
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
            throw ValidationError(where + ": unknown key '" + k + "'");
        }
    }
}

} // namespace

void PipelineConfig::validate() const {
    cleaning.validate();
    events.validate();
    if (stride_count == 0) {
        throw ValidationError("pipeline config: stride_count must be at least 1");
    }
    if (!(min_conf >= 0.0 && min_conf <= 1.0)) {
        throw ValidationError("pipeline config: min_conf must lie in [0, 1]");
    }
    if (jobs == 0) {
        throw ValidationError("pipeline config: jobs must be at least 1");
    }
    if (decimals < 0 || decimals > 17) {
        throw ValidationError("pipeline config: decimals must lie in [0, 17]");
    }
    if (!write_json && !write_csv) {
        throw ValidationError("pipeline config: at least one of the json and csv formats is needed");
    }
}

PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig cfg) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ValidationError("config must be a JSON object");
    }
    try {
        reject_unknown(j,
                       {"cleaning", "events", "selection", "stride_count", "min_conf", "output_dir", "formats",
                        "clean_manual", "jobs", "decimals"},
                       "config");
        if (j.contains("cleaning")) {
            const json& c = j.at("cleaning");
            reject_unknown(c,
                           {"svr_epsilon", "svr_c", "kernel_bandwidth", "outlier_k", "swap_window", "min_coverage",
                            "min_samples"},
                           "config.cleaning");
            take_optional(c, "svr_epsilon", cfg.cleaning.svr_epsilon);
            take_optional(c, "svr_c", cfg.cleaning.svr_c);
            take_optional(c, "kernel_bandwidth", cfg.cleaning.kernel_bandwidth);
            take(c, "outlier_k", cfg.cleaning.outlier_k);
            take(c, "swap_window", cfg.cleaning.swap_window);
            take(c, "min_coverage", cfg.cleaning.min_coverage);
            take(c, "min_samples", cfg.cleaning.min_samples);
        }
        if (j.contains("events")) {
            const json& e = j.at("events");
            reject_unknown(e, {"window_s", "gate_s", "velocity_ratio", "min_stride_s", "max_stride_s"},
                           "config.events");
            take(e, "window_s", cfg.events.window_s);
            take(e, "gate_s", cfg.events.gate_s);
            take(e, "velocity_ratio", cfg.events.velocity_ratio);
            take(e, "min_stride_s", cfg.events.min_stride_s);
            take(e, "max_stride_s", cfg.events.max_stride_s);
        }
        if (j.contains("selection")) {
            cfg.selection = stride_selection_from_name(j.at("selection").get<std::string>());
        }
        take(j, "stride_count", cfg.stride_count);
        take(j, "min_conf", cfg.min_conf);
        if (j.contains("output_dir")) {
            cfg.output_dir = j.at("output_dir").get<std::string>();
        }
        if (j.contains("formats")) {
            cfg.write_json = cfg.write_csv = false;
            for (const std::string& f : j.at("formats").get<std::vector<std::string>>()) {
                if (f == "json") {
                    cfg.write_json = true;
                } else if (f == "csv") {
                    cfg.write_csv = true;
                } else {
                    throw ValidationError("config: unknown format '" + f + "' (json, csv)");
                }
            }
        }
        take(j, "clean_manual", cfg.clean_manual);
        take(j, "jobs", cfg.jobs);
        take(j, "decimals", cfg.decimals);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config has a field of the wrong type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path, PipelineConfig base) {
    return parse_pipeline_config(read_text_file(path), std::move(base));
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json formats = json::array();
    if (cfg.write_json) {
        formats.push_back("json");
    }
    if (cfg.write_csv) {
        formats.push_back("csv");
    }
    const json j = {
        {"cleaning",
         {{"svr_epsilon", opt(cfg.cleaning.svr_epsilon)},
          {"svr_c", opt(cfg.cleaning.svr_c)},
          {"kernel_bandwidth", opt(cfg.cleaning.kernel_bandwidth)},
          {"outlier_k", cfg.cleaning.outlier_k},
          {"swap_window", cfg.cleaning.swap_window},
          {"min_coverage", cfg.cleaning.min_coverage},
          {"min_samples", cfg.cleaning.min_samples}}},
        {"events",
         {{"window_s", cfg.events.window_s},
          {"gate_s", cfg.events.gate_s},
          {"velocity_ratio", cfg.events.velocity_ratio},
          {"min_stride_s", cfg.events.min_stride_s},
          {"max_stride_s", cfg.events.max_stride_s}}},
        {"selection", std::string(name_of(cfg.selection))},
        {"stride_count", cfg.stride_count},
        {"min_conf", cfg.min_conf},
        {"output_dir", cfg.output_dir.string()},
        {"formats", formats},
        {"clean_manual", cfg.clean_manual},
        {"jobs", cfg.jobs},
        {"decimals", cfg.decimals},
    };
    return j.dump(2);
}

SprintResult analyze_trajectory(const TrajectorySet& raw, const PipelineConfig& cfg) {
    cfg.validate();
    const CaptureMeta& meta = raw.meta();
    try {
        const MaskResult masked = mask_low_confidence(raw, cfg.min_conf);
        const TrajectorySet canonical = canonicalize(masked.trajectory);
        const bool do_clean = cfg.clean_manual || meta.source != "manual";

        SprintResult r{meta, do_clean, masked.masked, canonical, std::nullopt, {}, {}, {}};
        if (do_clean) {
            CleanResult c = clean(canonical, cfg.cleaning);
            r.trajectory = std::move(c.trajectory);
            r.report = std::move(c.report);
        } else if (canonical.missing_count() > 0) {
            throw ValidationError("manual labels have " + std::to_string(canonical.missing_count()) +
                                  " missing or low-confidence samples; pass --clean-manual to fill them");
        }
        r.angles = compute_angles(r.trajectory);
        r.strikes = detect_foot_strikes(r.trajectory, cfg.events);
        for (Side s : kBothSides) {
            const auto segments = segment_strides(r.strikes[s], s, r.angles);
            StrideSummary sum = summarize_strides(segments, cfg.selection, cfg.stride_count);
            sum.key = {meta.subject_id, meta.sprint_id, s};
            sum.source = meta.source;
            r.summaries[static_cast<std::size_t>(s)] = std::move(sum);
        }
        return r;
    } catch (const ValidationError& e) {
        throw ValidationError(context(meta) + ": " + e.what());
    }
}

SprintResult analyze_source(const ManifestSprint& sprint, const ManifestSource& source, const PipelineConfig& cfg) {
    const TrajectorySet raw = load_keypoint_csv(source.csv, sprint.meta_for(source));
    return analyze_trajectory(raw, cfg);
}

std::vector<SprintResult> analyze_manifest(const Manifest& m, const PipelineConfig& cfg,
                                           const std::vector<std::string>& sources) {
    cfg.validate();
    struct Job {
        const ManifestSprint* sprint;
        const ManifestSource* source;
    };
    std::vector<Job> jobs;
    for (const ManifestSprint& sp : m.sprints) {
        for (const ManifestSource& src : sp.sources) {
            if (sources.empty() || std::find(sources.begin(), sources.end(), src.source) != sources.end()) {
                jobs.push_back({&sp, &src});
            }
        }
    }
    for (const Job& j : jobs) {
        if (!std::filesystem::exists(j.source->csv)) {
            throw IoError("keypoint file not found: " + j.source->csv.string());
        }
    }

    std::vector<std::optional<SprintResult>> slots(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                slots[i] = analyze_source(*jobs[i].sprint, *jobs[i].source, cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(cfg.jobs, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<SprintResult> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

std::filesystem::path sprint_directory(const PipelineConfig& cfg, const CaptureMeta& meta) {
    return cfg.output_dir / path_safe(meta.subject_id) / path_safe(meta.sprint_id) / path_safe(meta.source);
}

void write_sprint_outputs(const SprintResult& r, const PipelineConfig& cfg) {
    const std::filesystem::path dir = sprint_directory(cfg, r.meta);
    {
        std::ostringstream os;
        write_angle_csv(os, r.angles, cfg.decimals);
        write_text_file(dir / "angles.csv", os.str());
    }
    save_keypoint_csv(dir / "keypoints_clean.csv", r.trajectory);
    json strikes;
    for (Side s : kBothSides) {
        strikes[std::string(name_of(s))] = r.strikes[s];
    }
    strikes["fps"] = r.angles.fps;
    write_text_file(dir / "strikes.json", strikes.dump(2) + "\n");
    if (r.report) {
        write_text_file(dir / "cleaning.json", r.report->to_json() + "\n");
    } else {
        std::error_code ec;
        std::filesystem::remove(dir / "cleaning.json", ec);
    }
    for (Side s : kBothSides) {
        const StrideSummary& sum = r.summaries[static_cast<std::size_t>(s)];
        const std::string stem = "summary_" + std::string(name_of(s));
        if (cfg.write_json) {
            write_text_file(dir / (stem + ".json"), sum.to_json() + "\n");
        }
        if (cfg.write_csv) {
            std::ostringstream os;
            write_stride_csv(os, sum, cfg.decimals);
            write_text_file(dir / (stem + ".csv"), os.str());
        }
    }
}

void write_summaries_csv(std::ostream& out, const std::vector<SprintResult>& results, int decimals) {
    out << "subject,sprint,source,side,channel,percent,value\n" << std::fixed << std::setprecision(decimals);
    for (const SprintResult& r : results) {
        for (const StrideSummary& s : r.summaries) {
            for (Channel c : kAllChannels) {
                for (std::size_t k = 0; k < kGridPoints; ++k) {
                    out << s.key.subject_id << ',' << s.key.sprint_id << ',' << s.source << ',' << name_of(s.key.side)
                        << ',' << name_of(c) << ',' << k * 10 << ',' << s.mean[static_cast<std::size_t>(c)][k] << '\n';
                }
            }
        }
    }
    out.unsetf(std::ios::floatfield);
}

std::vector<StrideSummary> read_summaries_csv(std::istream& in) {
    const stats::LongTable t = stats::read_long_table(in);
    const std::size_t cs = t.column("subject"), cp = t.column("sprint"), co = t.column("source"),
                      cd = t.column("side"), cc = t.column("channel"), cg = t.column("percent"),
                      cv = t.column("value");
    std::map<std::pair<std::string, SummaryKey>, std::size_t> where;
    std::vector<StrideSummary> out;
    std::vector<std::array<std::array<bool, kGridPoints>, 3>> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        const std::string line = "summaries line " + std::to_string(i + 2);
        Side side;
        if (row[cd] == "left") {
            side = Side::left;
        } else if (row[cd] == "right") {
            side = Side::right;
        } else {
            throw ValidationError(line + ": unknown side '" + row[cd] + "'");
        }
        const auto ch = std::find_if(kAllChannels.begin(), kAllChannels.end(),
                                     [&](Channel c) { return name_of(c) == row[cc]; });
        if (ch == kAllChannels.end()) {
            throw ValidationError(line + ": unknown channel '" + row[cc] + "'");
        }
        std::size_t pct = 0, used = 0;
        double value = 0.0;
        try {
            pct = std::stoul(row[cg], &used);
            if (used != row[cg].size() || pct % 10 != 0 || pct > 100) {
                throw std::invalid_argument("percent");
            }
            value = std::stod(row[cv], &used);
            if (used != row[cv].size()) {
                throw std::invalid_argument("value");
            }
        } catch (const std::exception&) {
            throw ValidationError(line + ": bad percent or value");
        }
        const SummaryKey key{row[cs], row[cp], side};
        auto [it, inserted] = where.emplace(std::make_pair(row[co], key), out.size());
        if (inserted) {
            StrideSummary s;
            s.key = key;
            s.source = row[co];
            out.push_back(s);
            seen.emplace_back();
        }
        const std::size_t k = pct / 10;
        const auto c = static_cast<std::size_t>(*ch);
        if (seen[it->second][c][k]) {
            throw ValidationError(line + ": duplicate grid point");
        }
        seen[it->second][c][k] = true;
        out[it->second].mean[c][k] = value;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (const auto& ch : seen[i]) {
            if (std::find(ch.begin(), ch.end(), false) != ch.end()) {
                throw ValidationError("summaries: incomplete grid for subject " + out[i].key.subject_id +
                                      ", sprint " + out[i].key.sprint_id + " (" + out[i].source + ")");
            }
        }
    }
    return out;
}

std::vector<StrideSummary> summaries_of(const std::vector<SprintResult>& results, const std::string& source) {
    std::vector<StrideSummary> out;
    for (const SprintResult& r : results) {
        if (r.meta.source == source) {
            out.insert(out.end(), r.summaries.begin(), r.summaries.end());
        }
    }
    return out;
}

stats::LongTable angle_table(std::span<const StrideSummary> summaries, Channel c, Side s) {
    stats::LongTable t;
    t.columns = {"subject", "sprint", "method", "time", "value"};
    std::ostringstream os;
    os << std::setprecision(17);
    for (const StrideSummary& sum : summaries) {
        if (sum.key.side != s) {
            continue;
        }
        for (std::size_t b = 0; b < kErrorBins; ++b) {
            os.str("");
            os << sum.mean[static_cast<std::size_t>(c)][b];
            t.rows.push_back({sum.key.subject_id, sum.key.sprint_id, sum.source, std::to_string(b * 10), os.str()});
        }
    }
    return t;
}

stats::LongTable error_table(std::span<const ErrorReport> reports, Channel c, Side s) {
    stats::LongTable t;
    t.columns = {"subject", "sprint", "method", "time", "value"};
    std::ostringstream os;
    os << std::setprecision(17);
    for (const ErrorReport& r : reports) {
        for (const ErrorCell& cell : r.cells) {
            if (cell.channel != c || cell.key.side != s) {
                continue;
            }
            os.str("");
            os << cell.abs_error;
            t.rows.push_back(
                {cell.key.subject_id, cell.key.sprint_id, r.candidate_source, std::to_string(cell.bin * 10), os.str()});
        }
    }
    return t;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out.flush()) {
        throw IoError("write failed for " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace strideflex
