#include "strideflex/simulation.hpp"

#include "strideflex/error.hpp"
#include "strideflex/keypoint_io.hpp"
#include "strideflex/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace strideflex {
namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

template <typename T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key)) {
        field = j.at(key).get<T>();
    }
}

void take_curve(const json& j, const char* key, FourierCurve& c) {
    if (!j.contains(key)) {
        return;
    }
    const json& cj = j.at(key);
    take(cj, "mean", c.mean);
    if (cj.contains("cos")) {
        const auto v = cj.at("cos").get<std::vector<double>>();
        if (v.size() > 4) {
            throw ValidationError(std::string("simulation spec: '") + key + "' has more than 4 cosine harmonics");
        }
        c.cos_coef.fill(0.0);
        std::copy(v.begin(), v.end(), c.cos_coef.begin());
    }
    if (cj.contains("sin")) {
        const auto v = cj.at("sin").get<std::vector<double>>();
        if (v.size() > 4) {
            throw ValidationError(std::string("simulation spec: '") + key + "' has more than 4 sine harmonics");
        }
        c.sin_coef.fill(0.0);
        std::copy(v.begin(), v.end(), c.sin_coef.begin());
    }
}

const char* kind_name(InjectedKind k) {
    switch (k) {
    case InjectedKind::lost:
        return "lost";
    case InjectedKind::swapped:
        return "swapped";
    case InjectedKind::misallocated:
        return "misallocated";
    }
    return "lost";
}

} // namespace

void SimulationSpec::validate() const {
    if (subjects < 2 || sprints < 1) {
        throw ValidationError("simulation spec: need at least 2 subjects and 1 sprint");
    }
    if (strides && !(*strides > 0.0)) {
        throw ValidationError("simulation spec: strides must be positive");
    }
    if (sources.empty()) {
        throw ValidationError("simulation spec: at least one tracker source is needed");
    }
    for (const std::string& s : sources) {
        if (s.empty() || s == "manual" || std::count(sources.begin(), sources.end(), s) > 1) {
            throw ValidationError("simulation spec: source names must be unique, non-empty and not 'manual'");
        }
    }
    noise.validate();
    if (!seeded_models) {
        model.validate();
    }
}

SimulationSpec parse_simulation_spec(const std::string& json_text, SimulationSpec spec) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("simulation spec is not valid JSON: ") + e.what());
    }
    try {
        take(j, "subjects", spec.subjects);
        take(j, "sprints", spec.sprints);
        take(j, "seed", spec.seed);
        take(j, "seeded_models", spec.seeded_models);
        take(j, "sources", spec.sources);
        take(j, "right_to_left", spec.right_to_left);
        if (j.contains("strides")) {
            spec.strides = j.at("strides").is_null() ? std::nullopt : std::optional(j.at("strides").get<double>());
        }
        if (j.contains("model")) {
            const json& m = j.at("model");
            GaitModel& g = spec.model;
            take(m, "stride_hz", g.stride_hz);
            take(m, "trunk_length", g.trunk_length);
            take(m, "thigh_length", g.thigh_length);
            take(m, "shank_length", g.shank_length);
            take(m, "forward_speed", g.forward_speed);
            take(m, "hip_height", g.hip_height);
            take(m, "vertical_oscillation", g.vertical_oscillation);
            take(m, "start_x", g.start_x);
            take(m, "start_phase", g.start_phase);
            take(m, "fps", g.fps);
            take(m, "duration_s", g.duration_s);
            take_curve(m, "trunk", g.trunk);
            take_curve(m, "hip", g.hip);
            take_curve(m, "knee", g.knee);
        }
        if (j.contains("noise")) {
            const json& n = j.at("noise");
            NoiseSpec& s = spec.noise;
            if (n.contains("loss_rate")) {
                s.set_loss_rate(n.at("loss_rate").get<double>());
            }
            take(n, "random_swaps_per_pair", s.random_swaps_per_pair);
            take(n, "random_swap_length", s.random_swap_length);
            take(n, "misallocation_rate", s.misallocation_rate);
            take(n, "displacement_min", s.displacement_min);
            take(n, "displacement_max", s.displacement_max);
            take(n, "jitter_sd", s.jitter_sd);
            if (n.contains("swap_windows")) {
                s.swap_windows.clear();
                for (const json& w : n.at("swap_windows")) {
                    const std::string seg = w.at("segment").get<std::string>();
                    const auto it = std::find_if(kAllSegments.begin(), kAllSegments.end(),
                                                 [&](Segment g) { return name_of(g) == seg; });
                    if (it == kAllSegments.end()) {
                        throw ValidationError("simulation spec: unknown segment '" + seg + "'");
                    }
                    s.swap_windows.push_back({*it, w.at("first").get<std::size_t>(), w.at("last").get<std::size_t>()});
                }
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("simulation spec has a field of the wrong type: ") + e.what());
    }
    spec.validate();
    return spec;
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path, SimulationSpec base) {
    return parse_simulation_spec(read_text_file(path), std::move(base));
}

std::string subject_id(std::size_t subject) { return "S" + std::to_string(subject + 1); }

std::string sprint_id(std::size_t sprint) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", sprint + 1);
    return buf;
}

GaitModel sprint_model(const SimulationSpec& spec, std::size_t subject, std::size_t sprint) {
    GaitModel m = spec.model;
    if (spec.seeded_models) {
        GaitModel seeded = seeded_gait_model(mix(mix(spec.seed, subject), sprint));
        seeded.fps = m.fps;
        seeded.start_phase = m.start_phase;
        seeded.start_x = m.start_x;
        seeded.duration_s = m.duration_s;
        m = seeded;
    }
    if (spec.strides) {
        m.duration_s = *spec.strides / m.stride_hz;
    }
    return m;
}

NoiseSpec sprint_noise(const SimulationSpec& spec, std::size_t subject, std::size_t sprint, std::size_t source) {
    NoiseSpec n = spec.noise;
    n.seed = mix(mix(mix(spec.seed ^ 0x5eedull, subject), sprint), source);
    return n;
}

std::string injection_log_to_json(const InjectionLog& log) {
    json j;
    j["swaps"] = json::array();
    for (const InjectedSwap& w : log.swaps) {
        j["swaps"].push_back({{"segment", std::string(name_of(w.segment))}, {"first", w.first}, {"last", w.last}});
    }
    j["events"] = json::array();
    for (const InjectedEvent& e : log.events) {
        json ev = {{"frame", e.frame}, {"joint", std::string(name_of(e.joint))}, {"kind", kind_name(e.kind)}};
        if (e.kind == InjectedKind::misallocated) {
            ev["dx"] = e.displacement.x;
            ev["dy"] = e.displacement.y;
        }
        j["events"].push_back(ev);
    }
    return j.dump(1);
}

Manifest write_simulated_dataset(const SimulationSpec& spec, const std::filesystem::path& dir) {
    spec.validate();
    Manifest manifest;
    for (std::size_t s = 0; s < spec.subjects; ++s) {
        for (std::size_t k = 0; k < spec.sprints; ++k) {
            const GaitModel model = sprint_model(spec, s, k);
            CaptureMeta meta;
            meta.subject_id = subject_id(s);
            meta.sprint_id = sprint_id(k);
            meta.source = "manual";
            const GeneratedSprint g = generate(model, meta);

            const std::filesystem::path rel = std::filesystem::path(meta.subject_id) / meta.sprint_id;
            const std::filesystem::path sd = dir / rel;
            save_keypoint_csv(sd / "manual.csv", to_image_coordinates(g.trajectory, spec.right_to_left));
            {
                std::ostringstream os;
                write_angle_csv(os, g.truth);
                write_text_file(sd / "truth_angles.csv", os.str());
            }
            json strikes;
            for (Side side : kBothSides) {
                strikes[std::string(name_of(side))] = g.strikes[side];
            }
            strikes["fps"] = model.fps;
            strikes["stride_hz"] = model.stride_hz;
            write_text_file(sd / "truth_strikes.json", strikes.dump(2) + "\n");

            ManifestSprint ms;
            ms.subject_id = meta.subject_id;
            ms.sprint_id = meta.sprint_id;
            ms.fps = model.fps;
            ms.image_width = meta.image_width;
            ms.image_height = meta.image_height;
            ms.notes = "synthetic; model seed " + std::to_string(model.seed);
            ms.sources.push_back({"manual", sd / "manual.csv", true});
            for (std::size_t i = 0; i < spec.sources.size(); ++i) {
                const NoisyTrajectory noisy = inject_noise(g.trajectory, sprint_noise(spec, s, k, i));
                const std::string file = spec.sources[i] + ".csv";
                save_keypoint_csv(sd / file, to_image_coordinates(noisy.trajectory, spec.right_to_left));
                write_text_file(sd / ("injected_" + spec.sources[i] + ".json"), injection_log_to_json(noisy.log) + "\n");
                ms.sources.push_back({spec.sources[i], sd / file, false});
            }
            manifest.sprints.push_back(std::move(ms));
        }
    }
    save_manifest(dir / "manifest.json", manifest);
    return manifest;
}

} // namespace strideflex
