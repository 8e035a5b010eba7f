#include "options.hpp"

namespace strideflex::cli {
namespace {

template <typename T>
void apply(const std::optional<T>& flag, T& field) {
    if (flag) {
        field = *flag;
    }
}

} // namespace

void PipelineFlags::attach(CLI::App& app) {
    app.add_option("--config", config, "JSON pipeline config; flags override its fields");
    app.add_option("--out", out, "output directory");
    app.add_option("--format", format, "report format written next to the text output")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", jobs, "sprints processed concurrently")->check(CLI::PositiveNumber);
    app.add_option("--min-conf", min_conf, "samples below this tracker confidence count as lost")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--selection", selection, "which strides to average")
        ->check(CLI::IsMember({"central", "first", "last"}));
    app.add_option("--stride-count", stride_count, "strides averaged per limb")->check(CLI::PositiveNumber);
    app.add_option("--decimals", decimals, "digits after the point in CSV output");
    app.add_flag("--clean-manual", clean_manual, "also post-process the manual labels");

    auto* c = "Cleaning";
    app.add_option("--svr-epsilon", svr_epsilon, "SVR tube half-width in pixels; default 0.5% of the series range")->group(c);
    app.add_option("--svr-c", svr_c, "SVR box constraint")->group(c);
    app.add_option("--kernel-bandwidth", kernel_bandwidth, "RBF bandwidth in frames")->group(c);
    app.add_option("--outlier-k", outlier_k, "outlier threshold in robust residual scales")->group(c);
    app.add_option("--swap-window", swap_window, "shortest left/right confusion run, frames")->group(c);
    app.add_option("--min-coverage", min_coverage, "least fraction of present samples per joint")->group(c);
    app.add_option("--min-samples", min_samples, "least present samples to fit a joint")->group(c);

    auto* e = "Gait events";
    app.add_option("--window-s", window_s, "ankle-height minimum search window, s")->group(e);
    app.add_option("--gate-s", gate_s, "stance velocity gate horizon, s")->group(e);
    app.add_option("--velocity-ratio", velocity_ratio, "stance ankle speed limit as a fraction of hip speed")
        ->group(e);
    app.add_option("--min-stride-s", min_stride_s, "shortest accepted stride, s")->group(e);
    app.add_option("--max-stride-s", max_stride_s, "longest accepted stride, s")->group(e);
}

PipelineConfig PipelineFlags::resolve() const {
    PipelineConfig cfg;
    if (!config.empty()) {
        cfg = load_pipeline_config(config);
    }
    if (out) {
        cfg.output_dir = *out;
    }
    if (format) {
        cfg.write_json = *format == "json";
        cfg.write_csv = *format == "csv";
    }
    apply(jobs, cfg.jobs);
    apply(min_conf, cfg.min_conf);
    if (selection) {
        cfg.selection = stride_selection_from_name(*selection);
    }
    apply(stride_count, cfg.stride_count);
    apply(decimals, cfg.decimals);
    cfg.clean_manual = cfg.clean_manual || clean_manual;

    if (svr_epsilon) {
        cfg.cleaning.svr_epsilon = svr_epsilon;
    }
    if (svr_c) {
        cfg.cleaning.svr_c = svr_c;
    }
    if (kernel_bandwidth) {
        cfg.cleaning.kernel_bandwidth = kernel_bandwidth;
    }
    apply(outlier_k, cfg.cleaning.outlier_k);
    apply(swap_window, cfg.cleaning.swap_window);
    apply(min_coverage, cfg.cleaning.min_coverage);
    apply(min_samples, cfg.cleaning.min_samples);

    apply(window_s, cfg.events.window_s);
    apply(gate_s, cfg.events.gate_s);
    apply(velocity_ratio, cfg.events.velocity_ratio);
    apply(min_stride_s, cfg.events.min_stride_s);
    apply(max_stride_s, cfg.events.max_stride_s);
    cfg.validate();
    return cfg;
}

void SimulateFlags::attach(CLI::App& app) {
    app.add_option("--config", config, "JSON simulation spec (model, noise, study size)")
        ;
    app.add_option("--out", out, "dataset directory")->capture_default_str();
    app.add_option("--seed", seed, "base seed of models and noise");
    app.add_option("--subjects", subjects, "number of subjects");
    app.add_option("--sprints", sprints, "sprints per subject");
    app.add_option("--strides", strides, "recording length in strides");
    app.add_option("--fps", fps, "frame rate");
    app.add_option("--sources", sources, "names of the noisy tracker copies")->delimiter(',');
    app.add_option("--loss-rate", loss_rate, "per-sample loss probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--swaps-per-pair", swaps_per_pair, "left/right swap windows per joint pair");
    app.add_option("--swap-length", swap_length, "frames per injected swap window");
    app.add_option("--misallocation-rate", misallocation_rate, "per-sample displacement probability")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--jitter-sd", jitter_sd, "Gaussian position jitter, pixels");
    app.add_flag("--fixed-model", fixed_model, "use the default model for every sprint");
    app.add_flag("--right-to-left", right_to_left, "record the runner moving toward -x in the image");
}

SimulationSpec SimulateFlags::resolve() const {
    SimulationSpec spec;
    spec.strides = 5.0;
    if (!config.empty()) {
        spec = load_simulation_spec(config, spec);
    }
    apply(seed, spec.seed);
    apply(subjects, spec.subjects);
    apply(sprints, spec.sprints);
    if (strides) {
        spec.strides = strides;
    }
    apply(fps, spec.model.fps);
    if (!sources.empty()) {
        spec.sources = sources;
    }
    if (loss_rate) {
        spec.noise.set_loss_rate(*loss_rate);
    }
    apply(swaps_per_pair, spec.noise.random_swaps_per_pair);
    apply(swap_length, spec.noise.random_swap_length);
    apply(misallocation_rate, spec.noise.misallocation_rate);
    apply(jitter_sd, spec.noise.jitter_sd);
    spec.seeded_models = spec.seeded_models && !fixed_model;
    spec.right_to_left = spec.right_to_left || right_to_left;
    spec.validate();
    return spec;
}

} // namespace strideflex::cli
