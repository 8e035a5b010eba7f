#include "commands.hpp"

#include "strideflex/error.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace strideflex::cli;

    CLI::App app{"strideflex: sprint kinematics from 2D keypoints"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* a = app.add_subcommand("analyze", "clean keypoints, compute angles, detect strikes, summarize strides");
    a->add_option("manifest", analyze.manifest, "sprint manifest (JSON)")->required();
    a->add_option("--source", analyze.sources, "restrict to these sources")->delimiter(',');
    analyze.flags.attach(*a);

    CompareArgs compare;
    auto* c = app.add_subcommand("compare", "angle errors of tracker sources against the ground truth");
    c->add_option("truth", compare.truth, "truth manifest (JSON) or summaries.csv")->required();
    c->add_option("--candidate", compare.candidate, "candidate manifest or summaries.csv; defaults to the truth input");
    c->add_option("--truth-source", compare.truth_source, "ground-truth source name");
    c->add_option("--candidate-source", compare.candidate_sources, "candidate sources to compare")->delimiter(',');
    compare.flags.attach(*c);

    StatsArgs st;
    auto* s = app.add_subcommand("stats", "repeated-measures ANOVAs with Levene and Shapiro-Wilk screens");
    s->add_option("input", st.input, "manifest, summaries.csv, or a long table with --table")->required();
    s->add_flag("--table", st.table, "input is a long table; use --between/--unit/--within/--value");
    s->add_option("--truth-source", st.truth_source, "ground-truth source name");
    s->add_option("--between", st.between, "between-subjects factor column")->capture_default_str();
    s->add_option("--unit", st.unit, "replicate column nested in the between factor")->capture_default_str();
    s->add_option("--within", st.within, "within factor columns")->delimiter(',')->capture_default_str();
    s->add_option("--value", st.value, "observation column")->capture_default_str();
    st.flags.attach(*s);

    SimulateFlags sim;
    auto* m = app.add_subcommand("simulate", "write a synthetic study with noisy tracker copies");
    sim.attach(*m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*a) {
            return run_analyze(analyze);
        }
        if (*c) {
            return run_compare(compare);
        }
        if (*s) {
            return run_stats(st);
        }
        return run_simulate(sim);
    } catch (const strideflex::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const strideflex::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
