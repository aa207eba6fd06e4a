// Command-line front end: analyze, fit, simulate, synth, report.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gesturedyn/gesturedyn.hpp"

namespace gd = gesturedyn;
namespace fs = std::filesystem;

namespace {

struct PipelineFlags {
    std::vector<std::string> inputs;
    std::string format = "auto";
    std::optional<double> fs;
    std::optional<std::string> metadata;
    double threshold = 0.2;
    double cutoff_hz = 20.0;
    std::optional<double> accel_cutoff_hz;
    int order = 5;
    std::string smoothing = "gcv";
    int robust_iterations = 3;
    std::vector<std::string> group_by{"language", "vowel"};
    double lambda_cap = 150.0;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    std::string out = "out";
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("inputs", f.inputs, "Recording files or directories of *.csv")->required();
    cmd->add_option("--format", f.format, "Input format: auto, aperture or sensor")
        ->check(CLI::IsMember({"auto", "aperture", "sensor"}));
    cmd->add_option("--fs", f.fs, "Sampling rate override in Hz");
    cmd->add_option("--metadata", f.metadata, "Sidecar metadata table keyed by id")->check(CLI::ExistingFile);
    cmd->add_option("--threshold", f.threshold, "Segmentation threshold as a fraction of peak speed");
    cmd->add_option("--cutoff-hz", f.cutoff_hz, "Lowpass cutoff for velocity in Hz");
    cmd->add_option("--accel-cutoff-hz", f.accel_cutoff_hz, "Lowpass cutoff for acceleration (default: --cutoff-hz)");
    cmd->add_option("--filter-order", f.order, "Butterworth order");
    cmd->add_option("--smoothing", f.smoothing, "Smoothing strength, or 'gcv' to select it");
    cmd->add_option("--robust-iterations", f.robust_iterations, "Bisquare reweighting passes");
    cmd->add_option("--group-by", f.group_by, "Metadata keys grouping the rapidity/target correlation");
    cmd->add_option("--lambda-plot-cap", f.lambda_cap, "Drop tokens with larger initial lambda from lambda bands");
    cmd->add_option("--jobs", f.jobs, "Worker threads");
    cmd->add_option("--seed", f.seed, "Seed echoed into the summary; the analysis draws no random numbers");
    cmd->add_option("--out", f.out, "Output directory");
}

gd::RunConfig make_run_config(const PipelineFlags& f, bool simulate) {
    gd::RunConfig cfg;
    cfg.threshold = f.threshold;
    cfg.filter.velocity_cutoff_hz = f.cutoff_hz;
    cfg.filter.acceleration_cutoff_hz = f.accel_cutoff_hz.value_or(f.cutoff_hz);
    cfg.filter.order = f.order;
    if (f.robust_iterations < 0) gd::detail::fail("robust iterations must be >= 0");
    cfg.smoothing.robust_iterations = static_cast<std::size_t>(f.robust_iterations);
    if (f.smoothing != "gcv") {
        const auto s = gd::csv::parse_double(f.smoothing);
        if (!s || !(*s > 0.0)) gd::detail::fail("--smoothing must be a positive number or 'gcv'");
        cfg.smoothing.strength = *s;
    }
    cfg.simulate = simulate;
    cfg.jobs = f.jobs;
    cfg.group_by = f.group_by;
    cfg.lambda_plot_cap = f.lambda_cap;
    cfg.validate();
    return cfg;
}

// Worker count is left out so bundles are identical for any --jobs.
gd::ordered_json config_json(const PipelineFlags& f, const gd::RunConfig& cfg) {
    gd::ordered_json j;
    j["command"] = cfg.simulate ? "analyze" : "fit";
    j["format"] = f.format;
    j["fs_override"] = f.fs ? gd::ordered_json(*f.fs) : gd::ordered_json(nullptr);
    j["threshold"] = cfg.threshold;
    j["velocity_cutoff_hz"] = cfg.filter.velocity_cutoff_hz;
    j["acceleration_cutoff_hz"] = cfg.filter.acceleration_cutoff_hz;
    j["filter_order"] = cfg.filter.order;
    j["smoothing"] = f.smoothing;
    j["robust_iterations"] = cfg.smoothing.robust_iterations;
    j["fit_max_iterations"] = cfg.fit.max_iterations;
    j["fit_relative_tolerance"] = cfg.fit.relative_tolerance;
    j["lambda_plot_cap"] = cfg.lambda_plot_cap;
    j["seed"] = f.seed;
    return j;
}

int run_analysis(const PipelineFlags& f, bool simulate) {
    const gd::RunConfig cfg = make_run_config(f, simulate);
    const auto recs = gd::ingest_all(f.inputs, gd::parse_format(f.format), f.fs, f.metadata);
    gd::ReportBundle bundle;
    bundle.tokens = gd::run_pipeline(recs, cfg);
    bundle.group_by = cfg.group_by;
    bundle.lambda_plot_cap = cfg.lambda_plot_cap;
    bundle.config = config_json(f, cfg);
    gd::emit(bundle, f.out);
    std::size_t analyzed = 0;
    for (const auto& t : bundle.tokens) analyzed += t.analyzed() ? 1 : 0;
    std::cerr << "tokens: " << bundle.tokens.size() << ", analyzed: " << analyzed << ", report: " << f.out << '\n';
    return 0;
}

struct SimulateFlags {
    double target = 0.0, rapidity = 0.0, x0 = 0.0, v0 = 0.0;
    std::optional<double> stop;
    std::string method = "euler";
    double rk4_dt = 1e-3;
    double fs = 100.0;
    std::size_t max_steps = 10000;
    std::string out = "-";
};

int run_simulate(const SimulateFlags& f) {
    const gd::GestureParams p{f.target, f.rapidity};
    p.validate();
    gd::SimOptions opts;
    opts.max_steps = f.max_steps;
    opts.sample_interval = 1.0 / f.fs;
    const double stop = f.stop.value_or(std::abs(f.v0));
    const gd::Trajectory tr = f.method == "rk4" ? gd::simulate_rk4(f.x0, f.v0, p, f.rk4_dt, stop, opts)
                                                : gd::simulate_paper_euler(f.x0, f.v0, p, stop, opts);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < tr.size(); ++i)
        rows.push_back({std::to_string(i), gd::csv::fmt(static_cast<double>(i) / f.fs), gd::csv::fmt(tr.state()[i]),
                        gd::csv::fmt(tr.velocity()[i]), gd::csv::fmt(tr.acceleration()[i])});
    const std::vector<std::string> header{"sample", "t", "x", "v", "a"};
    if (f.out == "-") {
        std::cout << "sample,t,x,v,a\n";
        for (const auto& r : rows) std::cout << r[0] << ',' << r[1] << ',' << r[2] << ',' << r[3] << ',' << r[4] << '\n';
    } else {
        gd::csv::write_table(f.out, header, rows);
    }
    return 0;
}

struct SynthFlags {
    std::vector<double> rapidity{0.2, 0.36, 0.6};
    std::vector<double> displacement{4.0, 7.0, 10.0};
    std::vector<double> x0{30.0};
    std::vector<double> noise{0.05};
    std::size_t replicates = 5;
    std::uint64_t seed = 0;
    double fs = 100.0;
    double start_ratio = 1000.0;
    std::size_t jobs = 1;
    std::string out = "corpus";
};

int run_synth(const SynthFlags& f) {
    if (f.replicates < 1) gd::detail::fail("--replicates must be >= 1");
    gd::SweepGrid grid;
    grid.rapidity = f.rapidity;
    grid.displacement = f.displacement;
    grid.x0 = f.x0;
    grid.noise_sd = f.noise;
    grid.seeds.clear();
    for (std::size_t k = 0; k < f.replicates; ++k) grid.seeds.push_back(f.seed + k);
    grid.start_ratio = f.start_ratio;
    grid.base.fs = f.fs;
    std::vector<std::string> ids;
    const auto specs = gd::expand_grid(grid, &ids);
    const auto tokens = gd::sweep(grid, f.jobs);

    std::error_code ec;
    fs::create_directories(f.out, ec);
    if (ec) gd::detail::fail("cannot create " + f.out + ": " + ec.message());
    std::vector<std::vector<std::string>> meta, truth;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        gd::write_aperture((fs::path(f.out) / (ids[i] + ".csv")).string(), tokens[i].recording);
        const auto& s = specs[i];
        meta.push_back({ids[i], "synth", gd::format_g(s.params.rapidity), gd::format_g(s.x0 - s.params.target)});
        truth.push_back({ids[i], gd::csv::fmt(s.params.target), gd::csv::fmt(s.params.rapidity), gd::csv::fmt(s.x0),
                         gd::csv::fmt(s.v0), gd::csv::fmt(s.fs), gd::csv::fmt(s.noise_sd), std::to_string(s.seed)});
    }
    gd::csv::write_table((fs::path(f.out) / "metadata.csv").string(), {"id", "source", "rapidity", "displacement"},
                         meta);
    gd::csv::write_table((fs::path(f.out) / "truth.csv").string(),
                         {"id", "target", "rapidity", "x0", "v0", "fs", "noise_sd", "seed"}, truth);
    std::cerr << "wrote " << tokens.size() << " recordings to " << f.out << '\n';
    return 0;
}

struct ReportFlags {
    std::string tokens;
    std::vector<std::string> group_by{"language", "vowel"};
    std::string out = "out";
};

int run_report(const ReportFlags& f) {
    gd::ReportBundle b;
    b.tokens = gd::read_token_table(f.tokens);
    b.group_by = f.group_by;
    gd::emit(b, f.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fit, simulate and analyze constriction movements with the rapidity/target gesture model"};
    app.set_config("--config", "", "TOML/INI file setting any flag; the command line wins");
    app.require_subcommand(1);

    PipelineFlags analyze_flags, fit_flags;
    auto* analyze = app.add_subcommand("analyze", "Full pipeline: segment, fit, simulate, score, summarize");
    add_pipeline_flags(analyze, analyze_flags);
    auto* fit = app.add_subcommand("fit", "Segment and fit only (no simulation)");
    add_pipeline_flags(fit, fit_flags);

    SimulateFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Simulate one trajectory from explicit parameters");
    simulate->add_option("--target", sim_flags.target, "Target T in mm")->required();
    simulate->add_option("--rapidity", sim_flags.rapidity, "Rapidity r per sample")->required();
    simulate->add_option("--x0", sim_flags.x0, "Initial state in mm")->required();
    simulate->add_option("--v0", sim_flags.v0, "Initial velocity in mm/sample")->required();
    simulate->add_option("--stop", sim_flags.stop, "Stop speed in mm/sample (default |v0|)");
    simulate->add_option("--method", sim_flags.method, "euler (unit-step scheme) or rk4")
        ->check(CLI::IsMember({"euler", "rk4"}));
    simulate->add_option("--rk4-dt", sim_flags.rk4_dt, "RK4 step as a fraction of a sample");
    simulate->add_option("--fs", sim_flags.fs, "Sampling rate used for the time column");
    simulate->add_option("--max-steps", sim_flags.max_steps, "Step cap");
    simulate->add_option("--out", sim_flags.out, "Output CSV, '-' for stdout");

    SynthFlags synth_flags;
    auto* synth = app.add_subcommand("synth", "Write a synthetic corpus of aperture recordings");
    synth->add_option("--rapidity", synth_flags.rapidity, "Rapidity grid (per sample)");
    synth->add_option("--displacement", synth_flags.displacement, "Displacement grid in mm");
    synth->add_option("--x0", synth_flags.x0, "Start-state grid in mm");
    synth->add_option("--noise", synth_flags.noise, "Position-noise sd grid in mm");
    synth->add_option("--replicates", synth_flags.replicates, "Seeds per grid point, starting at --seed");
    synth->add_option("--seed", synth_flags.seed, "First seed");
    synth->add_option("--fs", synth_flags.fs, "Sampling rate in Hz");
    synth->add_option("--start-ratio", synth_flags.start_ratio, "r times initial lambda");
    synth->add_option("--jobs", synth_flags.jobs, "Worker threads");
    synth->add_option("--out", synth_flags.out, "Output directory");

    ReportFlags report_flags;
    auto* report = app.add_subcommand("report", "Re-emit summary and plot tables from a saved tokens.csv");
    report->add_option("tokens", report_flags.tokens, "Per-token table")->required()->check(CLI::ExistingFile);
    report->add_option("--group-by", report_flags.group_by, "Metadata grouping keys");
    report->add_option("--out", report_flags.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*analyze) return run_analysis(analyze_flags, true);
        if (*fit) return run_analysis(fit_flags, false);
        if (*simulate) return run_simulate(sim_flags);
        if (*synth) return run_synth(synth_flags);
        if (*report) return run_report(report_flags);
    } catch (const gd::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
