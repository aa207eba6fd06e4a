#pragma once

// Deterministic synthetic recordings generated from the gesture model, with
// ground truth kept alongside each token.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "gesturedyn/dynamics.hpp"
#include "gesturedyn/error.hpp"
#include "gesturedyn/parallel.hpp"
#include "gesturedyn/random.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/signal.hpp"

namespace gesturedyn {

struct SynthSpec {
    GestureParams params;    // rapidity per sample at fs
    double x0 = 0.0;         // recording start state, mm
    double v0 = 0.0;         // recording start velocity, mm/sample
    double fs = 100.0;       // Hz
    double noise_sd = 0.0;   // Gaussian position noise, mm
    std::uint64_t seed = 0;
    std::size_t n_tokens = 1;

    double rk4_dt = 1e-3;             // samples
    double stop_fraction = 1e-3;      // integration ends below this share of peak speed
    std::size_t tail_samples = 20;    // rest samples appended after the movement
    /// Use the integrator's exact velocity/acceleration instead of the
    /// smoothing/differentiation pipeline (position noise is then not added).
    bool exact_derivatives = false;
    /// Exact mode only: Gaussian acceleration noise, sd as a share of peak |a|.
    double accel_noise_fraction = 0.0;

    SmoothConfig smoothing;
    FilterConfig filter;
    double threshold = 0.2;

    void validate() const {
        params.validate();
        if (!(fs > 0.0)) detail::fail("sampling rate must be positive");
        if (!(noise_sd >= 0.0)) detail::fail("noise sd must be nonnegative");
        if (!(accel_noise_fraction >= 0.0)) detail::fail("acceleration noise must be nonnegative");
        if (!(initial_lambda(x0, v0, params.target) > 0.0)) detail::fail("initial lambda must be positive");
    }
};

struct SynthToken {
    MovementToken token;
    GestureParams truth;
    SampledSeries clean_state;  // sampled model states before noise (incl. tail)
    SampledSeries recording;    // what an instrument would deliver
};

/// Analytic peak speed |T - x0| r exp(1/(r lambda0) - 1), or |v0| when the
/// movement decelerates from the start (r lambda0 <= 1).
inline double model_peak_speed(double x0, double v0, const GestureParams& p) {
    const double u0 = p.rapidity * initial_lambda(x0, v0, p.target);
    if (u0 <= 1.0) return std::abs(v0);
    return std::abs(p.target - x0) * p.rapidity * std::exp(1.0 / u0 - 1.0);
}

inline SynthToken generate_token(const SynthSpec& spec, const std::string& id = "synth") {
    spec.validate();
    const double dt = 1.0 / spec.fs;
    const double stop = std::min(spec.stop_fraction * model_peak_speed(spec.x0, spec.v0, spec.params), std::abs(spec.v0));
    SimOptions opts;
    opts.sample_interval = dt;
    const Trajectory sim = simulate_rk4(spec.x0, spec.v0, spec.params, spec.rk4_dt, stop, opts);

    std::vector<double> x = sim.state().vector(), v = sim.velocity().vector(), a = sim.acceleration().vector();
    const double x_end = x.back();
    for (std::size_t i = 0; i < spec.tail_samples; ++i) {
        x.push_back(x_end);
        v.push_back(0.0);
        a.push_back(0.0);
    }
    SampledSeries clean(x, dt, "mm");

    RandomStream rng(substream_seed(spec.seed, id));
    Metadata meta{{"source", "synth"}};
    if (spec.exact_derivatives) {
        if (spec.accel_noise_fraction > 0.0) {
            double peak = 0.0;
            for (double ai : a) peak = std::max(peak, std::abs(ai));
            for (double& ai : a) ai += rng.normal(0.0, spec.accel_noise_fraction * peak);
        }
        Trajectory exact(clean, SampledSeries(v, dt, "mm/sample"), SampledSeries(a, dt, "mm/sample/sample"),
                         "simulate_rk4");
        auto token = segment_token(id, std::move(exact), {}, spec.threshold, meta);
        return {std::move(token), spec.params, clean, clean};
    }

    std::vector<double> noisy = x;
    if (spec.noise_sd > 0.0)
        for (double& xi : noisy) xi += rng.normal(0.0, spec.noise_sd);
    SampledSeries recording(std::move(noisy), dt, "mm");
    auto token = segment_token(id, differentiate_pipeline(recording, spec.smoothing, spec.filter), {}, spec.threshold,
                               meta);
    return {std::move(token), spec.params, std::move(clean), std::move(recording)};
}

/// Parameter grid for a synthetic corpus. Each token starts at x0 with
/// target x0 - displacement and initial lambda = start_ratio / r, i.e. far
/// enough before the velocity peak that the onset lies inside the recording.
struct SweepGrid {
    std::vector<double> rapidity;
    std::vector<double> displacement;
    std::vector<double> x0{30.0};
    std::vector<double> noise_sd{0.0};
    std::vector<std::uint64_t> seeds{0};
    double start_ratio = 1000.0;
    SynthSpec base;  // fs, pipeline settings and the rest
};

inline std::string format_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::vector<SynthSpec> expand_grid(const SweepGrid& grid, std::vector<std::string>* ids = nullptr) {
    if (grid.rapidity.empty() || grid.displacement.empty() || grid.x0.empty() || grid.noise_sd.empty() ||
        grid.seeds.empty())
        detail::fail("sweep grid has an empty axis");
    std::vector<SynthSpec> specs;
    for (double r : grid.rapidity)
        for (double d : grid.displacement)
            for (double x0 : grid.x0)
                for (double noise : grid.noise_sd)
                    for (std::uint64_t seed : grid.seeds) {
                        if (!(d > 0.0)) detail::fail("displacement must be positive");
                        SynthSpec s = grid.base;
                        s.params = {x0 - d, r};
                        s.x0 = x0;
                        s.v0 = -d / (grid.start_ratio / r);
                        s.noise_sd = noise;
                        s.seed = seed;
                        specs.push_back(s);
                        if (ids)
                            ids->push_back("r" + format_g(r) + "_d" + format_g(d) + "_x" + format_g(x0) + "_n" +
                                           format_g(noise) + "_s" + std::to_string(seed));
                    }
    return specs;
}

inline std::vector<SynthToken> sweep(const SweepGrid& grid, std::size_t jobs = 1) {
    std::vector<std::string> ids;
    const auto specs = expand_grid(grid, &ids);
    return parallel_map(specs.size(), jobs, [&](std::size_t i) { return generate_token(specs[i], ids[i]); });
}

/// n_tokens replicates of one spec, ids "<prefix>_<k>".
inline std::vector<SynthToken> generate_corpus(const SynthSpec& spec, const std::string& prefix = "tok",
                                               std::size_t jobs = 1) {
    return parallel_map(spec.n_tokens, jobs,
                        [&](std::size_t k) { return generate_token(spec, prefix + "_" + std::to_string(k)); });
}

}  // namespace gesturedyn
