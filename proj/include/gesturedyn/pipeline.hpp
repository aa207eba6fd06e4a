#pragma once

// Batch orchestration: recording -> trajectory -> token -> lambda fit ->
// model fit -> baseline fit -> simulation score -> kinematics. Per-token
// failures become exclusions with a reason and never abort the batch.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gesturedyn/fit.hpp"
#include "gesturedyn/io.hpp"
#include "gesturedyn/kinematics.hpp"
#include "gesturedyn/parallel.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/signal.hpp"

namespace gesturedyn {

struct RunConfig {
    double threshold = 0.2;
    SmoothConfig smoothing;
    FilterConfig filter;
    FitConfig fit;
    bool simulate = true;
    std::size_t jobs = 1;
    std::vector<std::string> group_by{"language", "vowel"};
    double lambda_plot_cap = 150.0;  // band plots only

    void validate() const {
        if (!(threshold > 0.0 && threshold < 1.0)) detail::fail("threshold must lie in (0, 1)");
        if (filter.order < 1) detail::fail("filter order must be >= 1");
        if (jobs < 1) detail::fail("jobs must be >= 1");
    }
};

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

struct KinematicColumns {
    double duration_ms = nan_value;
    double max_displacement_mm = nan_value;
    double peak_velocity_mm_s = nan_value;
    double time_to_peak_ms = nan_value;
    double rel_time_to_peak = nan_value;
    double kinematic_stiffness = nan_value;

    KinematicColumns() = default;
    explicit KinematicColumns(const KinematicSummary& k)
        : duration_ms(k.duration_ms),
          max_displacement_mm(k.max_displacement_mm),
          peak_velocity_mm_s(k.peak_velocity_mm_s),
          time_to_peak_ms(k.time_to_peak_ms),
          rel_time_to_peak(k.rel_time_to_peak),
          kinematic_stiffness(k.kinematic_stiffness) {}
};

/// One row of the per-token table. Missing values are NaN.
struct TokenRecord {
    std::string id;
    Metadata meta;
    std::string status = "excluded";
    std::string exclusion;
    double n_samples = nan_value;
    double dt = nan_value;
    double onset = nan_value;
    double offset = nan_value;
    bool non_monotonic = false;
    bool multi_peak_velocity = false;
    double t_obs = nan_value;
    double x0 = nan_value;
    double v0 = nan_value;
    double lambda0 = nan_value;
    double ln_lambda_slope = nan_value;
    double ln_lambda_intercept = nan_value;
    double ln_lambda_r2 = nan_value;
    double eq5_target = nan_value;
    double eq5_rapidity = nan_value;
    double eq5_r2 = nan_value;
    double eq5_iterations = nan_value;
    double eq5_converged = nan_value;
    double msd_stiffness = nan_value;
    double msd_damping = nan_value;
    double msd_r2 = nan_value;
    double sim_samples = nan_value;
    double sim_r2_state = nan_value;
    double sim_r2_velocity = nan_value;
    double sim_r2_accel = nan_value;
    KinematicColumns observed;
    KinematicColumns simulated;

    // Comparison-grid series for trajectory bands; not part of the table.
    std::vector<double> obs_state, obs_velocity, obs_accel, lambda, ln_lambda, sim_state, sim_velocity, sim_accel;

    bool analyzed() const { return status == "analyzed"; }
};

namespace detail {

inline std::vector<double> window_grid(const SampledSeries& s, std::size_t onset, std::size_t offset) {
    return resample_pchip(s.slice(onset, offset), comparison_grid).vector();
}

}  // namespace detail

/// Runs the full per-token analysis on one recording.
inline TokenRecord process_recording(const Recording& rec, const RunConfig& cfg) {
    TokenRecord out;
    out.id = rec.id;
    out.meta = rec.meta;
    out.n_samples = static_cast<double>(rec.aperture.size());
    out.dt = rec.aperture.dt();
    auto exclude = [&](std::string reason) {
        out.status = "excluded";
        out.exclusion = std::move(reason);
        return out;
    };
    if (!rec.exclusion.empty()) return exclude(rec.exclusion);

    std::optional<Trajectory> traj;
    try {
        traj.emplace(differentiate_pipeline(rec.aperture, cfg.smoothing, cfg.filter));
    } catch (const error&) {
        return exclude("preprocessing_failed");
    }
    std::optional<MovementToken> token;
    try {
        token.emplace(segment_token(rec.id, std::move(*traj), rec.window, cfg.threshold, rec.meta));
    } catch (const error&) {
        return exclude("parse_failure");
    }
    const MovementToken& tok = *token;
    out.onset = static_cast<double>(tok.onset);
    out.offset = static_cast<double>(tok.offset);
    out.non_monotonic = tok.flags.non_monotonic;
    out.multi_peak_velocity = tok.flags.multi_peak_velocity;
    out.t_obs = tok.t_obs;
    out.x0 = tok.x0;
    out.v0 = tok.v0;
    if (tok.flags.non_monotonic) return exclude("non_monotonic");

    try {
        const LambdaSeries lam = lambda_series(tok, tok.t_obs);
        const LinearFit lf = ln_lambda_fit(lam);
        out.lambda0 = lam.values.front();
        out.ln_lambda_slope = lf.slope;
        out.ln_lambda_intercept = lf.intercept;
        out.ln_lambda_r2 = lf.r_squared;
        const double dt = tok.dt();
        out.lambda = resample_pchip(SampledSeries(lam.values, dt), comparison_grid).vector();
        out.ln_lambda = resample_pchip(SampledSeries(lam.ln_values, dt), comparison_grid).vector();
    } catch (const error&) {
        return exclude("lambda_invalid");
    }

    FitResult fit;
    try {
        fit = fit_eq5(tok, cfg.fit);
    } catch (const error&) {
        return exclude("fit_failed");
    }
    out.eq5_target = fit.params.target;
    out.eq5_rapidity = fit.params.rapidity;
    out.eq5_r2 = fit.r_squared;
    out.eq5_iterations = fit.iterations;
    out.eq5_converged = fit.converged ? 1.0 : 0.0;
    if (!fit.converged) return exclude("fit_failed");

    try {
        const MsdFit msd = fit_msd(tok);
        out.msd_stiffness = msd.stiffness;
        out.msd_damping = msd.damping;
        out.msd_r2 = msd.r_squared;
    } catch (const error&) {
        // baseline is informational; its columns stay empty
    }

    try {
        out.observed = KinematicColumns(kinematic_summary(tok));
    } catch (const error&) {
        return exclude("kinematics_failed");
    }
    const auto& tr = tok.trajectory;
    out.obs_state = detail::window_grid(tr.state(), tok.onset, tok.offset);
    out.obs_velocity = detail::window_grid(tr.velocity(), tok.onset, tok.offset);
    out.obs_accel = detail::window_grid(tr.acceleration(), tok.onset, tok.offset);

    if (cfg.simulate) {
        try {
            SimScore sc = simulate_and_score(tok, fit);
            out.sim_samples = static_cast<double>(sc.simulated_samples);
            out.sim_r2_state = sc.r2_state;
            out.sim_r2_velocity = sc.r2_velocity;
            out.sim_r2_accel = sc.r2_accel;
            if (sc.kinematics) out.simulated = KinematicColumns(*sc.kinematics);
            out.sim_state = std::move(sc.state);
            out.sim_velocity = std::move(sc.velocity);
            out.sim_accel = std::move(sc.accel);
        } catch (const error&) {
            return exclude("simulation_failed");
        }
    }
    out.status = "analyzed";
    return out;
}

/// Processes recordings on `cfg.jobs` workers; output follows input order
/// (recordings are sorted by id on ingest).
inline std::vector<TokenRecord> run_pipeline(const std::vector<Recording>& recs, const RunConfig& cfg) {
    cfg.validate();
    return parallel_map(recs.size(), cfg.jobs, [&](std::size_t i) { return process_recording(recs[i], cfg); });
}

}  // namespace gesturedyn
