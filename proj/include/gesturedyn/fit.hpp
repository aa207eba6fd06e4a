#pragma once

// Least-squares estimation of (T, r) from the acceleration field, the
// mass-spring baseline with the target held fixed, and simulate-and-score.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gesturedyn/dynamics.hpp"
#include "gesturedyn/error.hpp"
#include "gesturedyn/kinematics.hpp"
#include "gesturedyn/pchip.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/stats.hpp"

namespace gesturedyn {

struct FitConfig {
    int max_iterations = 200;
    double relative_tolerance = 1e-10;
    double initial_damping = 1e-3;
    double target_nudge_mm = 0.1;
};

struct FitResult {
    GestureParams params;
    double r_squared = 0.0;
    std::vector<double> residuals;  // observed - predicted acceleration, mm/sample^2
    int iterations = 0;
    bool converged = false;
};

namespace detail {

struct WindowData {
    std::vector<double> x, v, a;
};

inline WindowData window_data(const MovementToken& token) {
    WindowData w;
    const auto& tr = token.trajectory;
    for (std::size_t i = token.onset; i <= token.offset; ++i) {
        w.x.push_back(tr.state()[i]);
        w.v.push_back(tr.velocity()[i]);
        w.a.push_back(tr.acceleration()[i]);
    }
    return w;
}

inline double eq5_cost(const WindowData& w, double target, double rapidity, std::vector<double>* residuals = nullptr) {
    double cost = 0.0;
    if (residuals) residuals->resize(w.x.size());
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        const double e = w.a[i] - (rapidity * w.v[i] - w.v[i] * w.v[i] / (target - w.x[i]));
        if (residuals) (*residuals)[i] = e;
        cost += e * e;
    }
    return 0.5 * cost;
}

}  // namespace detail

/// Levenberg-Marquardt fit of a = r v - v^2/(T - x) over the token window.
/// The target is kept beyond the most extreme state in the direction of
/// motion by writing T = x_extreme + direction * exp(theta).
inline FitResult fit_eq5(const MovementToken& token, const FitConfig& cfg = {}) {
    if (token.flags.non_monotonic) detail::fail("cannot fit a non-monotonic token");
    if (token.window_length() < 5) detail::fail("fit needs a window of at least 5 samples");
    const auto w = detail::window_data(token);
    const auto [lo, hi] = std::minmax_element(w.x.begin(), w.x.end());
    if (*lo == *hi) detail::fail("degenerate window: all states are equal");

    const double direction = token.trajectory.state()[token.offset] < token.x0 ? -1.0 : 1.0;
    const double extreme = direction < 0.0 ? *lo : *hi;
    auto target_of = [&](double theta) { return extreme + direction * std::exp(theta); };

    double t0 = token.t_obs;
    if (direction * (t0 - extreme) < cfg.target_nudge_mm) t0 = extreme + direction * cfg.target_nudge_mm;
    double theta = std::log(std::abs(t0 - extreme));

    double r = 0.0;
    try {
        r = -ln_lambda_fit(lambda_series(token, t0)).slope;
    } catch (const error&) {
        r = 0.0;
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        // conditional least-squares rapidity given t0
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < w.x.size(); ++i) {
            num += w.v[i] * (w.a[i] + w.v[i] * w.v[i] / (t0 - w.x[i]));
            den += w.v[i] * w.v[i];
        }
        r = den > 0.0 ? num / den : 0.1;
    }

    FitResult out;
    double cost = detail::eq5_cost(w, target_of(theta), r);
    double mu = cfg.initial_damping;
    while (out.iterations < cfg.max_iterations) {
        ++out.iterations;
        if (cost == 0.0) {
            out.converged = true;
            break;
        }
        const double t = target_of(theta);
        const double dtdtheta = t - extreme;
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, g0 = 0.0, g1 = 0.0;
        for (std::size_t i = 0; i < w.x.size(); ++i) {
            const double gap = t - w.x[i];
            const double e = w.a[i] - (r * w.v[i] - w.v[i] * w.v[i] / gap);
            const double j0 = -(w.v[i] * w.v[i] / (gap * gap)) * dtdtheta;
            const double j1 = -w.v[i];
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            g0 += j0 * e;
            g1 += j1 * e;
        }
        const double m00 = jtj00 + mu * std::max(jtj00, 1e-300);
        const double m11 = jtj11 + mu * std::max(jtj11, 1e-300);
        const double det = m00 * m11 - jtj01 * jtj01;
        bool accepted = false;
        if (det > 0.0 && std::isfinite(det)) {
            const double d_theta = (-g0 * m11 + g1 * jtj01) / det;
            const double d_r = (-g1 * m00 + g0 * jtj01) / det;
            const double new_cost = detail::eq5_cost(w, target_of(theta + d_theta), r + d_r);
            if (std::isfinite(new_cost) && new_cost < cost) {
                accepted = true;
                const double change = (cost - new_cost) / cost;
                theta += d_theta;
                r += d_r;
                cost = new_cost;
                mu = std::max(mu / 10.0, 1e-15);
                if (change < cfg.relative_tolerance) {
                    out.converged = true;
                    break;
                }
            }
        }
        if (!accepted) {
            mu *= 10.0;
            if (mu > 1e20) {
                // no descent direction left at machine precision
                out.converged = true;
                break;
            }
        }
    }

    out.params = {target_of(theta), r};
    detail::eq5_cost(w, out.params.target, r, &out.residuals);
    std::vector<double> pred(w.a.size());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = w.a[i] - out.residuals[i];
    out.r_squared = r_squared(w.a, pred);
    if (!(r > 0.0)) out.converged = false;
    return out;
}

struct MsdFit {
    double stiffness = 0.0;
    double damping = 0.0;
    double r_squared = 0.0;
};

/// Linear least squares of a on [(T - x), -v] with T fixed at the observed
/// target and unit mass.
inline MsdFit fit_msd(const MovementToken& token) {
    if (token.window_length() < 5) detail::fail("fit needs a window of at least 5 samples");
    const auto w = detail::window_data(token);
    const auto [lo, hi] = std::minmax_element(w.x.begin(), w.x.end());
    if (*lo == *hi) detail::fail("degenerate window: all states are equal");
    double s00 = 0.0, s01 = 0.0, s11 = 0.0, b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        const double u0 = token.t_obs - w.x[i];
        const double u1 = -w.v[i];
        s00 += u0 * u0;
        s01 += u0 * u1;
        s11 += u1 * u1;
        b0 += u0 * w.a[i];
        b1 += u1 * w.a[i];
    }
    const double det = s00 * s11 - s01 * s01;
    if (!(s00 > 0.0 && s11 > 0.0) || det <= 1e-12 * s00 * s11) detail::fail("rank-deficient mass-spring design");
    MsdFit fit;
    fit.stiffness = (b0 * s11 - b1 * s01) / det;
    fit.damping = (b1 * s00 - b0 * s01) / det;
    std::vector<double> pred(w.x.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        pred[i] = fit.stiffness * (token.t_obs - w.x[i]) - fit.damping * w.v[i];
    fit.r_squared = r_squared(w.a, pred);
    return fit;
}

inline constexpr std::size_t comparison_grid = 100;

struct SimScore {
    double r2_state = 0.0;
    double r2_velocity = 0.0;
    double r2_accel = 0.0;
    std::size_t simulated_samples = 0;
    std::optional<KinematicSummary> kinematics;  // empty for a 1-sample simulation
    std::vector<double> state, velocity, accel;  // simulated, on the comparison grid
};

namespace detail {

inline std::vector<double> to_grid(std::span<const double> v, double dt) {
    if (v.size() == 1) return std::vector<double>(comparison_grid, v[0]);
    return resample_pchip(SampledSeries(std::vector<double>(v.begin(), v.end()), dt), comparison_grid).vector();
}

}  // namespace detail

/// Simulates from the token's onset state and velocity with the fitted
/// parameters (unit-step scheme, stop once |v| < |v0|) and scores x, v, a
/// against the observed window on a common 100-sample grid.
inline SimScore simulate_and_score(const MovementToken& token, const FitResult& fit, const SimOptions& opts = {}) {
    if (!fit.converged) detail::fail("fit did not converge");
    SimOptions so = opts;
    so.sample_interval = token.dt();
    const Trajectory sim = simulate_paper_euler(token.x0, token.v0, fit.params, std::abs(token.v0), so);
    const auto w = detail::window_data(token);
    const double dt = token.dt();

    SimScore s;
    s.simulated_samples = sim.size();
    s.state = detail::to_grid(sim.state().values(), dt);
    s.velocity = detail::to_grid(sim.velocity().values(), dt);
    s.accel = detail::to_grid(sim.acceleration().values(), dt);
    s.r2_state = r_squared(detail::to_grid(w.x, dt), s.state);
    s.r2_velocity = r_squared(detail::to_grid(w.v, dt), s.velocity);
    s.r2_accel = r_squared(detail::to_grid(w.a, dt), s.accel);
    if (sim.size() >= 2)
        s.kinematics = kinematic_summary(sim.state(), sim.velocity(), 0, sim.size() - 1, sim.state()[sim.size() - 1]);
    return s;
}

}  // namespace gesturedyn
