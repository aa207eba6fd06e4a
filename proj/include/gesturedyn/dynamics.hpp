#pragma once

// Point-attractor gesture model with exponentially decaying lambda, its
// closed-form solution, the damped mass-spring baseline, and simulators.
//
// Units: state in mm, time in samples. Velocity is mm/sample, acceleration
// mm/sample^2 and rapidity r is per sample. Trajectories carry the sampling
// interval in seconds only as metadata for reporting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gesturedyn/error.hpp"
#include "gesturedyn/series.hpp"

namespace gesturedyn {

/// Control parameters: target (mm) and rapidity (per sample, > 0).
struct GestureParams {
    double target = 0.0;
    double rapidity = 0.0;

    void validate() const {
        if (!std::isfinite(target)) detail::fail("target must be finite");
        if (!(rapidity > 0.0) || !std::isfinite(rapidity)) detail::fail("rapidity must be finite and positive");
    }
};

/// Damped mass-spring parameters; m is fixed at 1.
struct MsdParams {
    double stiffness = 0.0;  // per sample^2
    double damping = 0.0;    // per sample
    double mass = 1.0;
    double target = 0.0;

    void validate() const {
        if (!(stiffness > 0.0)) detail::fail("stiffness must be positive");
        if (!(damping >= 0.0)) detail::fail("damping must be nonnegative");
        if (mass != 1.0) detail::fail("mass is fixed at 1");
    }
};

inline constexpr double default_target_epsilon = 1e-9;

/// Acceleration r*v - v^2/(T - x).
inline double accel_eq5(double x, double v, const GestureParams& p, double eps = default_target_epsilon) {
    const double gap = p.target - x;
    if (std::abs(gap) <= eps) detail::fail("state within epsilon of the target (singular acceleration)");
    return p.rapidity * v - v * v / gap;
}

/// Point-attractor velocity (T - x)/lambda.
inline double velocity_eq2(double x, double lambda, double target) {
    if (!(lambda > 0.0)) detail::fail("lambda must be positive");
    return (target - x) / lambda;
}

/// Mass-spring acceleration (k (T - x) - b v) / m.
inline double accel_msd(double x, double v, const MsdParams& p) {
    p.validate();
    return (p.stiffness * (p.target - x) - p.damping * v) / p.mass;
}

/// Initial lambda (T - x0)/v0; positive when moving toward the target.
inline double initial_lambda(double x0, double v0, double target) {
    if (v0 == 0.0) detail::fail("initial velocity is zero; lambda undefined");
    return (target - x0) / v0;
}

/// Analytic state at (possibly fractional) time `i` in samples:
/// x(i) = T - (T - x0) exp[(1 - e^{r i}) / (r lambda0)].
inline double closed_form_at(double i, double x0, double v0, const GestureParams& p) {
    const double lambda0 = initial_lambda(x0, v0, p.target);
    if (!(lambda0 > 0.0)) detail::fail("initial lambda must be positive (moving toward the target)");
    const double r = p.rapidity;
    return p.target - (p.target - x0) * std::exp(-std::expm1(r * i) / (r * lambda0));
}

/// Analytic velocity (T - x(i)) / (lambda0 e^{-r i}).
inline double closed_form_velocity_at(double i, double x0, double v0, const GestureParams& p) {
    const double lambda0 = initial_lambda(x0, v0, p.target);
    const double x = closed_form_at(i, x0, v0, p);
    return (p.target - x) / (lambda0 * std::exp(-p.rapidity * i));
}

inline SampledSeries closed_form_state(std::size_t n, double x0, double v0, const GestureParams& p,
                                       double sample_interval = 0.01) {
    p.validate();
    const double lambda0 = initial_lambda(x0, v0, p.target);
    if (!(lambda0 > 0.0)) detail::fail("initial lambda must be positive (moving toward the target)");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = closed_form_at(static_cast<double>(i), x0, v0, p);
    return {std::move(x), sample_interval, "mm"};
}

struct SimOptions {
    std::size_t max_steps = 10000;  // cap on generated samples
    double sample_interval = 0.01;  // seconds per sample, metadata only
    /// Only apply the stop test once speed has started to fall.
    bool stop_after_peak_only = false;
    /// RK4 only: return every internal step instead of the integer grid.
    bool record_substeps = false;
    double target_epsilon = default_target_epsilon;
};

namespace detail {

inline Trajectory make_trajectory(std::vector<double> x, std::vector<double> v, std::vector<double> a, double dt,
                                  std::string provenance) {
    return {SampledSeries(std::move(x), dt, "mm"), SampledSeries(std::move(v), dt, "mm/sample"),
            SampledSeries(std::move(a), dt, "mm/sample/sample"), std::move(provenance)};
}

inline void check_stop_inputs(double v0, double stop_speed) {
    if (!(stop_speed > 0.0)) fail("stop speed must be positive");
    if (std::abs(v0) < stop_speed) fail("initial speed is already below the stop speed");
}

/// Shared stop logic: keep a new sample while its speed stays at or above the
/// threshold (optionally only once the speed has begun to decrease).
struct StopTest {
    double stop_speed;
    bool after_peak_only;
    bool falling = false;

    bool should_stop(double prev_v, double v) {
        if (std::abs(v) < std::abs(prev_v)) falling = true;
        if (after_peak_only && !falling) return false;
        return std::abs(v) < stop_speed;
    }
};

inline bool crossed(double target, double x_start, double x) {
    const double s0 = target - x_start;
    const double s1 = target - x;
    return (s0 > 0.0 && s1 <= 0.0) || (s0 < 0.0 && s1 >= 0.0);
}

}  // namespace detail

/// Unit-step semi-implicit scheme: a_n from (x_n, v_n); v_{n+1} = v_n + a_n;
/// x_{n+1} = x_n + v_{n+1}. Samples are kept while |v| >= stop_speed.
inline Trajectory simulate_paper_euler(double x0, double v0, const GestureParams& p, double stop_speed,
                                       const SimOptions& opts = {}) {
    p.validate();
    detail::check_stop_inputs(v0, stop_speed);
    std::vector<double> xs{x0}, vs{v0}, as;
    detail::StopTest stop{stop_speed, opts.stop_after_peak_only};
    for (;;) {
        const double a = accel_eq5(xs.back(), vs.back(), p, opts.target_epsilon);
        as.push_back(a);
        const double v_next = vs.back() + a;
        const double x_next = xs.back() + v_next;
        if (stop.should_stop(vs.back(), v_next)) break;
        if (detail::crossed(p.target, x0, x_next)) detail::fail("simulated state crossed the target");
        if (xs.size() >= opts.max_steps) detail::fail("simulation exceeded the step cap");
        xs.push_back(x_next);
        vs.push_back(v_next);
    }
    return detail::make_trajectory(std::move(xs), std::move(vs), std::move(as), opts.sample_interval,
                                   "simulate_paper_euler");
}

/// Classical RK4 on (x, v) for an arbitrary acceleration field. The step is
/// 1/ceil(1/dt) samples so that the integer grid is hit exactly.
template <class Accel>
Trajectory integrate_rk4(Accel&& accel, double x0, double v0, double dt, double stop_speed, const SimOptions& opts,
                         const std::function<bool(double)>& crossed_fn, const char* provenance) {
    if (!(dt > 0.0) || dt > 1.0) detail::fail("RK4 step must lie in (0, 1] samples");
    detail::check_stop_inputs(v0, stop_speed);
    const auto substeps = static_cast<std::size_t>(std::ceil(1.0 / dt - 1e-9));
    const double h = 1.0 / static_cast<double>(substeps);

    std::vector<double> xs{x0}, vs{v0}, as{accel(x0, v0)};
    detail::StopTest stop{stop_speed, opts.stop_after_peak_only};
    double x = x0, v = v0;
    std::size_t samples = 1;
    for (;;) {
        std::vector<double> sub_x, sub_v, sub_a;
        for (std::size_t s = 0; s < substeps; ++s) {
            const double k1x = v, k1v = accel(x, v);
            const double k2x = v + 0.5 * h * k1v, k2v = accel(x + 0.5 * h * k1x, k2x);
            const double k3x = v + 0.5 * h * k2v, k3v = accel(x + 0.5 * h * k2x, k3x);
            const double k4x = v + h * k3v, k4v = accel(x + h * k3x, k4x);
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if (crossed_fn && crossed_fn(x)) detail::fail("simulated state crossed the target");
            if (opts.record_substeps && s + 1 < substeps) {
                sub_x.push_back(x);
                sub_v.push_back(v);
                sub_a.push_back(accel(x, v));
            }
        }
        if (stop.should_stop(vs.back(), v)) break;
        if (samples >= opts.max_steps) detail::fail("simulation exceeded the step cap");
        xs.insert(xs.end(), sub_x.begin(), sub_x.end());
        vs.insert(vs.end(), sub_v.begin(), sub_v.end());
        as.insert(as.end(), sub_a.begin(), sub_a.end());
        xs.push_back(x);
        vs.push_back(v);
        as.push_back(accel(x, v));
        ++samples;
    }
    const double out_dt = opts.record_substeps ? opts.sample_interval * h : opts.sample_interval;
    return detail::make_trajectory(std::move(xs), std::move(vs), std::move(as), out_dt, provenance);
}

/// Reference RK4 integration of the gesture model, returned on the integer
/// sample grid (or every substep with `record_substeps`).
inline Trajectory simulate_rk4(double x0, double v0, const GestureParams& p, double dt, double stop_speed,
                               const SimOptions& opts = {}) {
    p.validate();
    const double eps = opts.target_epsilon;
    return integrate_rk4([&](double x, double v) { return accel_eq5(x, v, p, eps); }, x0, v0, dt, stop_speed, opts,
                         [&](double x) { return detail::crossed(p.target, x0, x); }, "simulate_rk4");
}

/// RK4 integration of the mass-spring baseline (target crossing allowed).
inline Trajectory simulate_msd_rk4(double x0, double v0, const MsdParams& p, double dt, double stop_speed,
                                   const SimOptions& opts = {}) {
    p.validate();
    return integrate_rk4([&](double x, double v) { return accel_msd(x, v, p); }, x0, v0, dt, stop_speed, opts, {},
                         "simulate_msd_rk4");
}

/// Max |d(lambda)/dt + r lambda| along a trajectory, lambda = (T - x)/v.
/// `step` is the trajectory spacing in samples; the derivative uses the
/// five-point central stencil, so the first and last two points are skipped.
inline double appendix_a_residual(const Trajectory& traj, const GestureParams& p, double step = 1.0) {
    const std::size_t n = traj.size();
    if (n < 5) detail::fail("need at least 5 samples to differentiate lambda");
    if (!(step > 0.0)) detail::fail("step must be positive");
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = traj.velocity()[i];
        if (v == 0.0) detail::fail("zero velocity at sample " + std::to_string(i));
        lambda[i] = (p.target - traj.state()[i]) / v;
    }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double dl = (-lambda[i + 2] + 8.0 * lambda[i + 1] - 8.0 * lambda[i - 1] + lambda[i - 2]) / (12.0 * step);
        worst = std::max(worst, std::abs(dl + p.rapidity * lambda[i]));
    }
    return worst;
}

}  // namespace gesturedyn
