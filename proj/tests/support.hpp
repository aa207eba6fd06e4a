#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gesturedyn/gesturedyn.hpp"

namespace testing_support {

namespace gd = gesturedyn;

inline gd::SampledSeries series(std::vector<double> v, double dt = 0.01) { return {std::move(v), dt, "mm"}; }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Trajectory whose derivatives are given exactly (no differentiation pipeline).
inline gd::Trajectory exact_trajectory(std::vector<double> x, std::vector<double> v, std::vector<double> a,
                                       double dt = 0.01) {
    return {gd::SampledSeries(std::move(x), dt, "mm"), gd::SampledSeries(std::move(v), dt, "mm/sample"),
            gd::SampledSeries(std::move(a), dt, "mm/sample/sample")};
}

/// Noise-free model token with exact derivatives; start far before the
/// velocity peak (r * lambda0 = start_ratio).
inline gd::SynthSpec exact_spec(double target, double rapidity, double x0 = 30.0, double start_ratio = 1000.0,
                                double fs = 100.0) {
    gd::SynthSpec s;
    s.params = {target, rapidity};
    s.x0 = x0;
    s.v0 = (target - x0) / (start_ratio / rapidity);
    s.fs = fs;
    s.exact_derivatives = true;
    return s;
}

/// Hand-rolled token over the full recording with given derivatives.
inline gd::MovementToken manual_token(std::vector<double> x, std::vector<double> v, std::vector<double> a,
                                      double t_obs, double dt = 0.01) {
    const std::size_t n = x.size();
    gd::MovementToken tok{"manual", exact_trajectory(x, v, a, dt), 0, n - 1, t_obs, x[0], v[0], {}, {}};
    return tok;
}

}  // namespace testing_support
