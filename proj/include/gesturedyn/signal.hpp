#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gesturedyn/butterworth.hpp"
#include "gesturedyn/error.hpp"
#include "gesturedyn/pchip.hpp"
#include "gesturedyn/series.hpp"
#include "gesturedyn/whittaker.hpp"

namespace gesturedyn {

using Point3 = std::array<double, 3>;

/// Sampled 3-D sensor positions in mm.
struct PointSeries {
    std::vector<Point3> points;
    double dt = 0.0;
};

/// Per-sample Euclidean distance between two sensors.
inline SampledSeries lip_aperture(const PointSeries& upper, const PointSeries& lower) {
    if (upper.points.size() != lower.points.size()) detail::fail("sensor tracks differ in length");
    if (upper.dt != lower.dt) detail::fail("sensor tracks differ in sampling interval");
    std::vector<double> la(upper.points.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        const auto& u = upper.points[i];
        const auto& l = lower.points[i];
        for (int c = 0; c < 3; ++c)
            if (!std::isfinite(u[c]) || !std::isfinite(l[c]))
                detail::fail("non-finite sensor coordinate at sample " + std::to_string(i));
        la[i] = std::hypot(u[0] - l[0], u[1] - l[1], u[2] - l[2]);
    }
    return {std::move(la), upper.dt, "mm"};
}

/// Central differences in per-sample units; one-sided at the ends.
inline SampledSeries central_difference(const SampledSeries& series) {
    const std::size_t n = series.size();
    if (n < 3) detail::fail("central difference needs at least 3 samples");
    std::vector<double> d(n);
    d[0] = series[1] - series[0];
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (series[i + 1] - series[i - 1]) / 2.0;
    d[n - 1] = series[n - 1] - series[n - 2];
    return {std::move(d), series.dt(), series.unit() + "/sample"};
}

/// Lowpass settings for the derivative pipeline. Velocity and acceleration
/// cutoffs are independent.
struct FilterConfig {
    double velocity_cutoff_hz = 20.0;
    double acceleration_cutoff_hz = 20.0;
    int order = 5;
};

/// smooth -> central difference -> lowpass for velocity; central difference
/// of the filtered velocity -> lowpass for acceleration. The returned state is
/// the smoothed state.
inline Trajectory differentiate_pipeline(const SampledSeries& state, const SmoothConfig& smooth_cfg = {},
                                         const FilterConfig& filter_cfg = {}) {
    if (state.size() < 3) detail::fail("differentiation pipeline needs at least 3 samples");
    SampledSeries smoothed = smooth(state, smooth_cfg);
    SampledSeries velocity = butterworth_lowpass(central_difference(smoothed), filter_cfg.velocity_cutoff_hz,
                                                 filter_cfg.order);
    SampledSeries acceleration = butterworth_lowpass(central_difference(velocity),
                                                     filter_cfg.acceleration_cutoff_hz, filter_cfg.order);
    return {std::move(smoothed), std::move(velocity), std::move(acceleration),
            "smooth>central_difference>butterworth_lowpass"};
}

}  // namespace gesturedyn
