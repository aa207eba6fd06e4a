#pragma once

#include <cmath>
#include <cstddef>

#include "gesturedyn/error.hpp"
#include "gesturedyn/segment.hpp"
#include "gesturedyn/series.hpp"

namespace gesturedyn {

/// Per-token kinematic variables in reporting units.
struct KinematicSummary {
    double duration_ms = 0.0;
    double max_displacement_mm = 0.0;
    double peak_velocity_mm_s = 0.0;  // magnitude
    double time_to_peak_ms = 0.0;     // from onset
    double rel_time_to_peak = 0.0;    // time_to_peak / duration
    double kinematic_stiffness = 0.0; // peak velocity / max displacement, 1/s
};

/// Kinematics of the window [onset, offset] of a state/velocity pair, with
/// displacement measured from the onset state to `target`.
inline KinematicSummary kinematic_summary(const SampledSeries& state, const SampledSeries& velocity, std::size_t onset,
                                          std::size_t offset, double target) {
    if (onset >= offset) detail::fail("zero-duration movement window");
    if (offset >= velocity.size() || state.size() != velocity.size()) detail::fail("window exceeds the recording");
    const double dt = velocity.dt();
    const VelocityPeak peak = find_velocity_peak(velocity, {onset, offset});
    KinematicSummary k;
    k.duration_ms = static_cast<double>(offset - onset) * dt * 1000.0;
    k.max_displacement_mm = std::abs(state[onset] - target);
    k.peak_velocity_mm_s = std::abs(peak.value) / dt;
    k.time_to_peak_ms = static_cast<double>(peak.index - onset) * dt * 1000.0;
    k.rel_time_to_peak = k.time_to_peak_ms / k.duration_ms;
    if (!(k.max_displacement_mm > 0.0)) detail::fail("zero displacement; stiffness undefined");
    k.kinematic_stiffness = k.peak_velocity_mm_s / k.max_displacement_mm;
    return k;
}

inline KinematicSummary kinematic_summary(const MovementToken& token) {
    return kinematic_summary(token.trajectory.state(), token.trajectory.velocity(), token.onset, token.offset,
                             token.t_obs);
}

}  // namespace gesturedyn
