#pragma once

// Movement parsing from the velocity signal, target extraction, exclusion
// checks and the lambda = (T - x)/v series.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gesturedyn/error.hpp"
#include "gesturedyn/series.hpp"
#include "gesturedyn/stats.hpp"

namespace gesturedyn {

/// Inclusive sample-index range.
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;
};

struct TokenFlags {
    bool non_monotonic = false;
    bool multi_peak_velocity = false;
};

using Metadata = std::map<std::string, std::string>;

struct MovementToken {
    std::string id;
    Trajectory trajectory;
    std::size_t onset = 0;
    std::size_t offset = 0;
    double t_obs = 0.0;  // observed target, mm
    double x0 = 0.0;     // state at onset, mm
    double v0 = 0.0;     // velocity at onset, mm/sample
    TokenFlags flags;
    Metadata meta;

    std::size_t window_length() const noexcept { return offset - onset + 1; }
    double dt() const noexcept { return trajectory.dt(); }
};

struct VelocityPeak {
    std::size_t index = 0;
    double value = 0.0;
};

/// Largest |v| in the window; ties go to the earliest index.
inline VelocityPeak find_velocity_peak(const SampledSeries& velocity, IndexRange window) {
    if (velocity.empty() || window.first > window.last) detail::fail("empty search window");
    if (window.last >= velocity.size()) detail::fail("search window exceeds the series");
    VelocityPeak best{window.first, velocity[window.first]};
    for (std::size_t i = window.first + 1; i <= window.last; ++i)
        if (std::abs(velocity[i]) > std::abs(best.value)) best = {i, velocity[i]};
    return best;
}

/// Onset: earliest sample in the window with |v| >= threshold * |v_peak|.
/// Offset: last sample after the peak before |v| first drops below it.
inline IndexRange parse_movement(const SampledSeries& velocity, IndexRange window, double threshold = 0.2) {
    if (!(threshold > 0.0 && threshold < 1.0)) detail::fail("threshold must lie in (0, 1)");
    const VelocityPeak peak = find_velocity_peak(velocity, window);
    if (peak.value == 0.0) detail::fail("velocity is zero throughout the window");
    const double level = threshold * std::abs(peak.value);
    std::optional<std::size_t> onset;
    for (std::size_t i = window.first; i <= peak.index; ++i) {
        if (std::abs(velocity[i]) >= level) {
            onset = i;
            break;
        }
    }
    if (!onset) detail::fail("no sample meets the velocity threshold");
    std::size_t offset = peak.index;
    while (offset < window.last && std::abs(velocity[offset + 1]) >= level) ++offset;
    return {*onset, offset};
}

/// State at the first local minimum of |v| strictly after `offset`.
inline double extract_target(const SampledSeries& state, const SampledSeries& velocity, std::size_t offset) {
    const std::size_t n = velocity.size();
    if (state.size() != n) detail::fail("state and velocity differ in length");
    if (offset + 1 >= n) detail::fail("offset is the last sample; no target search possible");
    std::size_t i = offset + 1;
    while (i + 1 < n && std::abs(velocity[i + 1]) < std::abs(velocity[i])) ++i;
    return state[i];
}

/// True iff every velocity sample in [onset, offset] has the same strict sign.
inline bool check_monotonic(const SampledSeries& velocity, std::size_t onset, std::size_t offset) {
    if (onset > offset || offset >= velocity.size()) detail::fail("invalid index range");
    const double first = velocity[onset];
    if (first == 0.0) return false;
    for (std::size_t i = onset; i <= offset; ++i)
        if (velocity[i] == 0.0 || (velocity[i] > 0.0) != (first > 0.0)) return false;
    return true;
}

/// Number of sign changes of acceleration over [onset, offset]; exact zeros
/// are skipped when comparing signs.
inline std::size_t count_zero_crossings(const SampledSeries& series, std::size_t onset, std::size_t offset) {
    std::size_t count = 0;
    int last_sign = 0;
    for (std::size_t i = onset; i <= offset; ++i) {
        const int s = (series[i] > 0.0) - (series[i] < 0.0);
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) ++count;
        last_sign = s;
    }
    return count;
}

/// Builds a token from a full recording: peak search, threshold parsing,
/// target extraction and flags.
inline MovementToken segment_token(std::string id, Trajectory trajectory, std::optional<IndexRange> window = {},
                                   double threshold = 0.2, Metadata meta = {}) {
    const std::size_t n = trajectory.size();
    if (n < 2) detail::fail("recording too short to segment");
    const IndexRange win = window.value_or(IndexRange{0, n - 1});
    const IndexRange move = parse_movement(trajectory.velocity(), win, threshold);
    if (move.first >= move.last) detail::fail("degenerate movement window (onset == offset)");
    MovementToken tok{std::move(id), std::move(trajectory), move.first, move.last, 0.0, 0.0, 0.0, {}, std::move(meta)};
    const auto& x = tok.trajectory.state();
    const auto& v = tok.trajectory.velocity();
    tok.t_obs = extract_target(x, v, tok.offset);
    tok.x0 = x[tok.onset];
    tok.v0 = v[tok.onset];
    tok.flags.non_monotonic = !check_monotonic(v, tok.onset, tok.offset);
    tok.flags.multi_peak_velocity = count_zero_crossings(tok.trajectory.acceleration(), tok.onset, tok.offset) > 1;
    return tok;
}

struct LambdaSeries {
    std::vector<double> values;     // samples
    std::vector<double> ln_values;  // natural log
};

/// lambda[i] = (t - x[i]) / v[i] over the token window.
inline LambdaSeries lambda_series(const MovementToken& token, double target) {
    if (token.flags.non_monotonic) detail::fail("lambda undefined for a non-monotonic token");
    const auto& x = token.trajectory.state();
    const auto& v = token.trajectory.velocity();
    LambdaSeries out;
    for (std::size_t i = token.onset; i <= token.offset; ++i) {
        if (v[i] == 0.0) detail::fail("zero velocity inside the movement window at sample " + std::to_string(i));
        const double lam = (target - x[i]) / v[i];
        if (!(lam > 0.0) || !std::isfinite(lam))
            detail::fail("non-positive lambda at sample " + std::to_string(i) + "; target not beyond the trajectory");
        out.values.push_back(lam);
        out.ln_values.push_back(std::log(lam));
    }
    return out;
}

/// OLS of ln(lambda) against sample index (0 at onset).
inline LinearFit ln_lambda_fit(const LambdaSeries& series) {
    if (series.values.size() < 3) detail::fail("ln lambda fit needs at least 3 samples");
    for (double lam : series.values)
        if (!(lam > 0.0)) detail::fail("non-positive lambda");
    std::vector<double> idx(series.values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
    return linear_regression(idx, series.ln_values);
}

}  // namespace gesturedyn
