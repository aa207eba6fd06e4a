#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gesturedyn/error.hpp"

namespace gesturedyn {

/// Uniformly sampled scalar signal. Values are finite and dt is positive;
/// both are checked on construction and never change afterwards.
class SampledSeries {
public:
    SampledSeries(std::vector<double> values, double dt, std::string unit = {})
        : values_(std::move(values)), dt_(dt), unit_(std::move(unit)) {
        if (!(dt_ > 0.0) || !std::isfinite(dt_)) detail::fail("sampling interval must be finite and positive");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                detail::fail("non-finite sample at index " + std::to_string(i));
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }
    double dt() const noexcept { return dt_; }
    double sampling_rate() const noexcept { return 1.0 / dt_; }
    const std::string& unit() const noexcept { return unit_; }

    /// Same sampling and unit, new values.
    SampledSeries with_values(std::vector<double> values) const { return {std::move(values), dt_, unit_}; }

    /// Contiguous sub-range [first, last] (inclusive).
    SampledSeries slice(std::size_t first, std::size_t last) const {
        if (first > last || last >= values_.size()) detail::fail("slice out of range");
        return {std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                    values_.begin() + static_cast<std::ptrdiff_t>(last) + 1),
                dt_, unit_};
    }

private:
    std::vector<double> values_;
    double dt_;
    std::string unit_;
};

/// Aligned state / velocity / acceleration of one recording. Velocity and
/// acceleration are in per-sample units (mm/sample, mm/sample^2).
class Trajectory {
public:
    Trajectory(SampledSeries state, SampledSeries velocity, SampledSeries acceleration, std::string provenance = {})
        : state_(std::move(state)),
          velocity_(std::move(velocity)),
          acceleration_(std::move(acceleration)),
          provenance_(std::move(provenance)) {
        if (state_.size() != velocity_.size() || state_.size() != acceleration_.size())
            detail::fail("trajectory series lengths differ");
        if (state_.dt() != velocity_.dt() || state_.dt() != acceleration_.dt())
            detail::fail("trajectory series sampling intervals differ");
    }

    const SampledSeries& state() const noexcept { return state_; }
    const SampledSeries& velocity() const noexcept { return velocity_; }
    const SampledSeries& acceleration() const noexcept { return acceleration_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return state_.size(); }
    double dt() const noexcept { return state_.dt(); }

private:
    SampledSeries state_;
    SampledSeries velocity_;
    SampledSeries acceleration_;
    std::string provenance_;
};

// Per-sample <-> per-second conversions. Velocities are stored per sample.
inline double per_sample_to_per_second(double value, double dt) { return value / dt; }
inline double per_second_to_per_sample(double value, double dt) { return value * dt; }
inline double per_sample2_to_per_second2(double value, double dt) { return value / (dt * dt); }

}  // namespace gesturedyn
