#pragma once

// Digital Butterworth lowpass: analog prototype poles mapped through the
// prewarped bilinear transform, realized as cascaded second-order sections
// (one first-order section for odd orders), applied forward-backward.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gesturedyn/error.hpp"
#include "gesturedyn/series.hpp"

namespace gesturedyn {

/// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    bool first_order() const noexcept { return b2 == 0.0 && a2 == 0.0; }
    double dc_gain() const noexcept { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

inline std::vector<Biquad> design_butterworth_lowpass(int order, double cutoff_hz, double fs) {
    if (order < 1) detail::fail("filter order must be >= 1");
    if (!(fs > 0.0)) detail::fail("sampling rate must be positive");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs / 2.0))
        detail::fail("cutoff must lie strictly between 0 and the Nyquist frequency");

    const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
    const double k2 = k * k;
    std::vector<Biquad> sos;
    for (int m = 1; m <= order / 2; ++m) {
        // conjugate pole pair of the normalized prototype: s^2 + a s + 1
        const double a = 2.0 * std::sin(std::numbers::pi * (2.0 * m - 1.0) / (2.0 * order));
        const double norm = 1.0 + a * k + k2;
        Biquad q;
        q.b0 = k2 / norm;
        q.b1 = 2.0 * k2 / norm;
        q.b2 = k2 / norm;
        q.a1 = (2.0 * k2 - 2.0) / norm;
        q.a2 = (1.0 - a * k + k2) / norm;
        sos.push_back(q);
    }
    if (order % 2 == 1) {
        const double norm = 1.0 + k;
        Biquad q;
        q.b0 = k / norm;
        q.b1 = k / norm;
        q.a1 = (k - 1.0) / norm;
        sos.push_back(q);
    }
    return sos;
}

/// Complex response of the cascade at `freq_hz`.
inline std::complex<double> frequency_response(std::span<const Biquad> sos, double freq_hz, double fs) {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h = 1.0;
    for (const auto& q : sos) h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
    return h;
}

/// Single forward pass, transposed direct form II. `initial` scales each
/// section's step-response steady state (0 = zero initial conditions).
inline std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x, double initial = 0.0) {
    std::vector<double> y(x.begin(), x.end());
    double level = initial;
    for (const auto& q : sos) {
        const double g = q.dc_gain();
        double z1 = (g - q.b0) * level;
        double z2 = (q.b2 - q.a2 * g) * level;
        for (double& v : y) {
            const double in = v;
            const double out = q.b0 * in + z1;
            z1 = q.b1 * in - q.a1 * out + z2;
            z2 = q.b2 * in - q.a2 * out;
            v = out;
        }
        level *= g;
    }
    return y;
}

/// Edge padding used by the forward-backward pass.
inline std::size_t filtfilt_padlen(std::span<const Biquad> sos) {
    std::size_t taps = 2 * sos.size() + 1;
    if (std::any_of(sos.begin(), sos.end(), [](const Biquad& q) { return q.first_order(); })) --taps;
    return 3 * taps;
}

/// Samples needed for the slowest pole's transient to fall below 1e-9.
inline std::size_t filtfilt_decay_length(std::span<const Biquad> sos) {
    double rho = 0.0;
    for (const auto& q : sos) {
        if (q.first_order()) {
            rho = std::max(rho, std::abs(q.a1));
        } else {
            const double disc = q.a1 * q.a1 - 4.0 * q.a2;
            const double r = disc < 0.0 ? std::sqrt(q.a2)
                                        : 0.5 * (std::abs(q.a1) + std::sqrt(disc));
            rho = std::max(rho, r);
        }
    }
    if (!(rho > 0.0) || !(rho < 1.0)) return 0;
    return static_cast<std::size_t>(std::ceil(std::log(1e-9) / std::log(rho)));
}

/// Zero-phase forward-backward filtering with odd-reflection padding and
/// steady-state initial conditions. Series must exceed filtfilt_padlen();
/// longer series get a reflection long enough for the start-up transient
/// to die out before the first real sample.
inline std::vector<double> sosfiltfilt(std::span<const Biquad> sos, std::span<const double> x) {
    const std::size_t min_pad = filtfilt_padlen(sos);
    const std::size_t n = x.size();
    if (n <= min_pad) detail::fail("series shorter than the filter warm-up length (" + std::to_string(min_pad + 1) + " samples)");
    const std::size_t pad = std::min(n - 1, std::max(min_pad, filtfilt_decay_length(sos)));
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    auto fwd = sosfilt(sos, ext, ext.front());
    std::reverse(fwd.begin(), fwd.end());
    auto back = sosfilt(sos, fwd, fwd.front());
    std::reverse(back.begin(), back.end());
    return {back.begin() + static_cast<std::ptrdiff_t>(pad), back.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

/// Zero-phase Butterworth lowpass of a sampled series.
inline SampledSeries butterworth_lowpass(const SampledSeries& series, double cutoff_hz, int order = 5) {
    const auto sos = design_butterworth_lowpass(order, cutoff_hz, series.sampling_rate());
    return series.with_values(sosfiltfilt(sos, series.values()));
}

}  // namespace gesturedyn
