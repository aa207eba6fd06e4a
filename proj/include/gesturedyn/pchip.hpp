#pragma once

// Shape-preserving piecewise cubic Hermite interpolation (Fritsch-Carlson
// slopes with the weighted harmonic mean and the three-point end rule).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gesturedyn/error.hpp"
#include "gesturedyn/series.hpp"

namespace gesturedyn {

namespace detail {

inline double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

inline double pchip_end_slope(double h0, double h1, double del0, double del1) {
    double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (sign_of(d) != sign_of(del0)) {
        d = 0.0;
    } else if (sign_of(del0) != sign_of(del1) && std::abs(d) > std::abs(3.0 * del0)) {
        d = 3.0 * del0;
    }
    return d;
}

}  // namespace detail

class Pchip {
public:
    Pchip(std::vector<double> xs, std::vector<double> ys) : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) detail::fail("pchip needs at least two knots of matching length");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i])) detail::fail("pchip knots must be strictly increasing");

        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = del[0];
            return;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (del[k - 1] * del[k] > 0.0) {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                d_[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        d_[0] = detail::pchip_end_slope(h[0], h[1], del[0], del[1]);
        d_[n - 1] = detail::pchip_end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        std::size_t k;
        if (x <= x_.front()) {
            k = 0;
        } else if (x >= x_.back()) {
            k = n - 2;
        } else {
            k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
        }
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] + (-2 * t3 + 3 * t2) * y_[k + 1] +
               (t3 - t2) * h * d_[k + 1];
    }

    std::span<const double> slopes() const noexcept { return d_; }

private:
    std::vector<double> x_, y_, d_;
};

/// Resample onto `n` uniformly spaced points over the original time span.
/// The output interval is the original span divided by n - 1.
inline SampledSeries resample_pchip(const SampledSeries& series, std::size_t n = 100) {
    if (n < 2) detail::fail("resample target must have at least 2 samples");
    if (series.size() < 2) detail::fail("resample source must have at least 2 samples");
    const std::size_t m = series.size();
    std::vector<double> xs(m);
    for (std::size_t i = 0; i < m; ++i) xs[i] = static_cast<double>(i);
    const Pchip interp(std::move(xs), series.vector());
    const double span = static_cast<double>(m - 1);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = interp(span * static_cast<double>(j) / static_cast<double>(n - 1));
    out.front() = series[0];
    out.back() = series[m - 1];
    return {std::move(out), series.dt() * span / static_cast<double>(n - 1), series.unit()};
}

}  // namespace gesturedyn
