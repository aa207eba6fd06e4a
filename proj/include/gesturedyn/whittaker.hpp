#pragma once

// Second-order-difference Whittaker smoother with bisquare robust
// reweighting and optional generalized cross-validation (GCV) over the
// smoothing strength.
//
// The normal matrix W + s * D'D is symmetric positive definite and
// pentadiagonal, so it is factored as L * diag(d) * L' with a unit lower
// triangular L of bandwidth 2. The diagonal of its inverse, needed for the
// hat-matrix trace and for leverages, comes from the Takahashi recursion on
// the same factors; everything stays O(n).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gesturedyn/error.hpp"
#include "gesturedyn/series.hpp"

namespace gesturedyn {

struct SmoothConfig {
    /// Fixed smoothing strength; when empty it is chosen by GCV.
    std::optional<double> strength;
    /// Number of bisquare reweighting passes after the initial fit.
    int robust_iterations = 3;
    /// GCV search grid, log10(strength) from min to max in steps.
    double gcv_log10_min = -3.0;
    double gcv_log10_max = 6.0;
    double gcv_log10_step = 0.1;
};

namespace whittaker {

/// Banded LDL' factorization of W + s * D'D.
class PentadiagonalFactor {
public:
    PentadiagonalFactor(std::span<const double> weights, double strength) : n_(weights.size()) {
        if (n_ < 3) detail::fail("Whittaker smoother needs at least 3 samples");
        std::vector<double> a0(n_, 0.0), a1(n_, 0.0), a2(n_, 0.0);
        // D'D accumulated row by row of the (1, -2, 1) difference operator.
        for (std::size_t k = 0; k + 2 < n_; ++k) {
            a0[k] += 1.0;
            a0[k + 1] += 4.0;
            a0[k + 2] += 1.0;
            a1[k] += -2.0;
            a1[k + 1] += -2.0;
            a2[k] += 1.0;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            a0[i] = weights[i] + strength * a0[i];
            a1[i] *= strength;
            a2[i] *= strength;
        }
        d_.assign(n_, 0.0);
        l1_.assign(n_, 0.0);
        l2_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double di = a0[i];
            if (i >= 1) di -= l1_[i - 1] * l1_[i - 1] * d_[i - 1];
            if (i >= 2) di -= l2_[i - 2] * l2_[i - 2] * d_[i - 2];
            if (!(di > 0.0)) detail::fail("smoother normal matrix is not positive definite");
            d_[i] = di;
            if (i + 1 < n_) {
                double off = a1[i];
                if (i >= 1) off -= l2_[i - 1] * l1_[i - 1] * d_[i - 1];
                l1_[i] = off / di;
            }
            if (i + 2 < n_) l2_[i] = a2[i] / di;
        }
    }

    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> z(rhs.begin(), rhs.end());
        for (std::size_t i = 1; i < n_; ++i) {
            z[i] -= l1_[i - 1] * z[i - 1];
            if (i >= 2) z[i] -= l2_[i - 2] * z[i - 2];
        }
        for (std::size_t i = 0; i < n_; ++i) z[i] /= d_[i];
        for (std::size_t k = n_; k-- > 0;) {
            if (k + 1 < n_) z[k] -= l1_[k] * z[k + 1];
            if (k + 2 < n_) z[k] -= l2_[k] * z[k + 2];
        }
        return z;
    }

    /// Diagonal of the inverse matrix (Takahashi recursion).
    std::vector<double> inverse_diagonal() const {
        std::vector<double> z0(n_, 0.0), z1(n_, 0.0), z2(n_, 0.0);  // Z(i,i), Z(i,i+1), Z(i,i+2)
        for (std::size_t k = n_; k-- > 0;) {
            const double zb11 = k + 1 < n_ ? z0[k + 1] : 0.0;
            const double zb22 = k + 2 < n_ ? z0[k + 2] : 0.0;
            const double zb12 = k + 1 < n_ ? z1[k + 1] : 0.0;
            const double c1 = k + 1 < n_ ? l1_[k] : 0.0;
            const double c2 = k + 2 < n_ ? l2_[k] : 0.0;
            z2[k] = -c1 * zb12 - c2 * zb22;
            z1[k] = -c1 * zb11 - c2 * zb12;
            z0[k] = 1.0 / d_[k] - c1 * z1[k] - c2 * z2[k];
        }
        return z0;
    }

private:
    std::size_t n_;
    std::vector<double> d_, l1_, l2_;
};

struct Fit {
    std::vector<double> smoothed;
    std::vector<double> leverage;
    double strength = 0.0;
};

inline Fit fit_weighted(std::span<const double> y, std::span<const double> w, double strength) {
    PentadiagonalFactor factor(w, strength);
    std::vector<double> rhs(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) rhs[i] = w[i] * y[i];
    Fit out;
    out.smoothed = factor.solve(rhs);
    out.leverage = factor.inverse_diagonal();
    for (std::size_t i = 0; i < y.size(); ++i) out.leverage[i] *= w[i];
    out.strength = strength;
    return out;
}

/// GCV score (RSS/n) / (1 - tr(H)/n)^2 over points with positive weight.
inline double gcv_score(std::span<const double> y, std::span<const double> w, const Fit& fit) {
    double rss = 0.0, trace = 0.0, n = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const double r = y[i] - fit.smoothed[i];
        rss += w[i] * r * r;
        trace += fit.leverage[i];
        n += 1.0;
    }
    const double denom = 1.0 - trace / n;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return (rss / n) / (denom * denom);
}

inline Fit fit_gcv(std::span<const double> y, std::span<const double> w, const SmoothConfig& cfg) {
    std::optional<Fit> best;
    double best_score = std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::floor((cfg.gcv_log10_max - cfg.gcv_log10_min) / cfg.gcv_log10_step + 1e-9));
    for (int k = 0; k <= steps; ++k) {
        const double s = std::pow(10.0, cfg.gcv_log10_min + k * cfg.gcv_log10_step);
        Fit candidate = fit_weighted(y, w, s);
        const double score = gcv_score(y, w, candidate);
        if (!best || score < best_score) {
            best_score = score;
            best = std::move(candidate);
        }
    }
    return std::move(*best);
}

inline double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Bisquare weights from studentized residuals; returns false when the
/// residual scale is zero (exact fit, nothing to reweight).
inline bool bisquare_weights(std::span<const double> y, const Fit& fit, std::vector<double>& w) {
    const std::size_t n = y.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - fit.smoothed[i];
    std::vector<double> absdev(n);
    const double med = median_of(r);
    for (std::size_t i = 0; i < n; ++i) absdev[i] = std::abs(r[i] - med);
    // MAD scale, floored at the residual-variance estimate RSS/(n - tr H) so
    // that deterministic curvature residuals of a noise-free signal are not
    // treated as outliers.
    double rss = 0.0, trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rss += r[i] * r[i];
        trace += fit.leverage[i];
    }
    const double dof = static_cast<double>(n) - trace;
    const double global = dof > 0.0 ? std::sqrt(rss / dof) : 0.0;
    const double scale = std::max(1.4826 * median_of(absdev), global);
    if (!(scale > 0.0)) return false;
    constexpr double c = 4.685;
    std::vector<double> next(n);
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = std::min(fit.leverage[i], 1.0 - 1e-12);
        const double u = r[i] / (scale * std::sqrt(1.0 - h));
        const double q = u / c;
        next[i] = std::abs(q) < 1.0 ? (1.0 - q * q) * (1.0 - q * q) : 0.0;
        if (next[i] > 0.0) ++positive;
    }
    if (positive < 3) return false;
    w = std::move(next);
    return true;
}

}  // namespace whittaker

/// Robust penalized least-squares smoothing (second-difference penalty).
inline SampledSeries smooth(const SampledSeries& series, const SmoothConfig& cfg = {}) {
    if (series.empty()) detail::fail("cannot smooth an empty series");
    if (series.size() < 3) detail::fail("smoothing needs at least 3 samples");
    if (cfg.strength && !(*cfg.strength >= 0.0)) detail::fail("smoothing strength must be nonnegative");
    if (cfg.robust_iterations < 0) detail::fail("robust_iterations must be nonnegative");
    const auto y = series.values();
    std::vector<double> w(y.size(), 1.0);
    whittaker::Fit fit;
    for (int pass = 0;; ++pass) {
        fit = cfg.strength ? whittaker::fit_weighted(y, w, *cfg.strength) : whittaker::fit_gcv(y, w, cfg);
        if (pass == cfg.robust_iterations) break;
        if (!whittaker::bisquare_weights(y, fit, w)) break;
    }
    return series.with_values(std::move(fit.smoothed));
}

}  // namespace gesturedyn
