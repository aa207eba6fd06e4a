#pragma once

// Descriptive statistics, least squares, R^2 and rank correlation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "gesturedyn/error.hpp"

namespace gesturedyn {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample sd (n - 1); 0 when undefined
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    bool sd_defined = false;
};

inline Summary describe(std::span<const double> values) {
    if (values.empty()) detail::fail("cannot describe an empty sample");
    Summary s;
    s.n = values.size();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    // summed in sorted order so the result does not depend on input order
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = s.n % 2 == 1 ? sorted[s.n / 2] : 0.5 * (sorted[s.n / 2 - 1] + sorted[s.n / 2]);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
        s.sd_defined = true;
    }
    return s;
}

/// 1 - SS_res/SS_tot. When SS_tot is zero: 1 if SS_res is also zero, else 0.
inline double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size()) detail::fail("r_squared: length mismatch");
    if (observed.size() < 2) detail::fail("r_squared needs at least 2 samples");
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        ss_tot += (observed[i] - mean) * (observed[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

inline LinearFit linear_regression(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (ys.size() != n) detail::fail("linear_regression: length mismatch");
    if (n < 2) detail::fail("linear_regression needs at least 2 points");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) detail::fail("linear_regression: all abscissae are equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    std::vector<double> pred(n);
    for (std::size_t i = 0; i < n; ++i) pred[i] = fit.intercept + fit.slope * xs[i];
    fit.r_squared = r_squared(ys, pred);
    return fit;
}

/// Ranks starting at 1; ties receive the average of their positions.
inline std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (ys.size() != n) detail::fail("pearson: length mismatch");
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) detail::fail("correlation of a constant vector is undefined");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct Correlation {
    double rho = 0.0;
    double p_value = 1.0;  // two-sided, t approximation with n - 2 df
    std::size_t n = 0;
};

/// Two-sided p for a correlation coefficient via t = rho sqrt((n-2)/(1-rho^2)).
inline double correlation_p_value(double rho, std::size_t n) {
    if (n < 3) detail::fail("p-value needs at least 3 pairs");
    if (std::abs(rho) >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = std::abs(rho) * std::sqrt(df / (1.0 - rho * rho));
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

inline Correlation spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) detail::fail("spearman: length mismatch");
    if (xs.size() < 3) detail::fail("spearman needs at least 3 pairs");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    Correlation c;
    c.n = xs.size();
    c.rho = pearson(rx, ry);
    c.p_value = correlation_p_value(c.rho, c.n);
    return c;
}

/// Exact two-sided permutation p-value for Spearman's rho (n <= 10).
inline double spearman_permutation_p(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n > 10) detail::fail("exact permutation p-value is limited to n <= 10");
    const double observed = std::abs(spearman(xs, ys).rho);
    const auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    std::sort(ry.begin(), ry.end());
    std::size_t extreme = 0, total = 0;
    do {
        ++total;
        if (std::abs(pearson(rx, ry)) >= observed - 1e-12) ++extreme;
    } while (std::next_permutation(ry.begin(), ry.end()));
    // next_permutation visits distinct arrangements only; tied ranks have
    // equal multiplicity in every arrangement so the ratio is unaffected.
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace gesturedyn
