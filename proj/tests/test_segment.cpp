#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace gd = gesturedyn;
using namespace testing_support;

TEST(FindVelocityPeak, UniqueMaximumMagnitude) {
    const auto pk = gd::find_velocity_peak(series({0, -1, -3, -2}), {0, 3});
    EXPECT_EQ(pk.index, 2u);
    EXPECT_EQ(pk.value, -3.0);
}

TEST(FindVelocityPeak, TiesGoToEarliest) {
    const auto pk = gd::find_velocity_peak(series({-2, -2}), {0, 1});
    EXPECT_EQ(pk.index, 0u);
    EXPECT_EQ(pk.value, -2.0);
}

TEST(FindVelocityPeak, ParabolaPeaksAtFifty) {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(-(2500.0 - (i - 50.0) * (i - 50.0)) / 2500.0);
    const auto pk = gd::find_velocity_peak(series(v), {0, 99});
    EXPECT_EQ(pk.index, 50u);
    EXPECT_EQ(pk.value, -1.0);
}

TEST(FindVelocityPeak, RejectsEmptyWindow) {
    EXPECT_THROW(gd::find_velocity_peak(series({1, 2, 3}), {2, 1}), gd::error);
    EXPECT_THROW(gd::find_velocity_peak(series({1, 2, 3}), {0, 3}), gd::error);
}

TEST(ParseMovement, HandExample) {
    const auto w = gd::parse_movement(series({0, -1, -3, -6, -10, -9, -5, -2.5, -1.9, -0.5}), {0, 9}, 0.2);
    EXPECT_EQ(w.first, 2u);
    EXPECT_EQ(w.last, 7u);
}

TEST(ParseMovement, AllAboveThresholdSpansWindow) {
    const auto w = gd::parse_movement(series({0.1, -5, -6, -7, -6, -5, 0.1}), {1, 5}, 0.2);
    EXPECT_EQ(w.first, 1u);
    EXPECT_EQ(w.last, 5u);
}

TEST(ParseMovement, RejectsZeroVelocityAndBadThreshold) {
    EXPECT_THROW(gd::parse_movement(series({0, 0, 0, 0}), {0, 3}), gd::error);
    EXPECT_THROW(gd::parse_movement(series({0, 1, 0}), {0, 2}, 0.0), gd::error);
    EXPECT_THROW(gd::parse_movement(series({0, 1, 0}), {0, 2}, 1.0), gd::error);
}

TEST(ParseMovement, BoundariesMeetThreshold) {
    std::vector<double> v;
    for (int i = 0; i < 80; ++i) v.push_back(-std::exp(-0.5 * std::pow((i - 33) / 7.0, 2)) * (1.0 + 0.2 * std::sin(i)));
    for (double thr : {0.1, 0.2, 0.35}) {
        const auto s = series(v);
        const auto w = gd::parse_movement(s, {0, 79}, thr);
        const double peak = std::abs(gd::find_velocity_peak(s, {0, 79}).value);
        EXPECT_GE(std::abs(v[w.first]), thr * peak);
        EXPECT_GE(std::abs(v[w.last]), thr * peak);
        if (w.last + 1 < v.size()) EXPECT_LT(std::abs(v[w.last + 1]), thr * peak);
        const auto again = gd::parse_movement(s, {0, 79}, thr);
        EXPECT_EQ(again.first, w.first);
        EXPECT_EQ(again.last, w.last);
    }
}

TEST(ExtractTarget, FirstLocalMinimumAfterOffset) {
    const auto x = series({25.0, 24.0, 23.4, 23.5});
    const auto v = series({-2.5, -1.9, -0.5, -0.7});
    EXPECT_EQ(gd::extract_target(x, v, 0), 23.4);
}

TEST(ExtractTarget, ExactZeroVelocity) {
    const auto x = series({25.0, 24.0, 23.0, 22.9, 22.9});
    const auto v = series({-2.0, -1.0, 0.0, 0.0, 0.3});
    EXPECT_EQ(gd::extract_target(x, v, 0), 23.0);
}

TEST(ExtractTarget, DecreasingToTheEnd) {
    const auto x = series({25.0, 24.0, 23.5, 23.2});
    const auto v = series({-2.0, -1.0, -0.5, -0.2});
    EXPECT_EQ(gd::extract_target(x, v, 0), 23.2);
}

TEST(ExtractTarget, RejectsOffsetAtEnd) {
    EXPECT_THROW(gd::extract_target(series({1, 2}), series({1, 1}), 1), gd::error);
}

TEST(CheckMonotonic, SignRules) {
    EXPECT_TRUE(gd::check_monotonic(series({-1, -2, -1}), 0, 2));
    EXPECT_FALSE(gd::check_monotonic(series({-1, 0.5, -1}), 0, 2));
    EXPECT_FALSE(gd::check_monotonic(series({-1, 0, -1}), 0, 2));
    EXPECT_TRUE(gd::check_monotonic(series({5, -1, -2, -1, 5}), 1, 3));
}

TEST(LambdaSeries, HandSubstitution) {
    auto tok = manual_token({30, 29, 28}, {-2, -2, -2}, {0, 0, 0}, 20.0);
    const auto lam = gd::lambda_series(tok, 20.0);
    EXPECT_EQ(lam.values[0], 5.0);
    EXPECT_EQ(lam.values.size(), 3u);
}

TEST(LambdaSeries, ConstantLambdaTrajectory) {
    std::vector<double> x, v, a;
    for (int i = 0; i < 30; ++i) {
        x.push_back(20.0 + 10.0 * std::exp(-i / 4.0));
        v.push_back((20.0 - x.back()) / 4.0);
        a.push_back(-v.back() / 4.0);
    }
    const auto lam = gd::lambda_series(manual_token(x, v, a, 20.0), 20.0);
    for (double l : lam.values) EXPECT_NEAR(l, 4.0, 1e-12);
}

TEST(LambdaSeries, ClosedFormDecaysExponentially) {
    const gd::GestureParams p{22.82, 0.36};
    const double x0 = 30.0, v0 = -0.02;
    std::vector<double> x, v, a;
    for (int i = 0; i < 18; ++i) {
        x.push_back(gd::closed_form_at(i, x0, v0, p));
        v.push_back(gd::closed_form_velocity_at(i, x0, v0, p));
        a.push_back(gd::accel_eq5(x.back(), v.back(), p));
    }
    const auto lam = gd::lambda_series(manual_token(x, v, a, p.target), p.target);
    const double lambda0 = (p.target - x0) / v0;
    for (int i = 0; i < 18; ++i) {
        const double expected = lambda0 * std::exp(-0.36 * i);
        EXPECT_NEAR(lam.values[i], expected, 1e-9 * expected) << i;
    }
}

TEST(LambdaSeries, RejectsFlaggedOrSingularTokens) {
    auto tok = manual_token({30, 29, 28}, {-2, 0, -2}, {0, 0, 0}, 20.0);
    EXPECT_THROW(gd::lambda_series(tok, 20.0), gd::error);
    tok = manual_token({30, 29, 28}, {-2, -2, -2}, {0, 0, 0}, 20.0);
    tok.flags.non_monotonic = true;
    EXPECT_THROW(gd::lambda_series(tok, 20.0), gd::error);
    tok.flags.non_monotonic = false;
    EXPECT_THROW(gd::lambda_series(tok, 29.5), gd::error);  // target not beyond the movement
}

TEST(LambdaSeries, PositiveWheneverTargetLiesBeyond) {
    std::vector<double> x, v, a;
    for (int i = 0; i < 12; ++i) {
        x.push_back(30.0 - i * 0.7 - 0.02 * i * i);
        v.push_back(-0.7 - 0.04 * i);
        a.push_back(-0.04);
    }
    const auto tok = manual_token(x, v, a, x.back());
    for (double beyond : {0.0, 0.01, 3.0}) {
        EXPECT_TRUE(gd::check_monotonic(tok.trajectory.velocity(), tok.onset, tok.offset));
        const auto lam = gd::lambda_series(tok, x.back() - beyond - (beyond == 0.0 ? 1e-6 : 0.0));
        for (double l : lam.values) EXPECT_GT(l, 0.0);
        EXPECT_EQ(lam.values.size(), tok.window_length());
    }
}

TEST(LnLambdaFit, ExactExponential) {
    gd::LambdaSeries s;
    for (int i = 0; i < 15; ++i) {
        s.values.push_back(20.0 * std::exp(-0.36 * i));
        s.ln_values.push_back(std::log(s.values.back()));
    }
    const auto f = gd::ln_lambda_fit(s);
    EXPECT_NEAR(f.slope, -0.36, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(20.0), 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(LnLambdaFit, ConstantLambdaUsesDegenerateRule) {
    gd::LambdaSeries s{{3, 3, 3, 3}, {std::log(3.0), std::log(3.0), std::log(3.0), std::log(3.0)}};
    const auto f = gd::ln_lambda_fit(s);
    EXPECT_EQ(f.slope, 0.0);
    EXPECT_EQ(f.r_squared, 1.0);
}

TEST(LnLambdaFit, RejectsNonPositiveOrShort) {
    EXPECT_THROW(gd::ln_lambda_fit({{1, 0, 1}, {0, 0, 0}}), gd::error);
    EXPECT_THROW(gd::ln_lambda_fit({{1, 2}, {0, 1}}), gd::error);
}

TEST(LnLambdaFit, NoiselessModelTokensGiveMinusR) {
    for (double r : {0.15, 0.36, 0.6}) {
        const auto tok = gd::generate_token(exact_spec(22.0, r), "t").token;
        const auto f = gd::ln_lambda_fit(gd::lambda_series(tok, 22.0));
        EXPECT_NEAR(f.slope, -r, 1e-6);
    }
}

// Realistic noise level: the ln(lambda) fit remains near-linear on average
// (reference corpus value 0.97).
TEST(LnLambdaFit, NoisyCorpusMeanRSquared) {
    gd::SweepGrid g;
    g.rapidity = {0.25, 0.36, 0.5};
    g.displacement = {5.0, 8.0, 11.0};
    g.noise_sd = {0.05};
    g.seeds = {1, 2, 3, 4};
    double sum = 0.0;
    int n = 0;
    for (const auto& st : gd::sweep(g, 4)) {
        if (st.token.flags.non_monotonic) continue;
        sum += gd::ln_lambda_fit(gd::lambda_series(st.token, st.token.t_obs)).r_squared;
        ++n;
    }
    ASSERT_GT(n, 30);
    EXPECT_GE(sum / n, 0.95);
}

TEST(SegmentToken, FlagsSignChangeAndMultiplePeaks) {
    std::vector<double> v{0, 0.5, 1.0, 0.6, -0.4, -1.0, -3.0, -1.0, -2.0, -0.1, 0, 0};
    std::vector<double> x(v.size(), 30.0), a(v.size());
    for (std::size_t i = 1; i < v.size(); ++i) x[i] = x[i - 1] + v[i];
    for (std::size_t i = 1; i + 1 < v.size(); ++i) a[i] = (v[i + 1] - v[i - 1]) / 2;
    const auto tok = gd::segment_token("x", exact_trajectory(x, v, a));
    EXPECT_TRUE(tok.flags.non_monotonic);
    EXPECT_TRUE(tok.flags.multi_peak_velocity);
    EXPECT_LT(tok.onset, tok.offset);
}
