#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"

namespace gd = gesturedyn;
using namespace testing_support;

TEST(LipAperture, CoincidentPointsGiveZero) {
    gd::PointSeries ul{{{0, 0, 0}}, 0.01}, ll{{{0, 0, 0}}, 0.01};
    EXPECT_EQ(gd::lip_aperture(ul, ll)[0], 0.0);
}

TEST(LipAperture, ThreeFourFive) {
    gd::PointSeries ul{{{0, 0, 0}}, 0.01}, ll{{{3, 4, 0}}, 0.01};
    const auto la = gd::lip_aperture(ul, ll);
    EXPECT_EQ(la[0], 5.0);
    EXPECT_EQ(la.unit(), "mm");
}

TEST(LipAperture, TenSamplesMatchHandComputedNorms) {
    gd::PointSeries ul{{}, 0.005}, ll{{}, 0.005};
    std::vector<double> expected;
    for (int i = 0; i < 10; ++i) {
        const double dx = 1.0 + i, dy = -2.0 * i, dz = 0.5;
        ul.points.push_back({10.0, 20.0 + i, -3.0});
        ll.points.push_back({10.0 + dx, 20.0 + i + dy, -3.0 + dz});
        expected.push_back(std::sqrt(dx * dx + dy * dy + dz * dz));
    }
    const auto la = gd::lip_aperture(ul, ll);
    ASSERT_EQ(la.size(), 10u);
    EXPECT_DOUBLE_EQ(la.dt(), 0.005);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(la[i], expected[i], 1e-14 * expected[i]);
        EXPECT_GE(la[i], 0.0);
    }
}

TEST(LipAperture, RejectsMismatchedOrNonFiniteInput) {
    gd::PointSeries ul{{{0, 0, 0}, {0, 0, 0}}, 0.01}, ll{{{1, 0, 0}}, 0.01};
    EXPECT_THROW(gd::lip_aperture(ul, ll), gd::error);
    gd::PointSeries bad{{{NAN, 0, 0}}, 0.01}, one{{{1, 0, 0}}, 0.01};
    EXPECT_THROW(gd::lip_aperture(bad, one), gd::error);
    gd::PointSeries other_dt{{{1, 0, 0}}, 0.02};
    EXPECT_THROW(gd::lip_aperture(one, other_dt), gd::error);
}

TEST(SampledSeries, RejectsBadConstruction) {
    EXPECT_THROW(gd::SampledSeries({1.0, NAN}, 0.01), gd::error);
    EXPECT_THROW(gd::SampledSeries({1.0, INFINITY}, 0.01), gd::error);
    EXPECT_THROW(gd::SampledSeries({1.0}, 0.0), gd::error);
    EXPECT_THROW(gd::SampledSeries({1.0}, -0.01), gd::error);
}

TEST(Smooth, ConstantSeriesUnchanged) {
    const auto out = gd::smooth(series({5, 5, 5, 5, 5}));
    for (double v : out.values()) EXPECT_NEAR(v, 5.0, 1e-12);
}

TEST(Smooth, StraightLineUnchanged) {
    std::vector<double> line;
    for (int i = 0; i < 60; ++i) line.push_back(3.0 - 0.25 * i);
    for (double strength : {1e-2, 1.0, 1e4}) {
        gd::SmoothConfig cfg;
        cfg.strength = strength;
        const auto out = gd::smooth(series(line), cfg);
        EXPECT_LT(max_abs_diff(out.values(), line), 1e-9) << strength;
    }
    EXPECT_LT(max_abs_diff(gd::smooth(series(line)).values(), line), 1e-9);
}

TEST(Smooth, NoisySineMovesTowardCleanSignal) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> clean, noisy;
    for (int i = 0; i < 300; ++i) {
        clean.push_back(std::sin(2.0 * std::numbers::pi * i / 100.0));
        noisy.push_back(clean.back() + noise(rng));
    }
    const auto out = gd::smooth(series(noisy));
    auto rmse = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - clean[i]) * (v[i] - clean[i]);
        return std::sqrt(s / v.size());
    };
    EXPECT_LT(rmse(out.values()), rmse(noisy));
    EXPECT_EQ(out.size(), noisy.size());
    EXPECT_EQ(out.dt(), 0.01);
}

TEST(Smooth, RobustWeightsResistASpike) {
    std::vector<double> y;
    for (int i = 0; i < 50; ++i) y.push_back(0.1 * i);
    y[25] += 20.0;
    gd::SmoothConfig robust, plain;
    robust.strength = plain.strength = 10.0;
    plain.robust_iterations = 0;
    const auto r = gd::smooth(series(y), robust);
    const auto p = gd::smooth(series(y), plain);
    EXPECT_LT(std::abs(r[25] - 2.5), std::abs(p[25] - 2.5));
    EXPECT_LT(std::abs(r[25] - 2.5), 0.5);
}

TEST(Smooth, RejectsShortInput) {
    EXPECT_THROW(gd::smooth(series({1, 2})), gd::error);
    EXPECT_THROW(gd::smooth(series({})), gd::error);
}

TEST(CentralDifference, RampHasConstantSlope) {
    std::vector<double> ramp;
    for (int i = 0; i < 10; ++i) ramp.push_back(2.0 * i);
    const auto d = gd::central_difference(series(ramp));
    for (double v : d.values()) EXPECT_EQ(v, 2.0);
    EXPECT_EQ(d.unit(), "mm/sample");
}

TEST(CentralDifference, ConstantGivesZeros) {
    const auto d = gd::central_difference(series({4, 4, 4, 4}));
    for (double v : d.values()) EXPECT_EQ(v, 0.0);
}

TEST(CentralDifference, QuadraticInteriorIsExact) {
    std::vector<double> sq;
    for (int i = 0; i < 12; ++i) sq.push_back(double(i) * i);
    const auto d = gd::central_difference(series(sq));
    for (int i = 1; i < 11; ++i) EXPECT_EQ(d[i], 2.0 * i);
    EXPECT_EQ(d[0], 1.0);
    EXPECT_EQ(d[11], 121.0 - 100.0);
}

TEST(CentralDifference, SecondDifferenceOfCubeIsSixI) {
    std::vector<double> cube;
    for (int i = 0; i < 20; ++i) cube.push_back(double(i) * i * i);
    const auto d2 = gd::central_difference(gd::central_difference(series(cube)));
    for (int i = 2; i < 18; ++i) EXPECT_EQ(d2[i], 6.0 * i);
}

TEST(CentralDifference, RejectsShortInput) { EXPECT_THROW(gd::central_difference(series({1, 2})), gd::error); }

namespace {

// |H|^2 of a bilinear-transformed Butterworth lowpass: 1 / (1 + (tan(pi f/fs) / tan(pi fc/fs))^(2N))
double analytic_gain(double f, double fc, double fs, int order) {
    const double ratio = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2 * order));
}

std::vector<double> sine(double f, double fs, std::size_t n, double phase = 0.0) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(2.0 * std::numbers::pi * f * i / fs + phase);
    return s;
}

double rms(std::span<const double> v, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += v[i] * v[i];
    return std::sqrt(s / (to - from));
}

}  // namespace

TEST(Butterworth, ConstantUnchanged) {
    const auto out = gd::butterworth_lowpass(series(std::vector<double>(64, 3.5)), 20.0);
    for (double v : out.values()) EXPECT_NEAR(v, 3.5, 1e-12);
}

TEST(Butterworth, GainAtCutoffIsHalfPower) {
    for (int order : {1, 2, 4, 5, 8}) {
        const auto sos = gd::design_butterworth_lowpass(order, 20.0, 100.0);
        EXPECT_NEAR(std::abs(gd::frequency_response(sos, 20.0, 100.0)), 1.0 / std::sqrt(2.0), 0.01 / std::sqrt(2.0));
    }
}

TEST(Butterworth, MagnitudeMatchesAnalyticResponse) {
    const auto sos = gd::design_butterworth_lowpass(5, 12.0, 100.0);
    for (double f : {0.0, 3.0, 10.0, 12.0, 15.0, 30.0, 45.0})
        EXPECT_NEAR(std::abs(gd::frequency_response(sos, f, 100.0)), analytic_gain(f, 12.0, 100.0, 5), 1e-9) << f;
}

TEST(Butterworth, SinglePassSteadyStateSineAtCutoff) {
    const auto sos = gd::design_butterworth_lowpass(5, 10.0, 100.0);
    const auto x = sine(10.0, 100.0, 4000);
    const auto y = gd::sosfilt(sos, x);
    EXPECT_NEAR(rms(y, 2000, 4000) / rms(x, 2000, 4000), 1.0 / std::sqrt(2.0), 0.01 / std::sqrt(2.0));
}

TEST(Butterworth, StopbandSineIsRemoved) {
    const double fs = 100.0, nyq = 50.0;
    const auto x = sine(0.9 * nyq, fs, 1000);
    const auto y = gd::butterworth_lowpass(series(x), 0.1 * nyq, 5);
    // odd reflection pins the endpoints to the raw data, so judge the steady-state interior
    const double ratio = rms(y.values(), 200, 800) / rms(x, 200, 800);
    const double pass_gain = 1.0 / std::sqrt(1.0 + std::pow(std::tan(0.45 * std::numbers::pi) / std::tan(0.05 * std::numbers::pi), 10));
    EXPECT_LT(ratio, 0.01);
    EXPECT_LT(ratio, 10.0 * pass_gain * pass_gain + 1e-9);
}

TEST(Butterworth, ForwardBackwardHasZeroLag) {
    const double fs = 100.0;
    const auto x = sine(2.0, fs, 600, 0.3);
    const auto y = gd::butterworth_lowpass(series(x), 20.0).vector();
    int best_lag = 99;
    double best = -1e300;
    for (int lag = -10; lag <= 10; ++lag) {
        double c = 0.0;
        for (int i = 100; i < 500; ++i) c += x[i] * y[i + lag];
        if (c > best) best = c, best_lag = lag;
    }
    EXPECT_EQ(best_lag, 0);
}

TEST(Butterworth, RejectsBadCutoffOrShortSeries) {
    const auto s = series(std::vector<double>(100, 1.0));
    EXPECT_THROW(gd::butterworth_lowpass(s, 0.0), gd::error);
    EXPECT_THROW(gd::butterworth_lowpass(s, 50.0), gd::error);
    EXPECT_THROW(gd::butterworth_lowpass(s, 60.0), gd::error);
    EXPECT_THROW(gd::butterworth_lowpass(s, 10.0, 0), gd::error);
    EXPECT_THROW(gd::butterworth_lowpass(series(std::vector<double>(18, 1.0)), 10.0), gd::error);
    EXPECT_NO_THROW(gd::butterworth_lowpass(series(std::vector<double>(19, 1.0)), 10.0));
}

TEST(Pchip, ReproducesLinearData) {
    std::vector<double> ramp;
    for (int i = 0; i < 7; ++i) ramp.push_back(1.0 + 0.5 * i);
    for (std::size_t n : {2u, 5u, 100u}) {
        const auto out = gd::resample_pchip(series(ramp), n);
        ASSERT_EQ(out.size(), n);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(out[k], 1.0 + 0.5 * 6.0 * k / (n - 1), 1e-12);
    }
}

TEST(Pchip, PreservesEndpointsAndTimeSpan) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<double> y(23);
    for (auto& v : y) v = u(rng);
    const auto out = gd::resample_pchip(series(y, 0.01), 100);
    EXPECT_EQ(out[0], y.front());
    EXPECT_EQ(out[99], y.back());
    EXPECT_NEAR(out.dt() * 99, 0.01 * 22, 1e-15);
}

TEST(Pchip, DecreasingTraceStaysMonotone) {
    std::vector<double> y;
    for (int i = 0; i < 57; ++i) y.push_back(30.0 - 8.0 / (1.0 + std::exp(-(i - 28) / 4.0)) - 0.01 * i);
    const auto out = gd::resample_pchip(series(y), 100);
    for (std::size_t k = 1; k < out.size(); ++k) EXPECT_LE(out[k], out[k - 1]);
}

TEST(Pchip, NeverOvershootsRandomData) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y(3 + trial % 20);
        for (auto& v : y) v = u(rng);
        const auto out = gd::resample_pchip(series(y), 137);
        const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
        for (double v : out.values()) {
            EXPECT_GE(v, *lo - 1e-12);
            EXPECT_LE(v, *hi + 1e-12);
        }
    }
}

TEST(Pchip, RejectsTooFewPoints) {
    EXPECT_THROW(gd::resample_pchip(series({1, 2, 3}), 1), gd::error);
    EXPECT_THROW(gd::resample_pchip(series({1}), 10), gd::error);
}

TEST(DifferentiatePipeline, RecoversAnalyticVelocityOfModelTrajectory) {
    // 1 kHz recording, r = 0.02 per sample; most of the velocity spectrum sits under 20 Hz
    const gd::GestureParams p{20.0, 0.02};
    const double x0 = 30.0, v0 = (p.target - x0) / (1000.0 / p.rapidity);
    const std::size_t n = 700;
    const auto x = gd::closed_form_state(n, x0, v0, p, 0.001);
    const auto traj = gd::differentiate_pipeline(x);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(traj.velocity()[i] - gd::closed_form_velocity_at(double(i), x0, v0, p)));
    EXPECT_LT(worst, 1e-3);
    EXPECT_EQ(traj.size(), n);
}

TEST(DifferentiatePipeline, FastMovementNeedsWiderCutoff) {
    // r = 0.036 per 1 kHz sample has velocity content near 20 Hz
    const gd::GestureParams p{20.0, 0.036};
    const double x0 = 30.0, v0 = (p.target - x0) / (1000.0 / p.rapidity);
    const std::size_t n = 400;
    const auto x = gd::closed_form_state(n, x0, v0, p, 0.001);
    auto worst_error = [&](double cutoff) {
        gd::FilterConfig f;
        f.velocity_cutoff_hz = cutoff;
        f.acceleration_cutoff_hz = cutoff;
        const auto traj = gd::differentiate_pipeline(x, {}, f);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(traj.velocity()[i] - gd::closed_form_velocity_at(double(i), x0, v0, p)));
        return worst;
    };
    const double narrow = worst_error(20.0), wide = worst_error(40.0);
    EXPECT_LT(wide, 1e-3);
    EXPECT_LT(wide, narrow);
}

TEST(DifferentiatePipeline, ConstantStateHasNoMotion) {
    const auto traj = gd::differentiate_pipeline(series(std::vector<double>(80, 12.0)));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        EXPECT_NEAR(traj.velocity()[i], 0.0, 1e-12);
        EXPECT_NEAR(traj.acceleration()[i], 0.0, 1e-12);
    }
}

TEST(DifferentiatePipeline, RejectsLengthTwo) {
    EXPECT_THROW(gd::differentiate_pipeline(series({1.0, 2.0})), gd::error);
}
