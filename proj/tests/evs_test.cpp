// Copyright 2026 The HESIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hesim/errors.hpp"
#include "hesim/evs_calib.hpp"
#include "hesim/evs_model.hpp"
#include "hesim/numerics.hpp"
#include "support.hpp"

namespace {

using namespace hesim;
using namespace hesim::evs;
using numerics::q_function;

TEST(EvsModel, AffineVoltageWithFloor) {
    const TriggerCoefficients beta{1.0, 0.5, 2.0, 0, 0, 0};
    EXPECT_DOUBLE_EQ(intensity_to_voltage(4.0, beta), 4.0);
    EXPECT_DOUBLE_EQ(intensity_to_voltage(0.0, {1.0, 0.0, 0.0, 0, 0, 0}), kVoltageFloor);
    EXPECT_THROW(intensity_to_voltage(ImagePlane(1, 1, -1.0), EvsNoiseParams::with_zero_maps(1, 1, beta, 1.0)),
                 DomainError);
}

TEST(EvsModel, VoltageNoiseCombinesShotAndDark) {
    // (0.1 * 30)^2 + 4^2 + 2 * 0.5 * 3 * 4 = 9 + 16 + 12 = 37.
    EXPECT_DOUBLE_EQ(voltage_noise_sigma(30.0, {1, 0, 0, 0.1, 4.0, 0.5}), std::sqrt(37.0));
    // Perfect anti-correlation cancels equal terms.
    EXPECT_NEAR(voltage_noise_sigma(30.0, {1, 0, 0, 0.1, 3.0, -1.0}), 0.0, 1e-12);
    EXPECT_THROW(voltage_noise_sigma(1.0, {1, 0, 0, 1, 1, 1.01}), ParameterError);
}

TEST(EvsModel, NoiseMomentsScaleWithInverseVoltages) {
    const TriggerCoefficients beta{1, 0, 0, 0, 3.0, 0};
    const auto m = noise_moments(2.0, 4.0, 0.0, 0.8, beta);
    EXPECT_DOUBLE_EQ(m.mu, 0.8 * (0.25 - 0.5));
    EXPECT_DOUBLE_EQ(m.sigma, 3.0 * std::sqrt(1.0 / 16.0 + 1.0 / 4.0));
    EXPECT_THROW(noise_moments(0.0, 1.0, 0.0, 0.0, beta), DomainError);
}

TEST(EvsModel, TriggerProbabilitiesAreGaussianTails) {
    const auto p = trigger_probabilities(0.1, 0.05, 0.4, 0.3);
    EXPECT_DOUBLE_EQ(p.p_plus, q_function((0.3 - 0.15) / 0.4));
    EXPECT_DOUBLE_EQ(p.p_minus, q_function((0.3 + 0.15) / 0.4));
    const auto det = trigger_probabilities(0.5, 0.0, 0.0, 0.3);
    EXPECT_EQ(det.p_plus, 1.0);
    EXPECT_EQ(det.p_minus, 0.0);
    const auto quiet = trigger_probabilities(0.2, 0.0, 0.0, 0.3);
    EXPECT_EQ(quiet.p_plus + quiet.p_minus, 0.0);
    EXPECT_THROW(trigger_probabilities(0, 0, 1, 0), DomainError);
    EXPECT_THROW(trigger_probabilities(0, 0, -1, 1), DomainError);
}

TEST(EvsModel, StepEventsDeterministicResponse) {
    // sigma = 0: log ratio ln 2 > 0.5 fires ON everywhere, ln(1/2) fires OFF.
    auto params = EvsNoiseParams::with_zero_maps(3, 2, {1, 1, 0, 0, 0, 0}, 0.5);
    const ImagePlane dim(3, 2, 10.0);
    const ImagePlane bright(3, 2, 20.0);
    const auto vd = intensity_to_voltage(dim, params);
    const auto vb = intensity_to_voltage(bright, params);
    std::vector<std::uint8_t> fired;
    const auto up = step_events(vd, vb, bright, params, 0.5, 99, {1, 0, 0, 0}, 1, &fired);
    ASSERT_EQ(up.size(), 6u);
    EXPECT_TRUE(is_canonical(up));
    for (const auto& e : up) {
        EXPECT_EQ(e.polarity, 1);
        EXPECT_EQ(e.t, 99u);
    }
    EXPECT_EQ(fired, std::vector<std::uint8_t>(6, 1));
    const auto down = step_events(vb, vd, dim, params, 0.5, 5, {1, 0, 0, 0});
    ASSERT_EQ(down.size(), 6u);
    for (const auto& e : down) EXPECT_EQ(e.polarity, -1);
    // Below threshold: ln 1.5 < 0.5.
    EXPECT_TRUE(step_events(vd, intensity_to_voltage(ImagePlane(3, 2, 15.0), params), dim, params, 0.5, 0, {}).empty());
}

TEST(EvsModel, MaskedPixelsNeverFire) {
    auto params = EvsNoiseParams::with_zero_maps(2, 2, {1, 1, 0, 0, 0, 0}, 0.5);
    params.bad_pixel_mask.set(1, 0);
    const auto v1 = intensity_to_voltage(ImagePlane(2, 2, 1.0), params);
    const auto v2 = intensity_to_voltage(ImagePlane(2, 2, 3.0), params);
    const auto ev = step_events(v1, v2, ImagePlane(2, 2, 3.0), params, 0.5, 0, {});
    ASSERT_EQ(ev.size(), 3u);
    for (const auto& e : ev) EXPECT_FALSE(e.x == 1 && e.y == 0);
}

TEST(EvsModel, StepEventsIndependentOfThreads) {
    auto params = EvsNoiseParams::with_zero_maps(40, 30, {1, 0.01, 1, 0.001, 0.3, 0.1}, 0.4);
    ImagePlane a(40, 30);
    ImagePlane b(40, 30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<double>(i % 97);
        b[i] = static_cast<double>((i * 7) % 89);
    }
    const auto va = intensity_to_voltage(a, params);
    const auto vb = intensity_to_voltage(b, params);
    const auto one = step_events(va, vb, b, params, 0.4, 1, {9, 2, 0, 0}, 1);
    const auto many = step_events(va, vb, b, params, 0.4, 1, {9, 2, 0, 0}, 6);
    EXPECT_FALSE(one.empty());
    EXPECT_EQ(one, many);
}

TEST(EvsModel, StaticSceneFrequencyMatchesQ) {
    // v = 1: sigma_n = b4 sqrt 2 = 0.3, theta = 0.45 -> P = Q(1.5) per polarity.
    const double b4 = 0.3 / std::numbers::sqrt2;
    const auto params = EvsNoiseParams::with_zero_maps(16, 16, {1, 0, 1, 0, b4, 0}, 0.45);
    const std::uint64_t trials = 4000;
    const auto counts = test_support::count_static_events(ImagePlane(16, 16, 50.0), params, trials, 3);
    double on = 0;
    double off = 0;
    for (std::size_t i = 0; i < counts.on.size(); ++i) {
        on += static_cast<double>(counts.on[i]);
        off += static_cast<double>(counts.off[i]);
    }
    const double n = 256.0 * trials;
    const double p = q_function(1.5);
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(on / n, p, 4 * se);
    EXPECT_NEAR(off / n, p, 4 * se);
}

TEST(EvsCalib, CountEvents) {
    const std::vector<EventRecord> ev{{0, 0, 0, 1}, {1, 0, 0, -1}, {1, 1, 0, 1}, {2, 0, 0, 1}};
    const auto obs = count_events(ev, ImagePlane(2, 1, {5.0, 6.0}), 10);
    ASSERT_EQ(obs.size(), 2u);
    EXPECT_EQ(obs[0].n_plus, 2u);
    EXPECT_EQ(obs[0].n_minus, 1u);
    EXPECT_EQ(obs[1].n_plus, 1u);
    EXPECT_DOUBLE_EQ(obs[1].i_c, 6.0);
    EXPECT_THROW(count_events(ev, ImagePlane(2, 1), 1), InsufficientDataError);
    EXPECT_THROW(count_events(ev, ImagePlane(1, 1), 10), LayoutError);
    EXPECT_THROW(count_events(ev, ImagePlane(2, 1), 0), ParameterError);
}

TEST(EvsCalib, ClippedFrequency) {
    EXPECT_DOUBLE_EQ(clipped_frequency(0, 100), 0.005);
    EXPECT_DOUBLE_EQ(clipped_frequency(100, 100), 0.995);
    EXPECT_DOUBLE_EQ(clipped_frequency(30, 100), 0.3);
}

TEST(EvsCalib, ModelCurveFormula) {
    const TriggerCoefficients beta{2.0, 0.1, 1.0, 0.01, 0.5, 0.0};
    // sigma_v at I = 10: sqrt(0.1^2 + 0.5^2) = sqrt(0.26); numerator 0.75 * 2 * 2.
    EXPECT_NEAR(evs_model_curve(10.0, beta, 0.75), 3.0 / (std::numbers::sqrt2 * std::sqrt(0.26)), 1e-12);
}

TEST(EvsCalib, ObservedProbitAveragesPolarities) {
    const EventCountObservation o{0, 0, 1.0, 1000, 30, 10};
    EXPECT_NEAR(observed_probit(o), numerics::q_inverse(0.02), 1e-12);
}

TEST(EvsCalib, MuOffsetsFromExactProbabilities) {
    // theta = 1, sigma = 0.5, mu = 0.2 -> P+ = Q(1.6), P- = Q(2.4).
    const std::uint64_t n = 100'000'000;
    const auto count = [&](double p) { return static_cast<std::uint64_t>(std::llround(p * static_cast<double>(n))); };
    std::vector<EventCountObservation> obs{
        {0, 0, 0.0, n, count(q_function(1.6)), count(q_function(2.4))},
        {1, 0, 0.0, n, 500, 500},
        {0, 1, 0.0, n, 0, 0},
        {1, 1, 0.0, n, count(q_function(2.4)), count(q_function(1.6))},
    };
    const auto est = estimate_mu_offsets(obs, 2, 2, 1.0);
    EXPECT_NEAR(est.mu_n.at(0, 0), 0.2, 1e-4);
    EXPECT_NEAR(est.sigma_n.at(0, 0), 0.5, 1e-4);
    EXPECT_NEAR(est.mu_n.at(1, 1), -0.2, 1e-4);
    EXPECT_EQ(est.mu_n.at(1, 0), 0.0);
    EXPECT_FALSE(est.low_confidence.at(1, 0));
    EXPECT_TRUE(est.low_confidence.at(0, 1));
    EXPECT_EQ(est.mu_n.at(0, 1), 0.0);
}

TEST(EvsCalib, MuOffsetsNeedFullCoverageAndTrials) {
    std::vector<EventCountObservation> obs{{0, 0, 0.0, 1000, 5, 5}};
    EXPECT_THROW(estimate_mu_offsets(obs, 2, 1, 1.0), InsufficientDataError);
    obs[0].n_trials = 50;
    EXPECT_THROW(estimate_mu_offsets(obs, 1, 1, 1.0), InsufficientDataError);
    EXPECT_THROW(estimate_mu_offsets(obs, 1, 1, 0.0), ParameterError);
}

std::vector<EventCountObservation> exact_observations(const TriggerCoefficients& beta, double theta_hw,
                                                      std::uint64_t trials, double jitter = 0.0) {
    std::vector<EventCountObservation> obs;
    for (std::size_t l = 0; l < 12; ++l) {
        const double i = 80.0 * static_cast<double>(l);
        // Optional deterministic +-jitter relative spread so robust statistics are non-degenerate.
        const double p = q_function(evs_model_curve(i, beta, theta_hw)) * (1.0 + jitter * (static_cast<double>(l % 3) - 1.0));
        const auto k = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(trials)));
        obs.push_back({l, 0, i, trials, k, k});
    }
    return obs;
}

TEST(EvsCalib, FitRecoversNoiseFreeCurve) {
    const TriggerCoefficients truth{1.0, 0.002, 1.0, 0.003, 0.25, 0.2};
    const auto obs = exact_observations(truth, 0.75, 100'000'000);
    const auto fit = fit_evs_params(obs);
    EXPECT_TRUE(fit.diagnostics.converged);
    EXPECT_LT(fit.diagnostics.rmse, 2e-3);
    ASSERT_EQ(fit.diagnostics.levels.size(), 12u);
    for (double i = 0.0; i <= 880.0; i += 20.0) {
        EXPECT_NEAR(evs_model_curve(i, fit.beta, 0.75), evs_model_curve(i, truth, 0.75), 5e-3) << i;
    }
    // The fitted correlation stays physical.
    EXPECT_LE(std::abs(fit.beta[5]), 1.0);
    EXPECT_GE(fit.beta[1], 0.0);
}

TEST(EvsCalib, FitRejectsDegenerateData) {
    std::vector<EventCountObservation> one_level(6, EventCountObservation{0, 0, 5.0, 5000, 10, 10});
    EXPECT_THROW(fit_evs_params(one_level), RankError);
    auto few = exact_observations({1, 0.002, 1, 0.003, 0.25, 0.2}, 0.75, 5000);
    few.resize(4);
    EXPECT_THROW(fit_evs_params(few), InsufficientDataError);
    auto short_runs = exact_observations({1, 0.002, 1, 0.003, 0.25, 0.2}, 0.75, 500);
    for (auto& o : short_runs) o.n_plus = o.n_minus = 0;
    EXPECT_THROW(fit_evs_params(short_runs), InsufficientDataError);
}

TEST(EvsCalib, BadPixelMaskFlagsOutliers) {
    const TriggerCoefficients beta{1.0, 0.002, 1.0, 0.003, 0.25, 0.2};
    auto obs = exact_observations(beta, 0.75, 1'000'000, 0.01);
    obs[3].n_plus = obs[3].n_minus = 200'000;  // far hotter than the model
    ImagePlane mu(12, 1);
    for (std::size_t i = 0; i < 12; ++i) mu[i] = 0.001 * static_cast<double>(i % 3);
    mu[7] = 0.5;
    const auto mask = build_bad_pixel_mask(obs, beta, 0.75, mu, 5.0);
    EXPECT_TRUE(mask.at(3, 0));
    EXPECT_TRUE(mask.at(7, 0));
    EXPECT_EQ(mask.count(), 2u);
    EXPECT_EQ(build_bad_pixel_mask(obs, beta, 0.75, mu, std::numeric_limits<double>::infinity()).count(), 0u);
    EXPECT_THROW(build_bad_pixel_mask(obs, beta, 0.75, mu, 0.0), ParameterError);
}

}  // namespace
