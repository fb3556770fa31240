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
#include <vector>

#include <gtest/gtest.h>

#include "hesim/aps_calib.hpp"
#include "hesim/aps_model.hpp"
#include "hesim/cfa.hpp"
#include "hesim/errors.hpp"
#include "hesim/fixture.hpp"
#include "hesim/frame_stack.hpp"

namespace {

using namespace hesim;
using namespace hesim::aps;

TEST(ApsVariance, PolynomialTerms) {
    // 1 + 2 I + 3 dt + 4 I^2 + 5 I dt + 6 dt^2 at I = 2, dt = 3:
    // 1 + 4 + 9 + 16 + 30 + 54 = 114.
    EXPECT_DOUBLE_EQ(evaluate_variance({1, 2, 3, 4, 5, 6}, 2.0, 3.0), 114.0);
    // Negative polynomial values are clamped to zero.
    EXPECT_DOUBLE_EQ(evaluate_variance({-5, 0, 0, 0, 0, 0}, 1.0, 1.0), 0.0);
}

TEST(ApsVariance, QueryValidation) {
    const auto cfa = CfaLayout::preset("bayer");
    auto params = ApsNoiseParams::zero(4, 4, cfa.position_count(), 10);
    params.beta_a[2] = {3, 1, 0, 0, 0, 0};
    EXPECT_DOUBLE_EQ(aps_variance({10.0, 5.0, 2}, params), 13.0);
    EXPECT_THROW(aps_variance({-1.0, 5.0, 0}, params), DomainError);
    EXPECT_THROW(aps_variance({1.0, 0.0, 0}, params), DomainError);
    EXPECT_THROW(aps_variance({1.0, 1.0, 4}, params), ParameterError);
}

TEST(SynthesizeRaw, NoiseFreeIsCleanPlusFixedPatternRounded) {
    const auto cfa = CfaLayout::preset("bayer");
    auto params = ApsNoiseParams::zero(4, 2, cfa.position_count(), 10);
    params.n_row = {10.0, 20.0};
    params.n_blc.at(1, 0) = 2.4;
    params.n_dp.at(3, 1) = 0.5;
    ImagePlane clean(4, 2, 100.0);
    clean.at(0, 0) = 2000.0;  // saturates at 1023
    const auto raw = synthesize_raw(clean, 4.0, params, cfa, {1, 0, 0, 0});
    EXPECT_EQ(raw.exposure_us, 4000u);
    EXPECT_EQ(raw.bit_depth, 10);
    EXPECT_EQ(raw.at(0, 0), 1023);
    EXPECT_EQ(raw.at(1, 0), 112);  // 100 + 10 + 2.4
    EXPECT_EQ(raw.at(2, 0), 110);
    EXPECT_EQ(raw.at(3, 1), 122);  // 100 + 20 + 4 * 0.5
}

TEST(SynthesizeRaw, NoiseVarianceFollowsModel) {
    const auto cfa = CfaLayout::preset("bayer");
    auto params = ApsNoiseParams::zero(64, 64, cfa.position_count(), 12);
    for (auto& b : params.beta_a) b = {4.0, 0.5, 0, 0, 0, 0};  // variance 4 + 0.5 * 200 = 104
    const ImagePlane clean(64, 64, 200.0);
    double sum = 0.0;
    double sum2 = 0.0;
    std::size_t n = 0;
    for (std::uint64_t f = 0; f < 20; ++f) {
        const auto raw = synthesize_raw(clean, 1.0, params, cfa, {3, f, 0, 0});
        for (auto v : raw.data) {
            sum += v;
            sum2 += static_cast<double>(v) * v;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - mean * mean;
    EXPECT_NEAR(mean, 200.0, 4.0 * std::sqrt(104.0 / static_cast<double>(n)));
    // Rounding adds 1/12; SE of the variance is var sqrt(2/n).
    EXPECT_NEAR(var, 104.0 + 1.0 / 12.0, 4.0 * 104.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST(SynthesizeRaw, IndependentOfThreadCount) {
    const auto cfa = CfaLayout::preset("quad_bayer");
    const auto params = fixture::aps_truth(cfa, 32, 32, 12, 4);
    const auto clean = ImagePlane(32, 32, 300.0);
    EXPECT_EQ(synthesize_raw(clean, 7.0, params, cfa, {5, 1, 0, 0}, 1),
              synthesize_raw(clean, 7.0, params, cfa, {5, 1, 0, 0}, 7));
}

TEST(SynthesizeRaw, RejectsMismatchedMaps) {
    const auto cfa = CfaLayout::preset("bayer");
    const auto params = ApsNoiseParams::zero(4, 4, cfa.position_count(), 10);
    EXPECT_THROW(synthesize_raw(ImagePlane(6, 4), 1.0, params, cfa, {}), LayoutError);
    EXPECT_THROW(synthesize_raw(ImagePlane(4, 4), 0.0, params, cfa, {}), DomainError);
}

TEST(DarkCalibration, ClosedFormRegression) {
    // Pixel 0: means 3, 5, 9 at dt 1, 2, 4 -> slope 2, intercept 1 (exact line).
    // Pixel 1: means 4, 4, 4 -> slope 0, intercept 4.
    const std::vector<double> dts{1.0, 2.0, 4.0};
    const std::vector<ImagePlane> means{ImagePlane(2, 1, {3.0, 4.0}), ImagePlane(2, 1, {5.0, 4.0}),
                                        ImagePlane(2, 1, {9.0, 4.0})};
    const auto dark = calibrate_dark_from_means(dts, means);
    EXPECT_NEAR(dark.n_dp[0], 2.0, 1e-12);
    EXPECT_NEAR(dark.n_fp[0], 1.0, 1e-12);
    EXPECT_NEAR(dark.n_dp[1], 0.0, 1e-12);
    EXPECT_NEAR(dark.n_fp[1], 4.0, 1e-12);
    // Row offset is the row mean of n_fp; n_blc is the remainder.
    EXPECT_NEAR(dark.n_row[0], 2.5, 1e-12);
    EXPECT_NEAR(dark.n_blc[0], -1.5, 1e-12);
    EXPECT_NEAR(dark.n_blc[1], 1.5, 1e-12);
    EXPECT_NEAR(dark.dark_mean(0, 0, 3.0), 7.0, 1e-12);
}

TEST(DarkCalibration, NeedsTwoDistinctExposures) {
    const std::vector<double> same{5.0, 5.0};
    const std::vector<ImagePlane> means{ImagePlane(1, 1), ImagePlane(1, 1)};
    EXPECT_THROW(calibrate_dark_from_means(same, means), RankError);
    EXPECT_THROW(calibrate_dark_from_means(std::vector<double>{}, std::vector<ImagePlane>{}), RankError);
    const std::vector<double> negative{-1.0, 5.0};
    EXPECT_THROW(calibrate_dark_from_means(negative, means), DomainError);
}

TEST(DarkCalibration, FromFrameStacks) {
    std::vector<FrameStack> stacks;
    for (double dt : {2.0, 6.0}) {
        const ImagePlane m(2, 2, 10.0 + 0.25 * dt);
        stacks.push_back({{m, m, m}, dt, true});
    }
    const auto dark = calibrate_dark(stacks, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(dark.n_dp[i], 0.25, 1e-12);
        EXPECT_NEAR(dark.n_fp[i], 10.0, 1e-12);
    }
}

TEST(VarianceCalibration, ExactPolynomialRecovery) {
    // Noise-free variance samples on a 4 x 3 grid reproduce the generating coefficients.
    const VarianceCoefficients truth{5.0, 0.3, 0.02, 2e-4, 1e-3, 3e-4};
    std::vector<VarianceSample> samples;
    for (double i : {0.0, 100.0, 400.0, 900.0}) {
        for (double dt : {1.0, 10.0, 30.0}) samples.push_back({i, dt, evaluate_variance(truth, i, dt), 0});
    }
    const auto fit = fit_variance_polynomials(samples, 1);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(fit[0][j], truth[j], 1e-9 * std::max(1.0, std::abs(truth[j]))) << j;
}

TEST(VarianceCalibration, RankChecks) {
    std::vector<VarianceSample> two_exposures;
    for (double i : {0.0, 100.0, 400.0, 900.0}) {
        for (double dt : {1.0, 10.0}) two_exposures.push_back({i, dt, 1.0, 0});
    }
    EXPECT_THROW(fit_variance_polynomials(two_exposures, 1), RankError);
    std::vector<VarianceSample> two_levels;
    for (double i : {100.0, 100.4, 400.0}) {  // 100 and 100.4 are one level
        for (double dt : {1.0, 10.0, 30.0}) two_levels.push_back({i, dt, 1.0, 0});
    }
    EXPECT_THROW(fit_variance_polynomials(two_levels, 1), RankError);
    EXPECT_THROW(fit_variance_polynomials(two_levels, 0), ParameterError);
}

TEST(VarianceCalibration, SamplesSubtractDarkAndQuantization) {
    const auto cfa = CfaLayout::preset("gen2");
    DarkCalibration dark;
    dark.n_fp = ImagePlane(4, 4, 10.0);
    dark.n_dp = ImagePlane(4, 4, 0.5);
    dark.n_blc = ImagePlane(4, 4);
    dark.n_row.assign(4, 10.0);
    StackStatistics stats{4.0, {ImagePlane(4, 4, 112.0), ImagePlane(4, 4, 0.05)}};
    stats.stats.variance.at(0, 0) = 3.0;
    const auto rows = variance_samples(stats, dark, cfa);
    // 16 cells minus 4 EVS cells.
    ASSERT_EQ(rows.size(), 12u);
    for (const auto& r : rows) {
        EXPECT_DOUBLE_EQ(r.i_c, 100.0);  // 112 - (10 + 4 * 0.5)
        EXPECT_DOUBLE_EQ(r.dt, 4.0);
    }
    EXPECT_DOUBLE_EQ(rows[0].variance, 3.0 - 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(rows[1].variance, 0.0);  // 0.05 - 1/12 clamps at zero
}

TEST(VarianceCalibration, MakeParamsCarriesMaps) {
    const auto cfa = CfaLayout::preset("bayer");
    const auto dark = calibrate_dark_from_means(std::vector<double>{1.0, 2.0},
                                                std::vector<ImagePlane>{ImagePlane(2, 2, 1.0), ImagePlane(2, 2, 3.0)});
    const auto p = make_params(dark, std::vector<VarianceCoefficients>(4, VarianceCoefficients{1, 0, 0, 0, 0, 0}), 12);
    EXPECT_NO_THROW(p.validate(cfa));
    EXPECT_EQ(p.bit_depth, 12);
    EXPECT_DOUBLE_EQ(p.n_dp[0], 2.0);
    EXPECT_DOUBLE_EQ(p.n_row[1], -1.0);
}

}  // namespace
