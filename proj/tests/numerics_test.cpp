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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "hesim/errors.hpp"
#include "hesim/fitting.hpp"
#include "hesim/numerics.hpp"
#include "hesim/random.hpp"

namespace {

using namespace hesim;
using namespace hesim::numerics;

// Reference values from erfc evaluated in 30-digit arithmetic.
TEST(QFunction, MatchesTabulatedValues) {
    EXPECT_DOUBLE_EQ(q_function(0.0), 0.5);
    EXPECT_NEAR(q_function(1.0) / 0.15865525393145705, 1.0, 1e-14);
    EXPECT_NEAR(q_function(1.959963984540054) / 0.025, 1.0, 1e-14);
    EXPECT_NEAR(q_function(3.0) / 1.3498980316300945e-3, 1.0, 1e-14);
    EXPECT_NEAR(q_function(8.0) / 6.220960574271784e-16, 1.0, 1e-12);
}

TEST(QFunction, ReflectionIdentity) {
    for (double x = -6.0; x <= 6.0; x += 0.37) EXPECT_NEAR(q_function(x) + q_function(-x), 1.0, 1e-15) << x;
}

TEST(QFunction, RejectsNonFiniteArgument) {
    EXPECT_THROW(q_function(std::nan("")), DomainError);
}

TEST(QInverse, KnownQuantiles) {
    EXPECT_NEAR(q_inverse(0.5), 0.0, 1e-15);
    EXPECT_NEAR(q_inverse(0.025), 1.959963984540054, 1e-12);
    EXPECT_NEAR(q_inverse(0.975), -1.959963984540054, 1e-12);
    EXPECT_NEAR(q_inverse(1e-9), 5.997807015007686, 1e-9);
}

TEST(QInverse, RoundTripsThroughQ) {
    for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.999}) EXPECT_NEAR(q_function(q_inverse(p)) / p, 1.0, 1e-12) << p;
}

TEST(QInverse, RejectsProbabilitiesOutsideOpenInterval) {
    EXPECT_THROW(q_inverse(0.0), DomainError);
    EXPECT_THROW(q_inverse(1.0), DomainError);
    EXPECT_THROW(q_inverse(-0.1), DomainError);
}

TEST(NormalPdf, PeakValue) { EXPECT_NEAR(normal_pdf(0.0), 0.3989422804014327, 1e-16); }

TEST(LinearLeastSquares, RecoversExactLine) {
    Eigen::MatrixXd a(4, 2);
    Eigen::VectorXd y(4);
    for (int i = 0; i < 4; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = i;
        y[i] = 2.0 + 3.0 * i;
    }
    const auto fit = fit_linear_least_squares(a, y);
    ASSERT_EQ(fit.coefficients.size(), 2u);
    EXPECT_NEAR(fit.coefficients[0], 2.0, 1e-12);
    EXPECT_NEAR(fit.coefficients[1], 3.0, 1e-12);
    EXPECT_NEAR(fit.residual_norm, 0.0, 1e-12);
}

TEST(LinearLeastSquares, MatchesNormalEquationsOnNoisyData) {
    // Hand-solved: x = {0, 1, 2}, y = {1, 2, 4} -> slope 1.5, intercept 5/6.
    Eigen::MatrixXd a(3, 2);
    a << 1, 0, 1, 1, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 2, 4;
    const auto fit = fit_linear_least_squares(a, y);
    EXPECT_NEAR(fit.coefficients[0], 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(fit.coefficients[1], 1.5, 1e-12);
    // Residuals 1/6, -1/3, 1/6 -> RMS sqrt(1/18).
    EXPECT_NEAR(fit.residual_norm, std::sqrt(1.0 / 18.0), 1e-12);
}

TEST(LinearLeastSquares, ReportsDependentColumn) {
    Eigen::MatrixXd a(4, 3);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    for (int i = 0; i < 4; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = i;
        a(i, 2) = 2.0 * i;
    }
    try {
        fit_linear_least_squares(a, y);
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_EQ(e.column(), 2u);
    }
}

TEST(LinearLeastSquares, ZeroColumnAndUnderdetermined) {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
    zero.col(0).setOnes();
    EXPECT_THROW(fit_linear_least_squares(zero, Eigen::VectorXd::Ones(3)), SingularityError);
    EXPECT_THROW(fit_linear_least_squares(Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1)), RankError);
}

TEST(GradientDescent, FitsExponentialDecay) {
    const ParametricModel model = [](std::span<const double> p, double x) { return p[0] * std::exp(-p[1] * x); };
    std::vector<Observation> data;
    for (int i = 0; i <= 20; ++i) {
        const double x = 0.1 * i;
        data.push_back({x, 2.0 * std::exp(-1.3 * x), 1.0});
    }
    const std::vector<double> init{1.0, 0.5};
    FitConfig config;
    config.tolerance = 1e-14;
    config.max_iterations = 200'000;
    const auto fit = fit_nonlinear_gd(model, data, init, config);
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.coefficients[0], 2.0, 1e-4);
    EXPECT_NEAR(fit.coefficients[1], 1.3, 1e-4);
    EXPECT_LT(fit.residual_norm, 1e-4);
}

TEST(GradientDescent, ProjectionIsEnforced) {
    // Unconstrained optimum is slope -1; the projection keeps it non-negative.
    const ParametricModel model = [](std::span<const double> p, double x) { return p[0] * x; };
    const std::vector<Observation> data{{1.0, -1.0, 1.0}, {2.0, -2.0, 1.0}};
    const std::vector<double> init{1.0};
    const auto fit = fit_nonlinear_gd(model, data, init, {}, [](std::span<double> p) { p[0] = std::max(p[0], 0.0); });
    EXPECT_EQ(fit.coefficients[0], 0.0);
}

TEST(GradientDescent, WeightedMseMatchesHandComputation) {
    const ParametricModel model = [](std::span<const double> p, double x) { return p[0] + x; };
    const std::vector<Observation> data{{0.0, 1.0, 1.0}, {1.0, 0.0, 3.0}};
    const std::vector<double> p{0.0};
    // Errors -1 (w 1) and 1 (w 3): (1 + 3) / (1 + 3) = 1.
    EXPECT_DOUBLE_EQ(weighted_mse(model, data, p), 1.0);
}

TEST(GradientDescent, RejectsBadInputs) {
    const ParametricModel model = [](std::span<const double> p, double x) { return p[0] * x; };
    const std::vector<Observation> data{{1.0, 1.0, 1.0}};
    const std::vector<double> nan_init{std::nan("")};
    EXPECT_THROW(fit_nonlinear_gd(model, {}, std::vector<double>{1.0}), InsufficientDataError);
    EXPECT_THROW(fit_nonlinear_gd(model, data, nan_init), DomainError);
    FitConfig bad;
    bad.learning_rate = 0.0;
    EXPECT_THROW(fit_nonlinear_gd(model, data, std::vector<double>{1.0}, bad), DomainError);
}

TEST(GradientDescent, ReportsDivergence) {
    const ParametricModel model = [](std::span<const double>, double) { return std::numeric_limits<double>::infinity(); };
    const std::vector<Observation> data{{1.0, 1.0, 1.0}};
    EXPECT_THROW(fit_nonlinear_gd(model, data, std::vector<double>{1.0}), DivergenceError);
}

TEST(Random, CounterBasedAndKeySensitive) {
    const RandomKey k{7, 3, 11, 0};
    EXPECT_EQ(uniform_sample(k), uniform_sample(k));
    EXPECT_NE(uniform_sample(k), uniform_sample({7, 3, 11, 1}));
    EXPECT_NE(uniform_sample(k), uniform_sample({7, 3, 12, 0}));
    EXPECT_NE(uniform_sample(k), uniform_sample({7, 4, 11, 0}));
    EXPECT_NE(uniform_sample(k), uniform_sample({8, 3, 11, 0}));
    EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
}

TEST(Random, UniformMomentsAndRange) {
    const int n = 200'000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = uniform_sample({1, 0, static_cast<std::uint64_t>(i), 0});
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    // Mean 1/2 with SE sqrt(1/12 / n); variance 1/12.
    EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(Random, GaussianMoments) {
    const int n = 200'000;
    double sum = 0.0;
    double sum2 = 0.0;
    int beyond2 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = gaussian_sample({2, 0, static_cast<std::uint64_t>(i), 0}, 3.0, 2.0);
        sum += g;
        sum2 += g * g;
        beyond2 += std::abs(g - 3.0) > 4.0 ? 1 : 0;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 3.0, 4.0 * 2.0 / std::sqrt(n));
    EXPECT_NEAR(sum2 / n - mean * mean, 4.0, 4.0 * 4.0 * std::sqrt(2.0 / n));
    const double p2 = 2.0 * q_function(2.0);
    EXPECT_NEAR(static_cast<double>(beyond2) / n, p2, 4.0 * std::sqrt(p2 * (1 - p2) / n));
    EXPECT_EQ(gaussian_sample({2, 0, 0, 0}, 5.0, 0.0), 5.0);
    EXPECT_THROW(gaussian_sample({2, 0, 0, 0}, 0.0, -1.0), DomainError);
}

}  // namespace
