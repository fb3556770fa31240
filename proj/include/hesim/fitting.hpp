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

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hesim::numerics {

struct FitResult {
    std::vector<double> coefficients;
    /// Root-mean-square residual of `coefficients` on the training data.
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Ordinary least squares via Householder QR on column-equilibrated design.
///
/// Throws RankError when rows < cols and SingularityError (carrying the index
/// of the first dependent column) when the design is rank deficient.
FitResult fit_linear_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets);

struct FitConfig {
    double learning_rate = 1e-2;
    std::size_t max_iterations = 50'000;
    /// Relative loss decrease over `patience` iterations below which the fit stops.
    double tolerance = 1e-10;
    std::size_t patience = 100;
};

struct Observation {
    double input = 0.0;
    double target = 0.0;
    double weight = 1.0;
};

using ParametricModel = std::function<double(std::span<const double> params, double input)>;

/// In-place map of a parameter vector onto the feasible set.
using Projection = std::function<void(std::span<double> params)>;

/// Weighted mean squared residual of `model` over `data`.
double weighted_mse(const ParametricModel& model, std::span<const Observation> data, std::span<const double> params);

/// Projected gradient descent on the weighted mean squared residual.
///
/// Gradients are central finite differences with step max(1e-6, 1e-6 |p|).
/// Each iteration starts from twice the previously accepted step (the first
/// from `learning_rate`) and halves it until the Armijo sufficient-decrease
/// condition holds. Throws InsufficientDataError for empty data and
/// DivergenceError if the loss exceeds 1e12 or becomes non-finite.
FitResult fit_nonlinear_gd(const ParametricModel& model, std::span<const Observation> data,
                           std::span<const double> init, const FitConfig& config = {},
                           const Projection& project = {});

}  // namespace hesim::numerics
