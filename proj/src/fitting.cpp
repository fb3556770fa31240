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

#include "hesim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "hesim/errors.hpp"

namespace hesim::numerics {

FitResult fit_linear_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets) {
    const Eigen::Index rows = design.rows();
    const Eigen::Index cols = design.cols();
    if (targets.size() != rows) throw DomainError("least squares: target length does not match design rows");
    if (cols == 0) throw RankError("least squares: empty design");
    if (rows < cols) {
        throw RankError("least squares: " + std::to_string(rows) + " rows cannot determine " + std::to_string(cols) +
                        " coefficients");
    }

    // Equilibrate columns so that polynomial designs with mixed magnitudes
    // (1, x, x^2, ...) stay well conditioned.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (!(scale[j] > 0.0)) {
            throw SingularityError("least squares: design column " + std::to_string(j) + " is identically zero", j);
        }
    }
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
    const Eigen::MatrixXd& packed = qr.matrixQR();
    double max_diag = 0.0;
    for (Eigen::Index j = 0; j < cols; ++j) max_diag = std::max(max_diag, std::abs(packed(j, j)));
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (std::abs(packed(j, j)) <= 1e-10 * max_diag) {
            throw SingularityError("least squares: design column " + std::to_string(j) +
                                       " is linearly dependent on the preceding columns",
                                   j);
        }
    }

    const Eigen::VectorXd solution = qr.solve(targets).cwiseQuotient(scale);
    const Eigen::VectorXd residual = design * solution - targets;

    FitResult result;
    result.coefficients.assign(solution.data(), solution.data() + cols);
    result.residual_norm = std::sqrt(residual.squaredNorm() / static_cast<double>(rows));
    result.iterations = 1;
    result.converged = true;
    return result;
}

double weighted_mse(const ParametricModel& model, std::span<const Observation> data, std::span<const double> params) {
    double sum = 0.0;
    double weight = 0.0;
    for (const Observation& obs : data) {
        const double r = obs.target - model(params, obs.input);
        sum += obs.weight * r * r;
        weight += obs.weight;
    }
    return weight > 0.0 ? sum / weight : std::numeric_limits<double>::quiet_NaN();
}

namespace {

constexpr double kDivergenceLoss = 1e12;
constexpr double kArmijo = 1e-4;

bool diverged(double loss) { return !std::isfinite(loss) || loss > kDivergenceLoss; }

}  // namespace

FitResult fit_nonlinear_gd(const ParametricModel& model, std::span<const Observation> data,
                           std::span<const double> init, const FitConfig& config, const Projection& project) {
    if (data.empty()) throw InsufficientDataError("gradient descent: no data points");
    if (init.empty()) throw DomainError("gradient descent: empty parameter vector");
    for (double v : init) {
        if (!std::isfinite(v)) throw DomainError("gradient descent: non-finite initial parameter");
    }
    if (!(config.learning_rate > 0.0)) throw DomainError("gradient descent: learning rate must be positive");

    const std::size_t n = init.size();
    std::vector<double> params(init.begin(), init.end());
    if (project) project(params);

    auto loss_at = [&](std::span<const double> p) { return weighted_mse(model, data, p); };

    double loss = loss_at(params);
    if (diverged(loss)) throw DivergenceError("gradient descent: loss diverged at initial point", 0);

    std::vector<double> gradient(n);
    std::vector<double> probe(n);
    std::vector<double> candidate(n);
    std::deque<double> history{loss};
    double step = config.learning_rate;
    bool converged = false;
    std::size_t iteration = 0;

    while (iteration < config.max_iterations) {
        ++iteration;
        probe = params;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = std::max(1e-6, 1e-6 * std::abs(params[j]));
            probe[j] = params[j] + h;
            const double up = loss_at(probe);
            probe[j] = params[j] - h;
            const double down = loss_at(probe);
            probe[j] = params[j];
            gradient[j] = (up - down) / (2.0 * h);
        }

        bool accepted = false;
        double candidate_loss = loss;
        for (int halvings = 0; halvings < 80; ++halvings) {
            for (std::size_t j = 0; j < n; ++j) candidate[j] = params[j] - step * gradient[j];
            if (project) project(candidate);
            candidate_loss = loss_at(candidate);
            double descent = 0.0;
            for (std::size_t j = 0; j < n; ++j) descent += gradient[j] * (params[j] - candidate[j]);
            if (std::isfinite(candidate_loss) && candidate_loss <= loss - kArmijo * descent) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || candidate_loss >= loss) {
            // Stationary up to the resolution of the finite-difference gradient.
            converged = true;
            break;
        }
        params.swap(candidate);
        loss = candidate_loss;
        if (diverged(loss)) throw DivergenceError("gradient descent: loss diverged", iteration);
        step *= 2.0;

        history.push_back(loss);
        if (history.size() > config.patience + 1) history.pop_front();
        if (loss == 0.0) {
            converged = true;
            break;
        }
        if (history.size() == config.patience + 1) {
            const double before = history.front();
            if (before - loss <= config.tolerance * before) {
                converged = true;
                break;
            }
        }
    }

    FitResult result;
    result.coefficients = params;
    double sum = 0.0;
    for (const Observation& obs : data) {
        const double r = obs.target - model(params, obs.input);
        sum += r * r;
    }
    result.residual_norm = std::sqrt(sum / static_cast<double>(data.size()));
    result.iterations = iteration;
    result.converged = converged;
    return result;
}

}  // namespace hesim::numerics
