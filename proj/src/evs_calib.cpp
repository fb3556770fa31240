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

#include "hesim/evs_calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "hesim/errors.hpp"
#include "hesim/evs_model.hpp"
#include "hesim/numerics.hpp"

namespace hesim::evs {

namespace {

constexpr std::uint64_t kMinDarkTrials = 100;
constexpr std::uint64_t kMinFitTrials = 1000;
constexpr std::size_t kMinLevels = 5;
/// Residuals at or below this are treated as exact model agreement.
constexpr double kResidualFloor = 1e-9;

double probit_of_counts(std::uint64_t k, std::uint64_t n) { return numerics::q_inverse(clipped_frequency(k, n)); }

/// Probit curve in normalized units: z = (b1 u + b2) / sqrt(2((b3 u)^2 + b4^2 + 2 b5 b3 u b4)).
double normalized_curve(std::span<const double> b, double u) {
    const double su = b[2] * u;
    const double var = su * su + b[3] * b[3] + 2.0 * b[4] * su * b[3];
    const double denom = std::sqrt(2.0 * std::max(var, std::numeric_limits<double>::min()));
    return (b[0] * u + b[1]) / denom;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mad(const std::vector<double>& v) {
    const double m = median(v);
    std::vector<double> dev(v.size());
    std::transform(v.begin(), v.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
    return median(std::move(dev));
}

}  // namespace

std::vector<EventCountObservation> count_events(std::span<const EventRecord> events, const ImagePlane& intensity,
                                                std::uint64_t n_trials) {
    if (n_trials == 0) throw ParameterError("count_events: n_trials must be > 0");
    const std::size_t w = intensity.width();
    const std::size_t h = intensity.height();
    std::vector<EventCountObservation> obs(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            auto& o = obs[y * w + x];
            o.x = x;
            o.y = y;
            o.i_c = intensity.at(x, y);
            o.n_trials = n_trials;
        }
    }
    for (const auto& e : events) {
        if (e.x >= w || e.y >= h) {
            throw LayoutError("count_events: event at (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                              ") lies outside the " + std::to_string(w) + "x" + std::to_string(h) + " EVS grid");
        }
        auto& o = obs[static_cast<std::size_t>(e.y) * w + e.x];
        (e.polarity > 0 ? o.n_plus : o.n_minus) += 1;
    }
    for (const auto& o : obs) {
        if (o.n_plus + o.n_minus > n_trials) {
            throw InsufficientDataError("count_events: pixel (" + std::to_string(o.x) + ", " + std::to_string(o.y) +
                                        ") has more events than trials; check the trial count");
        }
    }
    return obs;
}

double clipped_frequency(std::uint64_t k, std::uint64_t n) {
    if (n == 0) throw ParameterError("clipped_frequency: n must be > 0");
    const double nn = static_cast<double>(n);
    const double lo = 0.5 / nn;
    return std::clamp(static_cast<double>(k) / nn, lo, 1.0 - lo);
}

MuEstimate estimate_mu_offsets(std::span<const EventCountObservation> dark, std::size_t evs_width,
                               std::size_t evs_height, double theta) {
    if (!(theta > 0.0)) throw ParameterError("estimate_mu_offsets: theta must be > 0");
    MuEstimate out{ImagePlane(evs_width, evs_height), ImagePlane(evs_width, evs_height),
                   PixelMask(evs_width, evs_height)};
    std::vector<std::uint8_t> seen(evs_width * evs_height, 0);
    for (const auto& o : dark) {
        if (o.x >= evs_width || o.y >= evs_height) {
            throw LayoutError("estimate_mu_offsets: observation outside the EVS grid");
        }
        if (o.n_trials < kMinDarkTrials) {
            throw InsufficientDataError("estimate_mu_offsets: pixel (" + std::to_string(o.x) + ", " +
                                        std::to_string(o.y) + ") has " + std::to_string(o.n_trials) +
                                        " trials, need at least " + std::to_string(kMinDarkTrials));
        }
        if (o.n_plus + o.n_minus > o.n_trials) {
            throw DomainError("estimate_mu_offsets: event counts exceed trial count");
        }
        seen[o.y * evs_width + o.x] = 1;
        if (o.n_plus == 0 && o.n_minus == 0) {
            out.low_confidence.set(o.x, o.y);
            continue;
        }
        // Q^-1(P+) sigma = theta - mu and Q^-1(1 - P-) sigma = -theta - mu.
        const double a = probit_of_counts(o.n_plus, o.n_trials);
        const double b = -probit_of_counts(o.n_minus, o.n_trials);
        if (!(a - b > 0.0)) {
            out.low_confidence.set(o.x, o.y);
            continue;
        }
        const double sigma = 2.0 * theta / (a - b);
        out.sigma_n.at(o.x, o.y) = sigma;
        out.mu_n.at(o.x, o.y) = o.n_plus == o.n_minus ? 0.0 : theta - a * sigma;
    }
    const auto missing = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 0));
    if (missing > 0) {
        throw InsufficientDataError("estimate_mu_offsets: " + std::to_string(missing) +
                                    " EVS pixels have no dark observation");
    }
    return out;
}

double evs_model_curve(double i_c, const TriggerCoefficients& beta, double theta_hw) {
    const double sigma_v = voltage_noise_sigma(i_c, beta);
    const double numerator = theta_hw * beta[0] * (beta[1] * i_c + beta[2]);
    if (sigma_v == 0.0) {
        return numerator > 0.0 ? std::numeric_limits<double>::infinity()
                               : (numerator < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    }
    return numerator / (std::numbers::sqrt2 * sigma_v);
}

double observed_probit(const EventCountObservation& obs) {
    if (obs.n_trials == 0) throw ParameterError("observed_probit: n_trials must be > 0");
    const double n = static_cast<double>(obs.n_trials);
    const double p = 0.5 * (static_cast<double>(obs.n_plus) + static_cast<double>(obs.n_minus)) / n;
    const double lo = 0.5 / n;
    return numerics::q_inverse(std::clamp(p, lo, 1.0 - lo));
}

EvsFitResult fit_evs_params(std::span<const EventCountObservation> observations, const EvsFitOptions& options) {
    if (!(options.theta_hw > 0.0)) throw ParameterError("fit_evs_params: theta_hw must be > 0");
    if (observations.empty()) throw InsufficientDataError("fit_evs_params: no observations");

    struct Level {
        std::uint64_t trials = 0;
        std::uint64_t plus = 0;
        std::uint64_t minus = 0;

        double probit() const { return observed_probit({0, 0, 0.0, trials, plus, minus}); }
        double weight() const { return static_cast<double>(trials); }
    };
    // Pixels sharing an intensity are pooled into one level before the probit
    // transform, which avoids the bias of averaging probits of small counts.
    std::map<double, Level> levels;
    for (const auto& o : observations) {
        if (o.n_trials < kMinFitTrials) {
            throw InsufficientDataError("fit_evs_params: observation with " + std::to_string(o.n_trials) +
                                        " trials, need at least " + std::to_string(kMinFitTrials));
        }
        if (!(o.i_c >= 0.0) || !std::isfinite(o.i_c)) throw DomainError("fit_evs_params: intensities must be >= 0");
        if (o.n_plus + o.n_minus > o.n_trials) throw DomainError("fit_evs_params: event counts exceed trial count");
        auto& level = levels[o.i_c];
        level.trials += o.n_trials;
        level.plus += o.n_plus;
        level.minus += o.n_minus;
    }
    if (levels.size() == 1) {
        throw RankError("fit_evs_params: all observations share one intensity; the curve is not identifiable");
    }
    if (levels.size() < kMinLevels) {
        throw InsufficientDataError("fit_evs_params: need at least " + std::to_string(kMinLevels) +
                                    " distinct brightness levels, got " + std::to_string(levels.size()));
    }

    // Normalize inputs and targets to unit RMS for a well-scaled descent.
    double total_weight = 0.0;
    double sum_i2 = 0.0;
    double sum_y2 = 0.0;
    for (const auto& [i_c, level] : levels) {
        const double y = level.probit();
        sum_i2 += i_c * i_c;
        sum_y2 += y * y;
        total_weight += level.weight();
    }
    const double n_levels = static_cast<double>(levels.size());
    const double s_i = std::sqrt(sum_i2 / n_levels);
    const double s_y = std::sqrt(sum_y2 / n_levels) > 0.0 ? std::sqrt(sum_y2 / n_levels) : 1.0;
    const double mean_weight = total_weight / n_levels;

    std::vector<numerics::Observation> data;
    data.reserve(levels.size());
    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
    for (const auto& [i_c, level] : levels) {
        const double u = i_c / s_i;
        data.push_back({u, level.probit() / s_y, level.weight() / mean_weight});
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
    }

    const double theta = options.theta_hw;
    // Voltage floor expressed in normalized units (b1 u + b2 = (b1 I + b2) theta / s_y).
    const double floor_n = kVoltageFloor * theta / s_y;
    const numerics::Projection project = [&](std::span<double> b) {
        b[0] = std::max(b[0], 0.0);
        b[4] = std::clamp(b[4], -1.0, 1.0);
        const double norm = std::hypot(b[2], b[3]);
        if (norm > 0.0) {
            for (int j = 0; j < 4; ++j) b[j] /= norm;
        }
        b[1] = std::max({b[1], floor_n - b[0] * u_min, floor_n - b[0] * u_max});
    };

    std::vector<double> init(5);
    if (options.init) {
        const auto& g = *options.init;
        init = {g[1] * s_i * theta / s_y, g[2] * theta / s_y, g[3] * s_i, g[4], g[5]};
    } else {
        // Equal noise terms and no correlation: D(u) = sqrt(u^2 + 1), so
        // z D(u) = b1 u + b2 is linear in (b1, b2).
        const double b34 = 1.0 / std::numbers::sqrt2;
        Eigen::MatrixXd design(static_cast<Eigen::Index>(data.size()), 2);
        Eigen::VectorXd target(static_cast<Eigen::Index>(data.size()));
        for (std::size_t r = 0; r < data.size(); ++r) {
            const auto ri = static_cast<Eigen::Index>(r);
            const double sw = std::sqrt(data[r].weight);
            design(ri, 0) = sw * data[r].input;
            design(ri, 1) = sw;
            target(ri) = sw * data[r].target * std::sqrt(data[r].input * data[r].input + 1.0);
        }
        const auto lin = numerics::fit_linear_least_squares(design, target);
        init = {lin.coefficients[0], lin.coefficients[1], b34, b34, 0.0};
    }
    project(init);

    const auto fit = numerics::fit_nonlinear_gd(normalized_curve, data, init, options.fit, project);
    const auto& b = fit.coefficients;

    EvsFitResult result;
    result.beta = {1.0, b[0] * s_y / (theta * s_i), b[1] * s_y / theta, b[2] / s_i, b[3], b[4]};
    result.diagnostics.converged = fit.converged;
    result.diagnostics.iterations = fit.iterations;

    double sq = 0.0;
    for (const auto& [i_c, level] : levels) {
        LevelResidual r;
        r.i_c = i_c;
        r.n_trials = level.trials;
        r.y_observed = level.probit();
        r.y_model = evs_model_curve(i_c, result.beta, theta);
        r.residual = r.y_observed - r.y_model;
        r.residual_plus = probit_of_counts(level.plus, level.trials) - r.y_model;
        r.residual_minus = probit_of_counts(level.minus, level.trials) - r.y_model;
        sq += level.weight() * r.residual * r.residual;
        result.diagnostics.levels.push_back(r);
    }
    result.diagnostics.rmse = std::sqrt(sq / total_weight);
    return result;
}

PixelMask build_bad_pixel_mask(std::span<const EventCountObservation> observations, const TriggerCoefficients& beta,
                               double theta_hw, const ImagePlane& mu_n, double k) {
    if (!(k > 0.0)) throw ParameterError("build_bad_pixel_mask: k must be > 0");
    PixelMask mask(mu_n.width(), mu_n.height());
    if (std::isinf(k)) return mask;

    std::vector<double> residuals;
    residuals.reserve(observations.size());
    for (const auto& o : observations) {
        if (o.x >= mu_n.width() || o.y >= mu_n.height()) {
            throw LayoutError("build_bad_pixel_mask: observation outside the EVS grid");
        }
        residuals.push_back(observed_probit(o) - evs_model_curve(o.i_c, beta, theta_hw));
    }
    const double r_limit = std::max(k * mad(residuals), kResidualFloor);
    for (std::size_t j = 0; j < observations.size(); ++j) {
        if (std::abs(residuals[j]) > r_limit) mask.set(observations[j].x, observations[j].y);
    }

    const std::vector<double> mu(mu_n.data().begin(), mu_n.data().end());
    const double mu_limit = std::max(k * mad(mu), kResidualFloor);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (std::abs(mu[i]) > mu_limit) mask.flags[i] = 1;
    }
    return mask;
}

}  // namespace hesim::evs
