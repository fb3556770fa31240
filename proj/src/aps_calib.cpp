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

#include "hesim/aps_calib.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "hesim/errors.hpp"
#include "hesim/fitting.hpp"
#include "hesim/parallel.hpp"

namespace hesim::aps {

namespace {

constexpr double kQuantizationVariance = 1.0 / 12.0;

/// Number of clusters among sorted values separated by gaps larger than `gap`.
std::size_t count_clusters(std::vector<double> values, double gap) {
    if (values.empty()) {
        return 0;
    }
    std::sort(values.begin(), values.end());
    std::size_t clusters = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] > gap) {
            ++clusters;
        }
    }
    return clusters;
}

}  // namespace

DarkCalibration calibrate_dark_from_means(std::span<const double> exposures_ms, std::span<const ImagePlane> means) {
    if (exposures_ms.size() != means.size()) {
        throw LayoutError("calibrate_dark: exposure list and mean list differ in length");
    }
    if (means.empty()) {
        throw RankError("calibrate_dark: no dark stacks given; need at least 2 distinct exposures");
    }
    const std::set<double> distinct(exposures_ms.begin(), exposures_ms.end());
    if (distinct.size() < 2) {
        throw RankError("calibrate_dark: need at least 2 distinct exposures, got " + std::to_string(distinct.size()));
    }
    for (double dt : exposures_ms) {
        if (!(dt > 0.0)) {
            throw DomainError("calibrate_dark: exposures must be > 0");
        }
    }
    for (const auto& m : means) {
        require_same_shape(means.front(), m, "calibrate_dark");
    }

    const std::size_t k = exposures_ms.size();
    double dt_mean = 0.0;
    for (double dt : exposures_ms) {
        dt_mean += dt;
    }
    dt_mean /= static_cast<double>(k);
    double sxx = 0.0;
    for (double dt : exposures_ms) {
        sxx += (dt - dt_mean) * (dt - dt_mean);
    }

    const std::size_t w = means.front().width();
    const std::size_t h = means.front().height();
    DarkCalibration out;
    out.n_dp = ImagePlane(w, h);
    out.n_fp = ImagePlane(w, h);
    out.n_blc = ImagePlane(w, h);
    out.n_row.assign(h, 0.0);
    for (std::size_t i = 0; i < w * h; ++i) {
        double m_mean = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            m_mean += means[s][i];
        }
        m_mean /= static_cast<double>(k);
        double sxy = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            sxy += (exposures_ms[s] - dt_mean) * (means[s][i] - m_mean);
        }
        const double slope = sxy / sxx;
        out.n_dp[i] = slope;
        out.n_fp[i] = m_mean - slope * dt_mean;
    }
    for (std::size_t y = 0; y < h; ++y) {
        double sum = 0.0;
        for (std::size_t x = 0; x < w; ++x) {
            sum += out.n_fp.at(x, y);
        }
        out.n_row[y] = sum / static_cast<double>(w);
        for (std::size_t x = 0; x < w; ++x) {
            out.n_blc.at(x, y) = out.n_fp.at(x, y) - out.n_row[y];
        }
    }
    return out;
}

DarkCalibration calibrate_dark(std::span<const FrameStack> dark_stacks, std::size_t threads) {
    std::vector<double> exposures(dark_stacks.size());
    std::vector<ImagePlane> means(dark_stacks.size());
    for (const auto& stack : dark_stacks) {
        stack.validate();
    }
    parallel_for(dark_stacks.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            exposures[s] = dark_stacks[s].exposure_ms;
            means[s] = stack_mean_var(dark_stacks[s]).mean;
        }
    });
    return calibrate_dark_from_means(exposures, means);
}

StackStatistics summarize_stack(const FrameStack& stack) {
    stack.validate();
    return {stack.exposure_ms, stack_mean_var(stack)};
}

std::vector<VarianceCoefficients> fit_variance_polynomials(std::span<const VarianceSample> samples,
                                                           std::size_t positions) {
    std::vector<std::vector<const VarianceSample*>> grouped(positions);
    for (const auto& s : samples) {
        if (s.position >= positions) {
            throw ParameterError("fit_variance_polynomials: sample position out of range");
        }
        grouped[s.position].push_back(&s);
    }
    std::vector<VarianceCoefficients> out(positions);
    for (std::size_t p = 0; p < positions; ++p) {
        const auto& rows = grouped[p];
        std::vector<double> intensities;
        std::vector<double> exposures;
        intensities.reserve(rows.size());
        exposures.reserve(rows.size());
        for (const auto* s : rows) {
            intensities.push_back(s->i_c);
            exposures.push_back(s->dt);
        }
        // Pixel means scatter by noise around each level; levels count as
        // distinct when separated by more than 1 DN.
        const std::size_t levels = count_clusters(intensities, 1.0);
        const std::size_t dts = count_clusters(exposures, 1e-9);
        if (levels < 3 || dts < 3) {
            throw RankError("variance calibration for position " + std::to_string(p) +
                            ": need at least 3 distinct intensity levels and 3 distinct exposures, got " +
                            std::to_string(levels) + " levels and " + std::to_string(dts) + " exposures");
        }
        Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), 6);
        Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double i = rows[r]->i_c;
            const double dt = rows[r]->dt;
            const auto ri = static_cast<Eigen::Index>(r);
            design.row(ri) << 1.0, i, dt, i * i, i * dt, dt * dt;
            target(ri) = rows[r]->variance;
        }
        try {
            const auto fit = numerics::fit_linear_least_squares(design, target);
            std::copy(fit.coefficients.begin(), fit.coefficients.end(), out[p].begin());
        } catch (const SingularityError& e) {
            throw RankError("variance calibration for position " + std::to_string(p) +
                            ": (intensity, exposure) combinations are not diverse enough (" + e.what() + ")");
        }
    }
    return out;
}

std::vector<VarianceSample> variance_samples(const StackStatistics& stack, const DarkCalibration& dark,
                                             const CfaLayout& cfa) {
    const auto& mean = stack.stats.mean;
    const auto& var = stack.stats.variance;
    require_same_shape(mean, dark.n_fp, "calibrate_variance");
    cfa.check_tiles(mean.width(), mean.height());
    if (!(stack.exposure_ms > 0.0)) {
        throw DomainError("calibrate_variance: exposure must be > 0");
    }
    std::vector<VarianceSample> out;
    out.reserve(mean.size());
    for (std::size_t y = 0; y < mean.height(); ++y) {
        for (std::size_t x = 0; x < mean.width(); ++x) {
            if (!cfa.is_aps_at(x, y)) {
                continue;
            }
            out.push_back({mean.at(x, y) - dark.dark_mean(x, y, stack.exposure_ms), stack.exposure_ms,
                           std::max(0.0, var.at(x, y) - kQuantizationVariance), cfa.position_at(x, y)});
        }
    }
    return out;
}

std::vector<VarianceCoefficients> calibrate_variance(std::span<const StackStatistics> illuminated,
                                                     const DarkCalibration& dark, const CfaLayout& cfa) {
    std::vector<VarianceSample> samples;
    for (const auto& stack : illuminated) {
        auto rows = variance_samples(stack, dark, cfa);
        samples.insert(samples.end(), rows.begin(), rows.end());
    }
    return fit_variance_polynomials(samples, cfa.position_count());
}

std::vector<VarianceCoefficients> calibrate_variance(std::span<const FrameStack> illuminated,
                                                     const DarkCalibration& dark, const CfaLayout& cfa) {
    std::vector<StackStatistics> stats;
    stats.reserve(illuminated.size());
    for (const auto& stack : illuminated) {
        stats.push_back(summarize_stack(stack));
    }
    return calibrate_variance(stats, dark, cfa);
}

ApsNoiseParams make_params(const DarkCalibration& dark, std::vector<VarianceCoefficients> beta_a,
                           std::uint16_t bit_depth) {
    ApsNoiseParams p;
    p.n_blc = dark.n_blc;
    p.n_row = dark.n_row;
    p.n_dp = dark.n_dp;
    p.beta_a = std::move(beta_a);
    p.bit_depth = bit_depth;
    return p;
}

}  // namespace hesim::aps
