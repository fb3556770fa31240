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
#include <span>
#include <vector>

#include "hesim/cfa.hpp"
#include "hesim/frame_stack.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace hesim::aps {

/// Fixed-pattern decomposition of dark frames: mean(dt) = dt n_dp + n_fp with
/// n_fp = n_row (per row) + n_blc (per pixel).
struct DarkCalibration {
    ImagePlane n_dp;  ///< DN/ms
    ImagePlane n_fp;  ///< DN
    std::vector<double> n_row;
    ImagePlane n_blc;

    /// Predicted dark mean n_fp + dt n_dp at one pixel.
    double dark_mean(std::size_t x, std::size_t y, double dt_ms) const noexcept {
        return n_fp.at(x, y) + dt_ms * n_dp.at(x, y);
    }
};

/// Per-pixel regression of dark means on exposure. Throws RankError for
/// fewer than two distinct exposures and LayoutError for mixed dimensions.
DarkCalibration calibrate_dark_from_means(std::span<const double> exposures_ms, std::span<const ImagePlane> means);

/// Dark calibration from stacks (each >= 2 frames).
DarkCalibration calibrate_dark(std::span<const FrameStack> dark_stacks, std::size_t threads = 1);

/// Mean and variance of one illuminated stack; the streaming unit of the
/// variance calibration (frames can be released after summarizing).
struct StackStatistics {
    double exposure_ms = 0.0;
    MeanVariance stats;
};

StackStatistics summarize_stack(const FrameStack& stack);

/// One regression row: continuous-noise variance at (i_c, dt) for a position.
struct VarianceSample {
    double i_c = 0.0;
    double dt = 0.0;
    double variance = 0.0;
    std::size_t position = 0;
};

/// Least-squares fit of the variance polynomial independently for each of
/// `positions` positions. Throws RankError when a position lacks samples
/// spanning at least 3 distinct intensities and 3 distinct exposures.
std::vector<VarianceCoefficients> fit_variance_polynomials(std::span<const VarianceSample> samples,
                                                           std::size_t positions);

/// Builds regression samples from stack statistics: variance minus the 1/12
/// DN^2 quantization term (clamped at 0) against the dark-corrected mean.
std::vector<VarianceSample> variance_samples(const StackStatistics& stack, const DarkCalibration& dark,
                                             const CfaLayout& cfa);

std::vector<VarianceCoefficients> calibrate_variance(std::span<const StackStatistics> illuminated,
                                                     const DarkCalibration& dark, const CfaLayout& cfa);
std::vector<VarianceCoefficients> calibrate_variance(std::span<const FrameStack> illuminated,
                                                     const DarkCalibration& dark, const CfaLayout& cfa);

/// Assembles calibrated parameters.
ApsNoiseParams make_params(const DarkCalibration& dark, std::vector<VarianceCoefficients> beta_a,
                           std::uint16_t bit_depth);

}  // namespace hesim::aps
