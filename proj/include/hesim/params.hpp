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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hesim/image.hpp"

namespace hesim {

class CfaLayout;

/// Coefficients (b0..b5) of the APS variance polynomial
/// b0 + b1 I + b2 dt + b3 I^2 + b4 I dt + b5 dt^2.
using VarianceCoefficients = std::array<double, 6>;

/// Calibrated APS noise: fixed-pattern maps plus one variance polynomial per
/// APS position of the CFA block.
struct ApsNoiseParams {
    ImagePlane n_blc;            ///< per-pixel black-level offset (DN)
    std::vector<double> n_row;   ///< per-row offset (DN), length = height
    ImagePlane n_dp;             ///< per-pixel dark drift (DN/ms)
    std::vector<VarianceCoefficients> beta_a;
    std::uint16_t bit_depth = 10;

    std::size_t width() const noexcept { return n_blc.width(); }
    std::size_t height() const noexcept { return n_blc.height(); }

    /// All maps and coefficients zero.
    static ApsNoiseParams zero(std::size_t width, std::size_t height, std::size_t positions, std::uint16_t bit_depth);

    /// Throws LayoutError / ParameterError on inconsistent sizes or values.
    void validate(const CfaLayout& cfa) const;

    friend bool operator==(const ApsNoiseParams&, const ApsNoiseParams&) = default;
};

/// EVS trigger parameters b0..b5: b0 threshold scale, (b1, b2) intensity to
/// voltage affine map, b3 shot-noise slope, b4 dark-current sigma, b5
/// correlation magnitude (rho = -b5).
using TriggerCoefficients = std::array<double, 6>;

struct EvsNoiseParams {
    double theta_hw = 0.75;  ///< hardware threshold (mV)
    TriggerCoefficients beta_e{1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    ImagePlane mu_n;          ///< per-pixel offset map on the EVS grid
    PixelMask bad_pixel_mask;

    /// Model-unit threshold b0 * theta_hw.
    double theta() const noexcept { return beta_e[0] * theta_hw; }
    std::size_t width() const noexcept { return mu_n.width(); }
    std::size_t height() const noexcept { return mu_n.height(); }

    static EvsNoiseParams with_zero_maps(std::size_t evs_width, std::size_t evs_height, TriggerCoefficients beta,
                                         double theta_hw);

    /// Throws ParameterError if theta <= 0 or |b5| > 1, LayoutError if the
    /// maps are not evs_width x evs_height.
    void validate(std::size_t evs_width, std::size_t evs_height) const;

    friend bool operator==(const EvsNoiseParams&, const EvsNoiseParams&) = default;
};

}  // namespace hesim
