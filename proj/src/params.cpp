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

#include "hesim/params.hpp"

#include <cmath>
#include <string>

#include "hesim/cfa.hpp"
#include "hesim/errors.hpp"

namespace hesim {

ApsNoiseParams ApsNoiseParams::zero(std::size_t width, std::size_t height, std::size_t positions,
                                    std::uint16_t bit_depth) {
    ApsNoiseParams p;
    p.n_blc = ImagePlane(width, height);
    p.n_row.assign(height, 0.0);
    p.n_dp = ImagePlane(width, height);
    p.beta_a.assign(positions, VarianceCoefficients{});
    p.bit_depth = bit_depth;
    return p;
}

void ApsNoiseParams::validate(const CfaLayout& cfa) const {
    cfa.check_tiles(width(), height());
    require_same_shape(n_blc, n_dp, "APS noise maps");
    if (n_row.size() != height()) throw LayoutError("APS row-offset vector length does not match sensor height");
    if (beta_a.size() != cfa.position_count()) {
        throw LayoutError("APS variance model has " + std::to_string(beta_a.size()) + " coefficient sets, layout '" +
                          cfa.name() + "' has " + std::to_string(cfa.position_count()) + " positions");
    }
    if (bit_depth < 1 || bit_depth > 16) throw ParameterError("APS bit depth must be in [1, 16]");
    for (const auto& beta : beta_a) {
        for (double b : beta) {
            if (!std::isfinite(b)) throw ParameterError("APS variance coefficient is not finite");
        }
    }
}

EvsNoiseParams EvsNoiseParams::with_zero_maps(std::size_t evs_width, std::size_t evs_height, TriggerCoefficients beta,
                                              double theta_hw) {
    EvsNoiseParams p;
    p.theta_hw = theta_hw;
    p.beta_e = beta;
    p.mu_n = ImagePlane(evs_width, evs_height);
    p.bad_pixel_mask = PixelMask(evs_width, evs_height);
    return p;
}

void EvsNoiseParams::validate(std::size_t evs_width, std::size_t evs_height) const {
    for (double b : beta_e) {
        if (!std::isfinite(b)) throw ParameterError("EVS trigger coefficient is not finite");
    }
    if (!(theta() > 0.0)) throw ParameterError("EVS threshold b0 * theta_hw must be positive");
    if (std::abs(beta_e[5]) > 1.0) throw ParameterError("EVS correlation magnitude |b5| must not exceed 1");
    if (mu_n.width() != evs_width || mu_n.height() != evs_height) {
        throw LayoutError("EVS offset map is " + std::to_string(mu_n.width()) + "x" + std::to_string(mu_n.height()) +
                          ", EVS grid is " + std::to_string(evs_width) + "x" + std::to_string(evs_height));
    }
    if (bad_pixel_mask.width != evs_width || bad_pixel_mask.height != evs_height ||
        bad_pixel_mask.flags.size() != evs_width * evs_height) {
        throw LayoutError("EVS bad-pixel mask does not match the EVS grid");
    }
}

}  // namespace hesim
