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

#include "hesim/aps_model.hpp"

#include <algorithm>
#include <cmath>

#include "hesim/errors.hpp"
#include "hesim/parallel.hpp"

namespace hesim::aps {

double evaluate_variance(const VarianceCoefficients& b, double i_c, double dt) noexcept {
    const double v = b[0] + b[1] * i_c + b[2] * dt + b[3] * i_c * i_c + b[4] * i_c * dt + b[5] * dt * dt;
    return std::max(0.0, v);
}

double aps_variance(const ApsVarianceQuery& query, const ApsNoiseParams& params) {
    if (!(query.i_c >= 0.0)) {
        throw DomainError("aps_variance: clean intensity must be >= 0");
    }
    if (!(query.dt > 0.0)) {
        throw DomainError("aps_variance: exposure must be > 0");
    }
    if (query.position >= params.beta_a.size()) {
        throw ParameterError("aps_variance: position out of range");
    }
    return evaluate_variance(params.beta_a[query.position], query.i_c, query.dt);
}

RawFrame synthesize_raw(const ImagePlane& clean, double dt_ms, const ApsNoiseParams& params, const CfaLayout& cfa,
                        const RandomKey& key, std::size_t threads) {
    if (!(dt_ms > 0.0)) {
        throw DomainError("synthesize_raw: exposure must be > 0");
    }
    cfa.check_tiles(clean.width(), clean.height());
    if (params.width() != clean.width() || params.height() != clean.height()) {
        throw LayoutError("synthesize_raw: calibration maps do not match the clean mosaic");
    }
    params.validate(cfa);

    RawFrame raw;
    raw.width = clean.width();
    raw.height = clean.height();
    raw.bit_depth = params.bit_depth;
    raw.exposure_us = static_cast<std::uint64_t>(std::llround(dt_ms * 1000.0));
    raw.data.resize(clean.size());
    const double max_dn = static_cast<double>(raw.max_value());
    const std::size_t w = clean.width();

    parallel_for(clean.height(), threads, [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t y = row_begin; y < row_end; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const std::size_t idx = y * w + x;
                const double i_c = std::max(0.0, clean[idx]);
                const double var = evaluate_variance(params.beta_a[cfa.position_at(x, y)], i_c, dt_ms);
                const double fixed = params.n_row[y] + params.n_blc[idx] + dt_ms * params.n_dp[idx];
                const double noisy = gaussian_sample(key.with_pixel(idx), clean[idx] + fixed, std::sqrt(var));
                raw.data[idx] = static_cast<std::uint16_t>(std::nearbyint(std::clamp(noisy, 0.0, max_dn)));
            }
        }
    });
    return raw;
}

}  // namespace hesim::aps
