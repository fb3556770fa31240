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

#include "hesim/cfa.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"
#include "hesim/random.hpp"

namespace hesim::aps {

struct ApsVarianceQuery {
    double i_c = 0.0;        ///< clean intensity (DN)
    double dt = 0.0;         ///< exposure (ms)
    std::size_t position = 0;  ///< index into CfaLayout::aps_positions()
};

/// Variance polynomial b0 + b1 I + b2 dt + b3 I^2 + b4 I dt + b5 dt^2,
/// clamped at 0.
double evaluate_variance(const VarianceCoefficients& beta, double i_c, double dt) noexcept;

/// Aggregate noise variance (DN^2) for one pixel. Throws DomainError for
/// i_c < 0 or dt <= 0 and ParameterError for an unknown position.
double aps_variance(const ApsVarianceQuery& query, const ApsNoiseParams& params);

/// Noisy quantized readout of a clean mosaic:
/// clean + n_row + n_blc + dt n_dp + N(0, variance), clamped to
/// [0, 2^bit_depth - 1] and rounded. Each pixel draws from
/// key.with_pixel(linear index), so the result is independent of `threads`.
RawFrame synthesize_raw(const ImagePlane& clean, double dt_ms, const ApsNoiseParams& params, const CfaLayout& cfa,
                        const RandomKey& key, std::size_t threads = 1);

}  // namespace hesim::aps
