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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hesim/events.hpp"
#include "hesim/fitting.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace hesim::evs {

/// Event counts of one EVS pixel over n_trials sampling intervals of a
/// static scene with clean intensity i_c.
struct EventCountObservation {
    std::size_t x = 0;
    std::size_t y = 0;
    double i_c = 0.0;
    std::uint64_t n_trials = 0;
    std::uint64_t n_plus = 0;
    std::uint64_t n_minus = 0;
};

/// One observation per EVS-grid pixel, counting ON/OFF events of `events`.
/// Throws ParameterError for n_trials == 0, LayoutError for events outside
/// the grid and InsufficientDataError if a pixel fired more than n_trials
/// times in one polarity.
std::vector<EventCountObservation> count_events(std::span<const EventRecord> events, const ImagePlane& intensity,
                                                std::uint64_t n_trials);

/// Empirical frequency k / n clipped to [1/(2n), 1 - 1/(2n)].
double clipped_frequency(std::uint64_t k, std::uint64_t n);

struct MuEstimate {
    ImagePlane mu_n;
    ImagePlane sigma_n;          ///< 0 where low confidence
    PixelMask low_confidence;    ///< no events at all, or inconsistent counts
};

/// Per-pixel offsets from dark counts, solving the two static trigger
/// relations for (mu, sigma) at threshold theta. Equal ON/OFF counts give
/// mu = 0. Throws InsufficientDataError if a pixel is missing or has fewer
/// than 100 trials.
MuEstimate estimate_mu_offsets(std::span<const EventCountObservation> dark, std::size_t evs_width,
                               std::size_t evs_height, double theta);

/// Probit-domain trigger curve theta_hw b0 (b1 I + b2) /
/// sqrt(2 ((b3 I)^2 + b4^2 + 2 b5 b3 I b4)), i.e. theta / sigma_n of a static
/// pixel at intensity I.
double evs_model_curve(double i_c, const TriggerCoefficients& beta, double theta_hw);

/// Probit of the polarity-averaged frequency of one observation.
double observed_probit(const EventCountObservation& obs);

struct EvsFitOptions {
    double theta_hw = 0.75;
    numerics::FitConfig fit{};
    /// Starting point in physical units (b0 ignored); default is derived from the data.
    std::optional<TriggerCoefficients> init;
};

struct LevelResidual {
    double i_c = 0.0;
    std::uint64_t n_trials = 0;   ///< summed over pixels at this level
    double y_observed = 0.0;      ///< probit of the pooled counts
    double y_model = 0.0;
    double residual = 0.0;        ///< observed - model
    double residual_plus = 0.0;   ///< ON-only probit minus model
    double residual_minus = 0.0;  ///< OFF-only probit minus model
};

struct EvsFitDiagnostics {
    bool converged = false;
    std::size_t iterations = 0;
    /// Trial-weighted RMS of probit residuals.
    double rmse = 0.0;
    std::vector<LevelResidual> levels;
};

struct EvsFitResult {
    TriggerCoefficients beta{};
    EvsFitDiagnostics diagnostics;
};

/// Fits b1..b5 (b0 fixed to 1) of the probit trigger curve by projected
/// gradient descent weighted by trial counts. The curve is invariant under a
/// common scale of (b1, b2, b3, b4); the result is normalized so that the
/// noise terms have unit norm in intensity-RMS units. Throws RankError when
/// all intensities coincide and InsufficientDataError for fewer than 5
/// levels or fewer than 1000 trials per observation.
EvsFitResult fit_evs_params(std::span<const EventCountObservation> observations, const EvsFitOptions& options = {});

/// Flags pixels whose probit residual exceeds k MAD of all residuals, or
/// whose |mu_n| exceeds k MAD of the offset map. k = infinity flags nothing.
PixelMask build_bad_pixel_mask(std::span<const EventCountObservation> observations, const TriggerCoefficients& beta,
                               double theta_hw, const ImagePlane& mu_n, double k = 5.0);

}  // namespace hesim::evs
