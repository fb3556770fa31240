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
#include <vector>

#include "hesim/events.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"
#include "hesim/random.hpp"

namespace hesim::evs {

/// Lower clamp of the effective voltage; keeps the log domain finite.
inline constexpr double kVoltageFloor = 1e-6;

/// Effective per-pixel voltage on the EVS grid (model units, >= kVoltageFloor).
struct VoltageField {
    ImagePlane values;
};

double intensity_to_voltage(double i_c, const TriggerCoefficients& beta) noexcept;
VoltageField intensity_to_voltage(const ImagePlane& i_c, const EvsNoiseParams& params);

/// Voltage-domain noise scale sqrt(sigma_shot^2 + sigma_dcsn^2 - 2 rho
/// sigma_shot sigma_dcsn) with sigma_shot = b3 I, sigma_dcsn = b4, rho = -b5.
/// Throws ParameterError if |b5| > 1.
double voltage_noise_sigma(double i_c, const TriggerCoefficients& beta);

struct NoiseMoments {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Mean and standard deviation of the log-difference noise term between two
/// samples: sigma^2 = voltage_noise_sigma^2 (1/v_curr^2 + 1/v_prev^2) and
/// mu = mu_offset (1/v_curr - 1/v_prev).
NoiseMoments noise_moments(double v_prev, double v_curr, double i_c, double mu_offset,
                           const TriggerCoefficients& beta);

struct TriggerProbabilities {
    double p_plus = 0.0;
    double p_minus = 0.0;
};

/// ON / OFF probabilities for signal s and noise N(mu, sigma^2) against
/// threshold theta. sigma == 0 gives the deterministic comparison.
TriggerProbabilities trigger_probabilities(double s, double mu, double sigma, double theta);

/// One comparator decision: +1, -1 or 0.
int sample_polarity(double s, double mu, double sigma, double theta, const RandomKey& key);

/// Baseline voltage update rule between EVS sampling instants.
enum class Baseline { per_step, on_event };

/// Events of one EVS sampling step at time t_us, in canonical order. Pixel p
/// (linear EVS-grid index) draws from key.with_pixel(p); masked pixels never
/// fire. When `fired` is non-null it receives a per-pixel 0/1 firing flag.
std::vector<EventRecord> step_events(const VoltageField& v_prev, const VoltageField& v_curr, const ImagePlane& i_c,
                                     const EvsNoiseParams& params, double theta, std::uint64_t t_us,
                                     const RandomKey& key, std::size_t threads = 1,
                                     std::vector<std::uint8_t>* fired = nullptr);

}  // namespace hesim::evs
