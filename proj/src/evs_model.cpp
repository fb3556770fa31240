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

#include "hesim/evs_model.hpp"

#include <algorithm>
#include <cmath>

#include "hesim/errors.hpp"
#include "hesim/numerics.hpp"
#include "hesim/parallel.hpp"

namespace hesim::evs {

double intensity_to_voltage(double i_c, const TriggerCoefficients& beta) noexcept {
    return std::max(kVoltageFloor, beta[1] * i_c + beta[2]);
}

VoltageField intensity_to_voltage(const ImagePlane& i_c, const EvsNoiseParams& params) {
    VoltageField field{ImagePlane(i_c.width(), i_c.height())};
    for (std::size_t i = 0; i < i_c.size(); ++i) {
        if (!(i_c[i] >= 0.0)) throw DomainError("intensity_to_voltage: intensities must be >= 0");
        field.values[i] = intensity_to_voltage(i_c[i], params.beta_e);
    }
    return field;
}

double voltage_noise_sigma(double i_c, const TriggerCoefficients& beta) {
    if (std::abs(beta[5]) > 1.0) throw ParameterError("EVS correlation magnitude |b5| must not exceed 1");
    const double s_shot = beta[3] * i_c;
    const double s_dark = beta[4];
    const double var = s_shot * s_shot + s_dark * s_dark + 2.0 * beta[5] * s_shot * s_dark;
    // |b5| <= 1 keeps var >= 0 up to rounding.
    return std::sqrt(std::max(0.0, var));
}

NoiseMoments noise_moments(double v_prev, double v_curr, double i_c, double mu_offset,
                           const TriggerCoefficients& beta) {
    if (!(v_prev >= kVoltageFloor) || !(v_curr >= kVoltageFloor)) {
        throw DomainError("noise_moments: voltages must be >= the voltage floor");
    }
    const double s = voltage_noise_sigma(i_c, beta);
    const double inv_c = 1.0 / v_curr;
    const double inv_p = 1.0 / v_prev;
    return {mu_offset * (inv_c - inv_p), s * std::sqrt(inv_c * inv_c + inv_p * inv_p)};
}

TriggerProbabilities trigger_probabilities(double s, double mu, double sigma, double theta) {
    if (!(theta > 0.0)) throw DomainError("trigger_probabilities: theta must be > 0");
    if (!(sigma >= 0.0)) throw DomainError("trigger_probabilities: sigma must be >= 0");
    const double m = s + mu;
    if (sigma == 0.0) {
        return {m > theta ? 1.0 : 0.0, m < -theta ? 1.0 : 0.0};
    }
    return {numerics::q_function((theta - m) / sigma), numerics::q_function((theta + m) / sigma)};
}

int sample_polarity(double s, double mu, double sigma, double theta, const RandomKey& key) {
    const double dv = s + gaussian_sample(key, mu, sigma);
    if (dv > theta) return 1;
    if (dv < -theta) return -1;
    return 0;
}

std::vector<EventRecord> step_events(const VoltageField& v_prev, const VoltageField& v_curr, const ImagePlane& i_c,
                                     const EvsNoiseParams& params, double theta, std::uint64_t t_us,
                                     const RandomKey& key, std::size_t threads, std::vector<std::uint8_t>* fired) {
    require_same_shape(v_prev.values, v_curr.values, "step_events");
    require_same_shape(v_prev.values, i_c, "step_events");
    const std::size_t w = i_c.width();
    const std::size_t h = i_c.height();
    params.validate(w, h);
    if (!(theta > 0.0)) throw DomainError("step_events: theta must be > 0");
    if (w > 65536 || h > 65536) throw LayoutError("step_events: EVS grid exceeds 16-bit coordinates");

    std::vector<std::int8_t> polarity(w * h, 0);
    parallel_for(h, threads, [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t idx = row_begin * w; idx < row_end * w; ++idx) {
            if (params.bad_pixel_mask.flags[idx] != 0) continue;
            const double vp = v_prev.values[idx];
            const double vc = v_curr.values[idx];
            const auto moments = noise_moments(vp, vc, i_c[idx], params.mu_n[idx], params.beta_e);
            const double s = std::log(vc) - std::log(vp);
            polarity[idx] = static_cast<std::int8_t>(sample_polarity(s, moments.mu, moments.sigma, theta,
                                                                     key.with_pixel(idx)));
        }
    });

    std::vector<EventRecord> events;
    if (fired != nullptr) fired->assign(w * h, 0);
    for (std::size_t idx = 0; idx < w * h; ++idx) {
        if (polarity[idx] == 0) continue;
        events.push_back({t_us, static_cast<std::uint16_t>(idx % w), static_cast<std::uint16_t>(idx / w),
                          polarity[idx]});
        if (fired != nullptr) (*fired)[idx] = 1;
    }
    return events;
}

}  // namespace hesim::evs
