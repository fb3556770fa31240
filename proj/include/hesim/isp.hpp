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

#include "hesim/cfa.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace hesim::isp {

using Matrix3 = std::array<std::array<double, 3>, 3>;

enum class ToneMap { identity, global_curve };

/// binned: Quad-Bayer mosaics are averaged over aligned 2x2 quads, demosaiced
/// at half resolution and upsampled; falls back to full for other layouts.
enum class DemosaicMode { binned, full };

struct IspConfig {
    double gamma = 2.2;
    /// Use the piecewise sRGB transfer curve instead of a pure power law.
    bool srgb_curve = false;
    /// Camera RGB -> output RGB, rows summing to 1.
    Matrix3 ccm{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    Rgb wb_gains{1.0, 1.0, 1.0};
    double black_level = 0.0;
    double white_level = 1023.0;
    ToneMap tone_map = ToneMap::identity;
    DemosaicMode demosaic = DemosaicMode::binned;

    /// Throws ParameterError / SingularityError for invalid settings.
    void validate() const;

    friend bool operator==(const IspConfig&, const IspConfig&) = default;
};

Matrix3 invert(const Matrix3& m);

/// Display-referred value -> linear value.
double decode_gamma(double v, const IspConfig& config);
double encode_gamma(double linear, const IspConfig& config);
double apply_tone(double v, ToneMap tone);
double invert_tone(double v, ToneMap tone);

/// Luminance weights used for white (W, EVS_W) cells.
inline constexpr Rgb kLuminanceWeights{0.2126, 0.7152, 0.0722};

/// sRGB in [0, 1] -> clean linear mosaic in DN: inverse tone map and gamma,
/// inverse color matrix, inverse white balance, scaling to
/// [black_level, white_level], then per-cell channel selection (luminance for
/// white cells). Negative camera-space values are clamped at 0.
/// Throws DomainError for inputs outside [0, 1].
ImagePlane inverse_pipeline(const RgbImage& srgb, const IspConfig& config, const CfaLayout& cfa);

/// Bilinear demosaic of a linear mosaic. EVS and white cells are first
/// in-filled from the nearest same-channel APS samples; native samples are
/// reproduced exactly in full mode.
RgbImage demosaic(const ImagePlane& mosaic, const CfaLayout& cfa, DemosaicMode mode = DemosaicMode::full);

/// RAW -> sRGB: subtract black level and fixed-pattern maps (clamped at 0),
/// normalize, demosaic, white balance, color matrix, clip, gamma, tone map.
RgbImage forward_pipeline(const RawFrame& raw, const ApsNoiseParams& aps, const IspConfig& config,
                          const CfaLayout& cfa);

}  // namespace hesim::isp
