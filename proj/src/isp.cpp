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

#include "hesim/isp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hesim/errors.hpp"

namespace hesim::isp {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Rgb multiply(const Matrix3& m, const Rgb& v) {
    Rgb out{};
    for (int r = 0; r < 3; ++r) {
        out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
    }
    return out;
}

double determinant(const Matrix3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Values of the in-filled mosaic: EVS and white cells replaced by the mean
/// of the nearest native samples of their infill channel.
ImagePlane infill(const ImagePlane& mosaic, const CfaLayout& cfa) {
    const std::size_t w = mosaic.width();
    const std::size_t h = mosaic.height();
    ImagePlane out = mosaic;
    const auto max_radius = static_cast<long>(2 * std::max(cfa.block_width(), cfa.block_height()));
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (cfa.is_native_sample_at(x, y)) {
                continue;
            }
            const int channel = cfa.infill_channel_at(x, y);
            double sum = 0.0;
            int count = 0;
            for (long d = 1; d <= max_radius && count == 0; ++d) {
                for (long dy = -d; dy <= d; ++dy) {
                    const long rest = d - std::abs(dy);
                    for (long dx : {-rest, rest}) {
                        const long sx = static_cast<long>(x) + dx;
                        const long sy = static_cast<long>(y) + dy;
                        if (sx < 0 || sy < 0 || sx >= static_cast<long>(w) || sy >= static_cast<long>(h)) {
                            continue;
                        }
                        const auto ux = static_cast<std::size_t>(sx);
                        const auto uy = static_cast<std::size_t>(sy);
                        if (cfa.is_native_sample_at(ux, uy) && cfa.infill_channel_at(ux, uy) == channel) {
                            sum += mosaic.at(ux, uy);
                            ++count;
                        }
                        if (rest == 0) {
                            break;
                        }
                    }
                }
            }
            if (count == 0) {
                throw LayoutError("demosaic: no APS sample of the required channel near (" + std::to_string(x) + ", " +
                                  std::to_string(y) + ")");
            }
            out.at(x, y) = sum / count;
        }
    }
    return out;
}

/// Normalized convolution with a separable tent of radius (rx, ry), per
/// channel; sites of a channel keep their own value.
RgbImage bilinear(const ImagePlane& filled, const CfaLayout& cfa) {
    const std::size_t w = filled.width();
    const std::size_t h = filled.height();
    const auto rx = static_cast<long>(cfa.block_width());
    const auto ry = static_cast<long>(cfa.block_height());
    RgbImage out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            std::array<double, 3> num{};
            std::array<double, 3> den{};
            for (long dy = -(ry - 1); dy <= ry - 1; ++dy) {
                const long sy = static_cast<long>(y) + dy;
                if (sy < 0 || sy >= static_cast<long>(h)) {
                    continue;
                }
                const double wy = 1.0 - static_cast<double>(std::abs(dy)) / static_cast<double>(ry);
                for (long dx = -(rx - 1); dx <= rx - 1; ++dx) {
                    const long sx = static_cast<long>(x) + dx;
                    if (sx < 0 || sx >= static_cast<long>(w)) {
                        continue;
                    }
                    const double wgt = wy * (1.0 - static_cast<double>(std::abs(dx)) / static_cast<double>(rx));
                    const auto ux = static_cast<std::size_t>(sx);
                    const auto uy = static_cast<std::size_t>(sy);
                    const int c = cfa.infill_channel_at(ux, uy);
                    num[c] += wgt * filled.at(ux, uy);
                    den[c] += wgt;
                }
            }
            const int own = cfa.infill_channel_at(x, y);
            Rgb& px = out.at(x, y);
            for (int c = 0; c < 3; ++c) {
                if (c == own) {
                    px[c] = filled.at(x, y);
                } else if (den[c] > 0.0) {
                    px[c] = num[c] / den[c];
                } else {
                    px[c] = 0.0;
                }
            }
        }
    }
    return out;
}

RgbImage upsample2x(const RgbImage& half, std::size_t w, std::size_t h) {
    RgbImage out(w, h);
    const auto hw = static_cast<double>(half.width);
    const auto hh = static_cast<double>(half.height);
    for (std::size_t y = 0; y < h; ++y) {
        const double v = std::clamp((static_cast<double>(y) + 0.5) / 2.0 - 0.5, 0.0, hh - 1.0);
        const auto y0 = static_cast<std::size_t>(v);
        const std::size_t y1 = std::min(y0 + 1, half.height - 1);
        const double fy = v - static_cast<double>(y0);
        for (std::size_t x = 0; x < w; ++x) {
            const double u = std::clamp((static_cast<double>(x) + 0.5) / 2.0 - 0.5, 0.0, hw - 1.0);
            const auto x0 = static_cast<std::size_t>(u);
            const std::size_t x1 = std::min(x0 + 1, half.width - 1);
            const double fx = u - static_cast<double>(x0);
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - fx) * half.at(x0, y0)[c] + fx * half.at(x1, y0)[c];
                const double bottom = (1.0 - fx) * half.at(x0, y1)[c] + fx * half.at(x1, y1)[c];
                out.at(x, y)[c] = (1.0 - fy) * top + fy * bottom;
            }
        }
    }
    return out;
}

RgbImage demosaic_binned(const ImagePlane& filled, const CfaLayout& cfa) {
    const std::size_t w = filled.width();
    const std::size_t h = filled.height();
    const std::size_t bw = cfa.block_width() / 2;
    const std::size_t bh = cfa.block_height() / 2;
    std::vector<CfaRole> roles(bw * bh);
    constexpr CfaRole kChannelRole[3] = {CfaRole::R, CfaRole::G, CfaRole::B};
    for (std::size_t cy = 0; cy < bh; ++cy) {
        for (std::size_t cx = 0; cx < bw; ++cx) {
            roles[cy * bw + cx] = kChannelRole[cfa.infill_channel_at(2 * cx, 2 * cy)];
        }
    }
    const CfaLayout half_layout(bw, bh, std::move(roles), cfa.name() + "_binned");
    ImagePlane binned(w / 2, h / 2);
    for (std::size_t y = 0; y < h / 2; ++y) {
        for (std::size_t x = 0; x < w / 2; ++x) {
            binned.at(x, y) = 0.25 * (filled.at(2 * x, 2 * y) + filled.at(2 * x + 1, 2 * y) +
                                      filled.at(2 * x, 2 * y + 1) + filled.at(2 * x + 1, 2 * y + 1));
        }
    }
    return upsample2x(bilinear(binned, half_layout), w, h);
}

}  // namespace

void IspConfig::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ParameterError("isp: gamma must be positive");
    }
    for (double g : wb_gains) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw ParameterError("isp: white-balance gains must be positive");
        }
    }
    if (!(white_level > black_level) || black_level < 0.0) {
        throw ParameterError("isp: require 0 <= black_level < white_level");
    }
    for (const auto& row : ccm) {
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw ParameterError("isp: color matrix has non-finite entries");
            }
        }
    }
    if (std::abs(determinant(ccm)) < 1e-12) {
        throw SingularityError("isp: color matrix is singular", 0);
    }
}

Matrix3 invert(const Matrix3& m) {
    const double det = determinant(m);
    if (std::abs(det) < 1e-12) {
        throw SingularityError("isp: color matrix is singular", 0);
    }
    Matrix3 inv{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            // Cofactor of (c, r) divided by det.
            const int r0 = (c + 1) % 3;
            const int r1 = (c + 2) % 3;
            const int c0 = (r + 1) % 3;
            const int c1 = (r + 2) % 3;
            inv[r][c] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    return inv;
}

double decode_gamma(double v, const IspConfig& config) {
    v = clamp01(v);
    if (config.srgb_curve) {
        return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
    }
    return std::pow(v, config.gamma);
}

double encode_gamma(double linear, const IspConfig& config) {
    linear = clamp01(linear);
    if (config.srgb_curve) {
        return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
    }
    return std::pow(linear, 1.0 / config.gamma);
}

double apply_tone(double v, ToneMap tone) {
    v = clamp01(v);
    if (tone == ToneMap::global_curve) {
        return v * v * (3.0 - 2.0 * v);
    }
    return v;
}

double invert_tone(double v, ToneMap tone) {
    v = clamp01(v);
    if (tone == ToneMap::global_curve) {
        return 0.5 - std::sin(std::asin(1.0 - 2.0 * v) / 3.0);
    }
    return v;
}

ImagePlane inverse_pipeline(const RgbImage& srgb, const IspConfig& config, const CfaLayout& cfa) {
    config.validate();
    cfa.check_tiles(srgb.width, srgb.height);
    if (srgb.pixels.size() != srgb.width * srgb.height) {
        throw LayoutError("inverse_pipeline: pixel buffer does not match dimensions");
    }
    const Matrix3 ccm_inv = invert(config.ccm);
    const double scale = config.white_level - config.black_level;
    ImagePlane out(srgb.width, srgb.height);
    for (std::size_t y = 0; y < srgb.height; ++y) {
        for (std::size_t x = 0; x < srgb.width; ++x) {
            const Rgb& in = srgb.at(x, y);
            Rgb lin{};
            for (int c = 0; c < 3; ++c) {
                if (!(in[c] >= 0.0 && in[c] <= 1.0)) {
                    throw DomainError("inverse_pipeline: sRGB values must lie in [0, 1]");
                }
                lin[c] = decode_gamma(invert_tone(in[c], config.tone_map), config);
            }
            Rgb cam = multiply(ccm_inv, lin);
            for (int c = 0; c < 3; ++c) {
                cam[c] = std::max(0.0, cam[c]) / config.wb_gains[c];
            }
            const auto channel = filter_channel(cfa.role_at(x, y));
            const double v = channel ? cam[*channel]
                                     : kLuminanceWeights[0] * cam[0] + kLuminanceWeights[1] * cam[1] +
                                           kLuminanceWeights[2] * cam[2];
            out.at(x, y) = config.black_level + v * scale;
        }
    }
    return out;
}

RgbImage demosaic(const ImagePlane& mosaic, const CfaLayout& cfa, DemosaicMode mode) {
    cfa.check_tiles(mosaic.width(), mosaic.height());
    const ImagePlane filled = infill(mosaic, cfa);
    if (mode == DemosaicMode::binned && cfa.quad_binnable()) {
        return demosaic_binned(filled, cfa);
    }
    return bilinear(filled, cfa);
}

RgbImage forward_pipeline(const RawFrame& raw, const ApsNoiseParams& aps, const IspConfig& config,
                          const CfaLayout& cfa) {
    config.validate();
    raw.validate();
    cfa.check_tiles(raw.width, raw.height);
    if (aps.width() != raw.width || aps.height() != raw.height || aps.n_dp.width() != raw.width ||
        aps.n_dp.height() != raw.height || aps.n_row.size() != raw.height) {
        throw LayoutError("forward_pipeline: calibration maps do not match the RAW frame");
    }
    const double dt = raw.exposure_ms();
    const double scale = config.white_level - config.black_level;
    ImagePlane linear(raw.width, raw.height);
    for (std::size_t y = 0; y < raw.height; ++y) {
        for (std::size_t x = 0; x < raw.width; ++x) {
            const double offset = config.black_level + aps.n_blc.at(x, y) + aps.n_row[y] + dt * aps.n_dp.at(x, y);
            linear.at(x, y) = std::max(0.0, static_cast<double>(raw.at(x, y)) - offset) / scale;
        }
    }
    RgbImage rgb = demosaic(linear, cfa, config.demosaic);
    for (Rgb& px : rgb.pixels) {
        for (int c = 0; c < 3; ++c) {
            px[c] *= config.wb_gains[c];
        }
        px = multiply(config.ccm, px);
        for (int c = 0; c < 3; ++c) {
            px[c] = clamp01(apply_tone(encode_gamma(clamp01(px[c]), config), config.tone_map));
        }
    }
    return rgb;
}

}  // namespace hesim::isp
