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
#include <span>
#include <vector>

namespace hesim {

/// Single-channel image of real values, row-major. Holds clean mosaics,
/// calibration maps and intermediate linear frames (units: DN unless noted).
class ImagePlane {
   public:
    ImagePlane() = default;
    ImagePlane(std::size_t width, std::size_t height, double fill = 0.0);
    ImagePlane(std::size_t width, std::size_t height, std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }
    double at(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const ImagePlane& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

   private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> data_;
};

using Rgb = std::array<double, 3>;

/// Three-channel image, values normally in [0, 1].
struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels;

    RgbImage() = default;
    RgbImage(std::size_t w, std::size_t h, Rgb fill = {0.0, 0.0, 0.0}) : width(w), height(h), pixels(w * h, fill) {}

    Rgb& at(std::size_t x, std::size_t y) noexcept { return pixels[y * width + x]; }
    const Rgb& at(std::size_t x, std::size_t y) const noexcept { return pixels[y * width + x]; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Quantized sensor readout.
struct RawFrame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t bit_depth = 10;
    std::uint64_t exposure_us = 0;
    std::vector<std::uint16_t> data;

    double exposure_ms() const noexcept { return static_cast<double>(exposure_us) / 1000.0; }
    std::uint32_t max_value() const noexcept { return (1u << bit_depth) - 1u; }
    std::uint16_t at(std::size_t x, std::size_t y) const noexcept { return data[y * width + x]; }

    /// Checks 1 <= bit_depth <= 16, exposure > 0, sample range and length.
    void validate() const;

    friend bool operator==(const RawFrame&, const RawFrame&) = default;
};

/// Per-pixel boolean flags (bad pixels, low-confidence estimates).
struct PixelMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> flags;

    PixelMask() = default;
    PixelMask(std::size_t w, std::size_t h) : width(w), height(h), flags(w * h, 0) {}

    bool at(std::size_t x, std::size_t y) const noexcept { return flags[y * width + x] != 0; }
    void set(std::size_t x, std::size_t y, bool v = true) noexcept { flags[y * width + x] = v ? 1 : 0; }
    std::size_t count() const noexcept;

    friend bool operator==(const PixelMask&, const PixelMask&) = default;
};

/// Throws LayoutError unless both planes have identical dimensions.
void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* context);

}  // namespace hesim
