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

#include "hesim/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hesim/errors.hpp"

namespace hesim {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {}

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
        throw LayoutError("ImagePlane: data length " + std::to_string(data_.size()) + " does not match " +
                          std::to_string(width_) + "x" + std::to_string(height_));
    }
}

void RawFrame::validate() const {
    if (bit_depth < 1 || bit_depth > 16) throw FormatError("RawFrame: bit depth must be in [1, 16]");
    if (exposure_us == 0) throw FormatError("RawFrame: exposure must be positive");
    if (data.size() != width * height) throw LayoutError("RawFrame: data length does not match dimensions");
    const auto limit = max_value();
    if (std::any_of(data.begin(), data.end(), [&](std::uint16_t v) { return v > limit; })) {
        throw FormatError("RawFrame: sample exceeds 2^bit_depth - 1");
    }
}

std::size_t PixelMask::count() const noexcept {
    return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; }));
}

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* context) {
    if (!a.same_shape(b)) {
        throw LayoutError(std::string(context) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
    }
}

}  // namespace hesim
