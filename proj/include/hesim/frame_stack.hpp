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

#include <vector>

#include "hesim/image.hpp"

namespace hesim {

/// Frames captured with one exposure setting; the unit of calibration input.
struct FrameStack {
    std::vector<ImagePlane> frames;
    double exposure_ms = 0.0;
    bool is_dark = false;

    /// Throws InsufficientDataError for fewer than 2 frames, LayoutError for
    /// mixed dimensions, DomainError for non-positive exposure.
    void validate() const;
};

struct MeanVariance {
    ImagePlane mean;
    /// Unbiased (n - 1) sample variance.
    ImagePlane variance;
};

/// Per-pixel sample mean and variance of a stack (two-pass).
MeanVariance stack_mean_var(const FrameStack& stack);

/// Converts a RAW readout to a plane of DN values.
ImagePlane to_plane(const RawFrame& raw);

}  // namespace hesim
