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

#include "hesim/frame_stack.hpp"

#include "hesim/errors.hpp"

namespace hesim {

void FrameStack::validate() const {
    if (frames.size() < 2) throw InsufficientDataError("frame stack needs at least 2 frames for a variance estimate");
    if (!(exposure_ms > 0.0)) throw DomainError("frame stack exposure must be positive");
    for (const ImagePlane& f : frames) require_same_shape(frames.front(), f, "frame stack");
}

MeanVariance stack_mean_var(const FrameStack& stack) {
    stack.validate();
    const std::size_t w = stack.frames.front().width();
    const std::size_t h = stack.frames.front().height();
    const double n = static_cast<double>(stack.frames.size());

    MeanVariance out{ImagePlane(w, h), ImagePlane(w, h)};
    for (const ImagePlane& f : stack.frames) {
        for (std::size_t i = 0; i < f.size(); ++i) out.mean[i] += f[i];
    }
    for (std::size_t i = 0; i < out.mean.size(); ++i) out.mean[i] /= n;
    for (const ImagePlane& f : stack.frames) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = f[i] - out.mean[i];
            out.variance[i] += d * d;
        }
    }
    for (std::size_t i = 0; i < out.variance.size(); ++i) out.variance[i] /= n - 1.0;
    return out;
}

ImagePlane to_plane(const RawFrame& raw) {
    std::vector<double> values(raw.data.begin(), raw.data.end());
    return ImagePlane(raw.width, raw.height, std::move(values));
}

}  // namespace hesim
