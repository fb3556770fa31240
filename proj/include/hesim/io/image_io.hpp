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

#include <filesystem>

#include "hesim/image.hpp"

namespace hesim::io {

/// Reads an 8/16-bit PNG (gray, RGB, with or without alpha) or binary PPM
/// (P6, maxval up to 65535) into RGB values in [0, 1].
RgbImage read_image(const std::filesystem::path& path);

/// Writes PNG or PPM according to the file extension; bit_depth 8 or 16.
/// Values are clipped to [0, 1] and rounded.
void write_image(const std::filesystem::path& path, const RgbImage& image, int bit_depth = 8);

}  // namespace hesim::io
