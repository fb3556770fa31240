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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hesim/image.hpp"

namespace hesim::io {

/// HRAW container: 32-byte little-endian header
///   0  magic "HRAW"        4  version u16        6  bit_depth u16
///   8  width u32          12  height u32        16  exposure_us u64
///  24  sample format u16 (0 = u16 DN, 1 = f64)  26  reserved (zero)
/// followed by row-major little-endian samples.
inline constexpr std::uint16_t kHrawVersion = 1;
inline constexpr std::size_t kHrawHeaderSize = 32;

std::vector<std::uint8_t> encode_hraw(const RawFrame& frame);
RawFrame decode_hraw(std::span<const std::uint8_t> bytes);

/// Real-valued planes (calibration maps) stored losslessly as f64 samples.
std::vector<std::uint8_t> encode_hraw_plane(const ImagePlane& plane);
/// Accepts both sample formats; u16 samples are converted to doubles.
ImagePlane decode_hraw_plane(std::span<const std::uint8_t> bytes);

void write_hraw(const std::filesystem::path& path, const RawFrame& frame);
RawFrame read_hraw(const std::filesystem::path& path);
void write_hraw_plane(const std::filesystem::path& path, const ImagePlane& plane);
ImagePlane read_hraw_plane(const std::filesystem::path& path);

/// Whole-file helpers shared by the binary formats.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace hesim::io
