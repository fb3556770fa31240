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
#include <filesystem>
#include <span>
#include <vector>

#include "hesim/events.hpp"

namespace hesim::io {

/// HEVT stream: 24-byte little-endian header
///   0  magic "HEVT"   4  version u16   6  reserved u16
///   8  width u32     12  height u32   16  event count u64
/// followed by 14-byte records: t u64 (us), x u16, y u16,
/// polarity u8 (1 = ON, 0 = OFF), reserved u8.
inline constexpr std::uint16_t kHevtVersion = 1;
inline constexpr std::size_t kHevtHeaderSize = 24;
inline constexpr std::size_t kHevtRecordSize = 14;

struct EventStream {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<EventRecord> events;
};

/// Throws FormatError unless the events are canonical and inside the grid.
std::vector<std::uint8_t> encode_hevt(const EventStream& stream);
EventStream decode_hevt(std::span<const std::uint8_t> bytes);

void write_hevt(const std::filesystem::path& path, const EventStream& stream);
EventStream read_hevt(const std::filesystem::path& path);

/// CSV export with header "t_us,x,y,polarity" (polarity 1 = ON, 0 = OFF).
void write_events_csv(const std::filesystem::path& path, std::span<const EventRecord> events);

}  // namespace hesim::io
