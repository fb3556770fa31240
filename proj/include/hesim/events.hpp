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
#include <span>
#include <vector>

namespace hesim {

struct EventRecord {
    std::uint64_t t = 0;  ///< microseconds
    std::uint16_t x = 0;  ///< EVS-grid column
    std::uint16_t y = 0;  ///< EVS-grid row
    std::int8_t polarity = 1;  ///< +1 ON, -1 OFF

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Canonical stream order: by timestamp, ties broken by (y, x).
bool canonical_less(const EventRecord& a, const EventRecord& b) noexcept;
void sort_canonical(std::vector<EventRecord>& events);
bool is_canonical(std::span<const EventRecord> events) noexcept;

/// Throws FormatError for out-of-grid coordinates, invalid polarity or
/// non-canonical order.
void validate_stream(std::span<const EventRecord> events, std::size_t evs_width, std::size_t evs_height);

}  // namespace hesim
