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

#include "hesim/events.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "hesim/errors.hpp"

namespace hesim {

bool canonical_less(const EventRecord& a, const EventRecord& b) noexcept {
    return std::tie(a.t, a.y, a.x) < std::tie(b.t, b.y, b.x);
}

void sort_canonical(std::vector<EventRecord>& events) { std::stable_sort(events.begin(), events.end(), canonical_less); }

bool is_canonical(std::span<const EventRecord> events) noexcept {
    return std::is_sorted(events.begin(), events.end(), canonical_less);
}

void validate_stream(std::span<const EventRecord> events, std::size_t evs_width, std::size_t evs_height) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const EventRecord& e = events[i];
        if (e.x >= evs_width || e.y >= evs_height) {
            throw FormatError("event " + std::to_string(i) + " lies outside the " + std::to_string(evs_width) + "x" +
                              std::to_string(evs_height) + " EVS grid");
        }
        if (e.polarity != 1 && e.polarity != -1) throw FormatError("event " + std::to_string(i) + " has invalid polarity");
    }
    if (!is_canonical(events)) throw FormatError("event stream is not sorted by (t, y, x)");
}

}  // namespace hesim
