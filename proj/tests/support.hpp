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

// Helpers shared by the unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "hesim/evs_model.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"
#include "hesim/parallel.hpp"

namespace hesim::test_support {

inline std::size_t hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct PixelCounts {
    std::vector<std::uint64_t> on;
    std::vector<std::uint64_t> off;
};

/// ON/OFF counts of a static scene over `trials` steps. Trials are split
/// across threads; each step uses its own key, so the counts do not depend
/// on the split.
inline PixelCounts count_static_events(const ImagePlane& intensity, const EvsNoiseParams& params, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads = hardware_threads()) {
    const evs::VoltageField v = evs::intensity_to_voltage(intensity, params);
    const std::size_t n = intensity.size();
    const std::size_t chunks = std::min(threads, std::max<std::size_t>(trials, 1));
    std::vector<PixelCounts> partial(chunks, PixelCounts{std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n)});
    parallel_for(chunks, chunks, [&](std::size_t c_begin, std::size_t c_end) {
        for (std::size_t c = c_begin; c < c_end; ++c) {
            const std::size_t begin = trials * c / chunks;
            const std::size_t end = trials * (c + 1) / chunks;
            for (std::size_t j = begin; j < end; ++j) {
                const auto events =
                    evs::step_events(v, v, intensity, params, params.theta(), j, {seed, j, 0, 0}, 1);
                for (const auto& e : events) {
                    const std::size_t i = static_cast<std::size_t>(e.y) * intensity.width() + e.x;
                    (e.polarity > 0 ? partial[c].on : partial[c].off)[i] += 1;
                }
            }
        }
    });
    PixelCounts total{std::vector<std::uint64_t>(n), std::vector<std::uint64_t>(n)};
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < n; ++i) {
            total.on[i] += p.on[i];
            total.off[i] += p.off[i];
        }
    }
    return total;
}

/// Fresh, empty temporary directory unique to `name` and this process.
inline std::filesystem::path scratch_dir(const std::string& name) {
    std::random_device rd;
    const auto dir = std::filesystem::temp_directory_path() / ("hesim_" + name + "_" + std::to_string(rd()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace hesim::test_support
