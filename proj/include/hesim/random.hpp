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

namespace hesim {

/// Coordinates of one random draw. Every draw in a simulation is a pure
/// function of its key, so results do not depend on evaluation order or on
/// how work is split across threads.
struct RandomKey {
    std::uint64_t seed = 0;
    std::uint64_t frame = 0;
    std::uint64_t pixel = 0;
    std::uint64_t draw = 0;

    RandomKey with_pixel(std::uint64_t p) const noexcept { return {seed, frame, p, draw}; }
};

/// Deterministic 64-bit hash of the full key.
std::uint64_t key_hash(const RandomKey& key) noexcept;

/// Uniform variate in the open interval (0, 1), 53-bit resolution.
double uniform_sample(const RandomKey& key) noexcept;

/// Normal variate with the given mean and standard deviation (Box-Muller on
/// two hashed uniforms). sigma == 0 returns `mean` exactly; negative sigma
/// throws DomainError.
double gaussian_sample(const RandomKey& key, double mean, double sigma);

/// Independent sub-seed for a named stream (e.g. APS vs EVS noise).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace hesim
