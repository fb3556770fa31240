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

#include "hesim/random.hpp"

#include <cmath>
#include <numbers>

#include "hesim/errors.hpp"

namespace hesim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t key_hash(const RandomKey& key) noexcept {
    std::uint64_t h = mix(key.seed + kGolden);
    h = mix(h ^ (key.frame + 0x632be59bd9b4e019ULL));
    h = mix(h ^ (key.pixel + 0x8cb92ba72f3d8dd7ULL));
    h = mix(h ^ (key.draw + 0xd6e8feb86659fd93ULL));
    return h;
}

double uniform_sample(const RandomKey& key) noexcept { return to_open_unit(key_hash(key)); }

double gaussian_sample(const RandomKey& key, double mean, double sigma) {
    if (!(sigma >= 0.0)) throw DomainError("gaussian_sample: sigma must be non-negative");
    if (sigma == 0.0) return mean;
    const std::uint64_t h = key_hash(key);
    const double u1 = to_open_unit(h);
    const double u2 = to_open_unit(mix(h + kGolden));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(mix(seed ^ kGolden) + stream * kGolden);
}

}  // namespace hesim
