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
#include <string>
#include <vector>

#include "hesim/cfa.hpp"
#include "hesim/events.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace hesim::fixture {

/// Smooth procedural sRGB test image in [0.1, 0.9]; `variant` selects one of
/// several frequency/phase patterns and `phase` shifts it (for motion).
RgbImage procedural_image(std::size_t width, std::size_t height, std::size_t variant, double phase = 0.0);

/// Known APS parameters for synthetic data: pedestal and row offsets, a
/// small per-pixel black-level pattern and drift, and a variance polynomial
/// per position scaled by up to +-10%.
ApsNoiseParams aps_truth(const CfaLayout& cfa, std::size_t width, std::size_t height, std::uint16_t bit_depth,
                         std::uint64_t seed);

/// Known EVS trigger parameters used by the synthetic fixture.
TriggerCoefficients evs_truth_beta();

/// Events of a static scene (v_prev = v_curr every step) observed for
/// `trials` sampling intervals at 1 kHz, drawn with per-step keys.
std::vector<EventRecord> static_scene_events(const ImagePlane& intensity, const EvsNoiseParams& params,
                                             std::size_t trials, std::uint64_t seed, std::size_t threads = 1);

struct FixtureSpec {
    std::string preset = "gen2";
    std::size_t width = 64;
    std::size_t height = 64;
    std::uint16_t bit_depth = 12;
    std::size_t frames_per_stack = 50;
    std::vector<double> exposures_ms{5.0, 50.0, 100.0};
    std::vector<double> levels_dn{20.0, 100.0, 250.0, 450.0, 700.0};
    std::size_t evs_trials = 2000;
    std::size_t evs_levels = 20;
    std::size_t video_frames = 100;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

/// Writes a complete synthetic data set:
///   truth.json (+ maps)        generating parameters
///   dark/dt_<ms>/NNNN.hraw     dark stacks
///   flat/L<dn>_dt_<ms>/...     illuminated flat-field stacks
///   evs/dark.hevt, evs/graded.hevt, evs/graded_intensity.hraw
///   frames/NNNN.png            moving procedural sequence
///   static.png, static.txt     flat gray frame and a list repeating it
///   fixture.json               trial counts and layout summary
void write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec);

}  // namespace hesim::fixture
