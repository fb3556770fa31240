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

#include "hesim/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include "json.hpp"

#include "hesim/aps_model.hpp"
#include "hesim/errors.hpp"
#include "hesim/evs_model.hpp"
#include "hesim/io/calibration_file.hpp"
#include "hesim/io/hevt.hpp"
#include "hesim/io/hraw.hpp"
#include "hesim/io/image_io.hpp"
#include "hesim/random.hpp"

namespace hesim::fixture {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kThetaHw = 0.75;

std::string numbered(std::size_t i, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu%s", i, ext);
    return buf;
}

std::string dn_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

RgbImage procedural_image(std::size_t width, std::size_t height, std::size_t variant, double phase) {
    RgbImage img(width, height);
    const auto v = static_cast<double>(variant);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = static_cast<double>(x);
            const double fy = static_cast<double>(y);
            for (int c = 0; c < 3; ++c) {
                const double angle = 0.7 * v + 1.9 * c;
                const double wave1 = 140.0 + 17.0 * std::fmod(3.0 * v + c, 5.0);
                const double wave2 = 110.0 + 23.0 * std::fmod(2.0 * v + 2.0 * c, 4.0);
                const double a = std::sin(kTwoPi * (fx * std::cos(angle) + fy * std::sin(angle)) / wave1 + phase +
                                          0.9 * v + 1.3 * c);
                const double b = std::cos(kTwoPi * (fx * std::sin(0.5 * angle) - fy * std::cos(0.5 * angle)) / wave2 +
                                          0.4 * v - 0.6 * c);
                img.at(x, y)[c] = std::clamp(0.5 + 0.2 * a + 0.15 * b, 0.1, 0.9);
            }
        }
    }
    return img;
}

ApsNoiseParams aps_truth(const CfaLayout& cfa, std::size_t width, std::size_t height, std::uint16_t bit_depth,
                         std::uint64_t seed) {
    cfa.check_tiles(width, height);
    ApsNoiseParams p = ApsNoiseParams::zero(width, height, cfa.position_count(), bit_depth);
    const std::uint64_t s = derive_seed(seed, 0x41505354);
    for (std::size_t y = 0; y < height; ++y) {
        p.n_row[y] = gaussian_sample({s, 0, y, 0}, 64.0, 1.0);
        double row_mean = 0.0;
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t i = y * width + x;
            p.n_blc[i] = gaussian_sample({s, 1, i, 0}, 0.0, 1.5);
            row_mean += p.n_blc[i];
            const bool hot = i % 97 == 13;
            p.n_dp[i] = hot ? 0.5 : std::max(0.0, gaussian_sample({s, 2, i, 0}, 0.02, 0.005));
        }
        // Row offsets carry the row mean, so the per-pixel part is zero-mean per row.
        row_mean /= static_cast<double>(width);
        for (std::size_t x = 0; x < width; ++x) p.n_blc[y * width + x] -= row_mean;
    }
    const VarianceCoefficients base{20.0, 0.25, 1.0, 1e-4, 1e-3, 2e-4};
    for (std::size_t pos = 0; pos < p.beta_a.size(); ++pos) {
        const double scale = 1.0 + 0.05 * (static_cast<double>((pos * 7) % 5) - 2.0);
        for (std::size_t j = 0; j < 6; ++j) p.beta_a[pos][j] = base[j] * scale;
    }
    return p;
}

TriggerCoefficients evs_truth_beta() { return {1.0, 0.002, 1.0, 0.0004, 0.2, 0.3}; }

std::vector<EventRecord> static_scene_events(const ImagePlane& intensity, const EvsNoiseParams& params,
                                             std::size_t trials, std::uint64_t seed, std::size_t threads) {
    const evs::VoltageField v = evs::intensity_to_voltage(intensity, params);
    std::vector<EventRecord> out;
    for (std::size_t j = 1; j <= trials; ++j) {
        auto step = evs::step_events(v, v, intensity, params, params.theta(), j * 1000, {seed, j, 0, 0}, threads);
        out.insert(out.end(), step.begin(), step.end());
    }
    return out;
}

void write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec) {
    namespace fs = std::filesystem;
    const CfaLayout cfa = CfaLayout::preset(spec.preset);
    cfa.check_tiles(spec.width, spec.height);
    if (spec.frames_per_stack < 2) throw ParameterError("fixture: need at least 2 frames per stack");
    fs::create_directories(dir);

    io::Calibration truth{spec.width, spec.height, cfa, {}, std::nullopt, std::nullopt, {}};
    truth.isp.white_level = static_cast<double>((1u << spec.bit_depth) - 1u);
    truth.aps = aps_truth(cfa, spec.width, spec.height, spec.bit_depth, spec.seed);
    const std::size_t ew = cfa.evs_width(spec.width);
    const std::size_t eh = cfa.evs_height(spec.height);
    if (cfa.has_evs()) truth.evs = EvsNoiseParams::with_zero_maps(ew, eh, evs_truth_beta(), kThetaHw);
    io::save_calibration(dir / "truth.json", truth);
    const ApsNoiseParams& aps = *truth.aps;

    // APS stacks.
    std::uint64_t stack_id = 0;
    auto write_stack = [&](const fs::path& stack_dir, double clean_dn, double dt) {
        fs::create_directories(stack_dir);
        const ImagePlane clean(spec.width, spec.height, clean_dn);
        const std::uint64_t s = derive_seed(spec.seed, 0x100 + stack_id++);
        for (std::size_t f = 0; f < spec.frames_per_stack; ++f) {
            io::write_hraw(stack_dir / numbered(f, ".hraw"),
                           aps::synthesize_raw(clean, dt, aps, cfa, {s, f, 0, 0}, spec.threads));
        }
    };
    for (double dt : spec.exposures_ms) write_stack(dir / "dark" / ("dt_" + dn_label(dt)), 0.0, dt);
    for (double level : spec.levels_dn) {
        for (double dt : spec.exposures_ms) {
            write_stack(dir / "flat" / ("L" + dn_label(level) + "_dt_" + dn_label(dt)), level, dt);
        }
    }

    // EVS counts: dark scene and a graded static scene.
    nlohmann::json summary = {{"preset", spec.preset},
                              {"width", spec.width},
                              {"height", spec.height},
                              {"bit_depth", spec.bit_depth},
                              {"theta_hw", kThetaHw},
                              {"seed", spec.seed}};
    if (truth.evs) {
        fs::create_directories(dir / "evs");
        const ImagePlane dark(ew, eh, 0.0);
        io::write_hevt(dir / "evs" / "dark.hevt",
                       {ew, eh, static_scene_events(dark, *truth.evs, spec.evs_trials, derive_seed(spec.seed, 0x200),
                                                    spec.threads)});
        ImagePlane graded(ew, eh);
        const double top = 0.75 * truth.isp.white_level;
        const std::size_t levels = std::max<std::size_t>(spec.evs_levels, 2);
        for (std::size_t i = 0; i < graded.size(); ++i) {
            const std::size_t level = i * levels / graded.size();
            graded[i] = top * static_cast<double>(level) / static_cast<double>(levels - 1);
        }
        io::write_hraw_plane(dir / "evs" / "graded_intensity.hraw", graded);
        io::write_hevt(dir / "evs" / "graded.hevt",
                       {ew, eh, static_scene_events(graded, *truth.evs, spec.evs_trials, derive_seed(spec.seed, 0x201),
                                                    spec.threads)});
        summary["evs_trials"] = spec.evs_trials;
        summary["evs_dark_trials"] = spec.evs_trials;
    }

    // Frame sequences for the simulator.
    fs::create_directories(dir / "frames");
    for (std::size_t k = 0; k < spec.video_frames; ++k) {
        io::write_image(dir / "frames" / numbered(k, ".png"),
                        procedural_image(spec.width, spec.height, 0, 0.05 * static_cast<double>(k)));
    }
    io::write_image(dir / "static.png", RgbImage(spec.width, spec.height, {0.45, 0.45, 0.45}));
    {
        std::ofstream list(dir / "static.txt", std::ios::trunc);
        list << "# one flat frame repeated: a static scene\n";
        for (std::size_t k = 0; k < spec.video_frames; ++k) list << "static.png\n";
        if (!list) throw IoError("cannot write " + (dir / "static.txt").string());
    }
    std::ofstream out(dir / "fixture.json", std::ios::trunc);
    out << summary.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + (dir / "fixture.json").string());
}

}  // namespace hesim::fixture
