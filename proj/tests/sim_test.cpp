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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "hesim/errors.hpp"
#include "hesim/io/image_io.hpp"
#include "hesim/numerics.hpp"
#include "hesim/simulator.hpp"
#include "hesim/validation.hpp"
#include "support.hpp"

namespace {

using namespace hesim;
using namespace hesim::sim;
namespace fs = std::filesystem;

TEST(Simulator, FrameTimestamps) {
    EXPECT_EQ(frame_timestamp_us(0, 3200.0), 0u);
    EXPECT_EQ(frame_timestamp_us(1, 3200.0), 312u);  // 312.5 rounds to even
    EXPECT_EQ(frame_timestamp_us(3, 3200.0), 938u);  // 937.5 rounds to even
    EXPECT_EQ(frame_timestamp_us(3200, 3200.0), 1'000'000u);
    EXPECT_EQ(frame_timestamp_us(7, 30.0), 233'333u);
}

TEST(Simulator, ConfigValidation) {
    SimConfig c;
    EXPECT_NO_THROW(c.validate());
    c.aps_exposure_ms = 40.0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.aps_exposure_ms = 0.1;  // shorter than one 0.3125 ms input frame
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.evs_rate_divisor = 0;
    EXPECT_THROW(c.validate(), ParameterError);
    c = {};
    c.input_fps = 0.0;
    EXPECT_THROW(c.validate(), ParameterError);
}

struct Rig {
    CfaLayout cfa = CfaLayout::preset("gen2");
    isp::IspConfig isp;
    ApsNoiseParams aps = ApsNoiseParams::zero(8, 8, 12, 10);
    EvsNoiseParams evs = EvsNoiseParams::with_zero_maps(4, 4, {1, 1, 0, 0, 0, 0}, 0.5);
    Rig() { isp.gamma = 1.0; }
};

std::vector<RgbImage> flat_frames(const std::vector<double>& levels) {
    std::vector<RgbImage> out;
    for (double v : levels) out.emplace_back(8, 8, Rgb{v, v, v});
    return out;
}

TEST(Simulator, ApsWindowsAverageFramesAndDropPartialWindow) {
    Rig rig;
    SimConfig c;
    c.input_fps = 1000.0;
    c.aps_exposure_ms = 2.0;
    c.aps_frame_period_ms = 3.0;
    // Frames at 0..9 ms; windows [0,2), [3,5), [6,8); [9,11) is incomplete.
    MemoryFrameSource src(flat_frames({0.1, 0.3, 0.9, 0.2, 0.4, 0.9, 0.5, 0.7, 0.9, 0.9}));
    std::vector<RawFrame> raws;
    const auto r = simulate(src, c, rig.cfa, rig.aps, rig.evs, rig.isp,
                            [&](const ApsFrameInfo&, const RawFrame& f) { raws.push_back(f); });
    ASSERT_EQ(r.aps_frames.size(), 3u);
    ASSERT_EQ(raws.size(), 3u);
    const std::vector<double> expected{0.2, 0.3, 0.6};
    for (std::size_t m = 0; m < 3; ++m) {
        EXPECT_EQ(r.aps_frames[m].index, m);
        EXPECT_EQ(r.aps_frames[m].start_us, 3000u * m);
        EXPECT_EQ(r.aps_frames[m].source_frames, 2u);
        EXPECT_EQ(raws[m].exposure_us, 2000u);
        EXPECT_EQ(raws[m].at(0, 0), static_cast<std::uint16_t>(std::nearbyint(expected[m] * 1023.0)));
    }
}

TEST(Simulator, EvsSamplingWithRateDivisor) {
    Rig rig;
    SimConfig c;
    c.input_fps = 1000.0;
    c.aps_exposure_ms = 1.0;
    c.aps_frame_period_ms = 1.0;
    c.evs_rate_divisor = 2;
    // Samples: frame 0, mean(1, 2), mean(3, 4). Second sample doubles brightness.
    MemoryFrameSource src(flat_frames({0.2, 0.3, 0.5, 0.4, 0.4}));
    const auto r = simulate(src, c, rig.cfa, rig.aps, rig.evs, rig.isp, {});
    EXPECT_EQ(r.evs_steps, 2u);
    EXPECT_EQ(r.evs_width, 4u);
    ASSERT_EQ(r.events.size(), 16u);
    for (const auto& e : r.events) {
        EXPECT_EQ(e.polarity, 1);
        EXPECT_EQ(e.t, 2000u);
    }
    // Mean brightness over samples (0.2, 0.4, 0.4) in DN.
    EXPECT_NEAR(r.evs_mean_intensity[0], 1023.0 * (0.2 + 0.4 + 0.4) / 3.0, 1e-9);
}

TEST(Simulator, OnEventBaselineAccumulatesSlowChanges) {
    Rig rig;
    SimConfig c;
    c.input_fps = 1000.0;
    c.aps_exposure_ms = 1.0;
    c.aps_frame_period_ms = 1.0;
    // Each step is a 1.2x change (ln 1.2 < 0.5); three steps add up to ln 1.728 > 0.5.
    MemoryFrameSource per_step(flat_frames({0.3, 0.36, 0.432, 0.5184}));
    EXPECT_TRUE(simulate(per_step, c, rig.cfa, rig.aps, rig.evs, rig.isp, {}).events.empty());
    c.baseline = evs::Baseline::on_event;
    MemoryFrameSource on_event(flat_frames({0.3, 0.36, 0.432, 0.5184}));
    const auto r = simulate(on_event, c, rig.cfa, rig.aps, rig.evs, rig.isp, {});
    ASSERT_EQ(r.events.size(), 16u);
    for (const auto& e : r.events) EXPECT_EQ(e.t, 3000u);
}

TEST(Simulator, SeedChangesNoiseButNotStructure) {
    Rig rig;
    rig.evs.beta_e = {1, 0.001, 1, 0, 0.3, 0};
    SimConfig c;
    c.input_fps = 1000.0;
    c.aps_exposure_ms = 1.0;
    c.aps_frame_period_ms = 1.0;
    auto run = [&](std::uint64_t seed, std::size_t threads) {
        c.seed = seed;
        c.threads = threads;
        MemoryFrameSource src(flat_frames(std::vector<double>(50, 0.5)));
        return simulate(src, c, rig.cfa, rig.aps, rig.evs, rig.isp, {}).events;
    };
    const auto a = run(1, 1);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, run(1, 4));
    EXPECT_NE(a, run(2, 1));
}

TEST(Simulator, ErrorsCarryFrameIndex) {
    Rig rig;
    SimConfig c;
    c.input_fps = 1000.0;
    c.aps_exposure_ms = 1.0;
    c.aps_frame_period_ms = 1.0;
    auto frames = flat_frames({0.2, 0.2, 0.2});
    frames[2] = RgbImage(12, 8);
    MemoryFrameSource src(std::move(frames));
    try {
        simulate(src, c, rig.cfa, rig.aps, rig.evs, rig.isp, {});
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("frame 2"), std::string::npos) << e.what();
    }
    MemoryFrameSource bad_range(flat_frames({0.2, 1.5}));
    EXPECT_THROW(simulate(bad_range, c, rig.cfa, rig.aps, rig.evs, rig.isp, {}), DomainError);
}

TEST(FrameSources, DirectoryAndListFile) {
    const fs::path dir = test_support::scratch_dir("frame_sources");
    fs::create_directories(dir / "seq");
    for (int i : {2, 0, 1}) io::write_image(dir / "seq" / ("f" + std::to_string(i) + ".png"), RgbImage(4, 4, {i / 10.0, 0, 0}));
    std::ofstream(dir / "seq" / "notes.txt") << "ignored";
    auto src = open_frame_source(dir / "seq");
    ASSERT_EQ(src->size(), 3u);
    EXPECT_EQ(src->files()[0].filename(), "f0.png");
    const auto timed = ingest_frames(*src, 100.0);
    EXPECT_EQ(timed[2].t_us, 20'000u);
    EXPECT_NEAR(timed[1].image.at(0, 0)[0], 26.0 / 255.0, 1e-12);

    std::ofstream(dir / "list.txt") << "# comment\nseq/f1.png\n\nseq/f1.png\nseq/f0.png\n";
    auto list = open_frame_source(dir / "list.txt");
    ASSERT_EQ(list->size(), 3u);
    EXPECT_EQ(list->frame(0), list->frame(1));
    EXPECT_THROW(open_frame_source(dir / "absent"), MissingFileError);

    std::ofstream(dir / "broken.txt") << "seq/missing.png\n";
    auto broken = open_frame_source(dir / "broken.txt");
    try {
        broken->frame(0);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("frame 0"), std::string::npos) << e.what();
    }
    fs::remove_all(dir);
}

TEST(Validation, LogHistogramFitOnGeometricCounts) {
    // h[k] = 1000 * 2^-k from the mode: ln h = ln 1000 - (N ln 2) x with x = k / N.
    const std::vector<std::uint64_t> hist{1000, 500, 250, 125, 62, 31, 0, 8};
    const auto fit = fit_log_histogram(hist, 100);
    EXPECT_TRUE(fit.valid);
    EXPECT_EQ(fit.bins, 7u);  // the empty bin is skipped
    EXPECT_NEAR(fit.slope, -100.0 * std::log(2.0), 0.5);
    EXPECT_GT(fit.r_squared, 0.999);
    EXPECT_FALSE(fit_log_histogram(std::vector<std::uint64_t>{1, 10, 3}, 10).valid);
}

TEST(Validation, CountsAndProbabilities) {
    auto params = EvsNoiseParams::with_zero_maps(2, 2, {1, 0, 1, 0, 0.3, 0}, 0.6);
    params.bad_pixel_mask.set(1, 1);
    const std::vector<EventRecord> events{{1, 0, 0, 1}, {2, 0, 0, -1}, {2, 1, 0, 1}, {3, 1, 1, 1}, {3, 0, 0, 1}};
    const auto r = validate_statistics(events, ImagePlane(2, 2, 10.0), params, 10, 2);
    EXPECT_EQ(r.pixels_used, 3u);
    EXPECT_EQ(r.on_events, 3u);   // the masked pixel is excluded
    EXPECT_EQ(r.off_events, 1u);
    EXPECT_DOUBLE_EQ(r.probability.at(0, 0), 3.0 / 20.0);
    EXPECT_DOUBLE_EQ(r.probability.at(1, 0), 1.0 / 20.0);
    ASSERT_GE(r.histogram.size(), 4u);
    EXPECT_EQ(r.histogram[0], 1u);
    EXPECT_EQ(r.histogram[1], 1u);
    EXPECT_EQ(r.histogram[3], 1u);
    ASSERT_FALSE(r.brightness_bins.empty());
    // Model probability Q(theta / sigma_n) with sigma_n = 0.3 sqrt 2.
    EXPECT_NEAR(r.brightness_bins[0].model_probability, numerics::q_function(0.6 / (0.3 * std::sqrt(2.0))), 1e-12);
    const auto j = report_to_json(r);
    EXPECT_EQ(j["pixels_used"], 3);
    EXPECT_TRUE(j.contains("log_histogram_fit"));
    EXPECT_THROW(validate_statistics(events, ImagePlane(2, 2), params, 0), ParameterError);
}

}  // namespace
