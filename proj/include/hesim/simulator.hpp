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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hesim/cfa.hpp"
#include "hesim/events.hpp"
#include "hesim/evs_model.hpp"
#include "hesim/image.hpp"
#include "hesim/isp.hpp"
#include "hesim/params.hpp"

namespace hesim::sim {

struct SimConfig {
    double input_fps = 3200.0;
    double aps_exposure_ms = 10.0;
    double aps_frame_period_ms = 33.0;
    std::size_t evs_rate_divisor = 1;
    std::uint64_t seed = 0;
    evs::Baseline baseline = evs::Baseline::per_step;
    /// Worker threads; never affects the output.
    std::size_t threads = 1;

    /// Throws ParameterError unless exposure <= period, at least one input
    /// frame falls in each exposure and the divisor is >= 1.
    void validate() const;
};

/// Timestamp of input frame k: round(k 1e6 / fps) microseconds, ties to even.
std::uint64_t frame_timestamp_us(std::size_t k, double fps);

/// Ordered, random-access sequence of sRGB input frames.
class FrameSource {
   public:
    virtual ~FrameSource() = default;
    virtual std::size_t size() const = 0;
    /// Throws IoError (with the frame index) for unreadable frames.
    virtual RgbImage frame(std::size_t index) = 0;
};

class MemoryFrameSource final : public FrameSource {
   public:
    explicit MemoryFrameSource(std::vector<RgbImage> frames) : frames_(std::move(frames)) {}
    std::size_t size() const override { return frames_.size(); }
    RgbImage frame(std::size_t index) override { return frames_.at(index); }

   private:
    std::vector<RgbImage> frames_;
};

/// PNG/PPM files read on demand; the most recently decoded file is cached so
/// frame lists that repeat a file decode it once.
class FileFrameSource final : public FrameSource {
   public:
    explicit FileFrameSource(std::vector<std::filesystem::path> files) : files_(std::move(files)) {}
    std::size_t size() const override { return files_.size(); }
    RgbImage frame(std::size_t index) override;
    const std::vector<std::filesystem::path>& files() const noexcept { return files_; }

   private:
    std::vector<std::filesystem::path> files_;
    std::filesystem::path cached_path_;
    RgbImage cached_;
};

/// A directory (all *.png / *.ppm files in name order) or a frame-list text
/// file (one path per line, relative to the list; blank lines and lines
/// starting with '#' ignored). Throws MissingFileError / IoError.
std::unique_ptr<FileFrameSource> open_frame_source(const std::filesystem::path& path);

struct TimedFrame {
    std::uint64_t t_us = 0;
    RgbImage image;
};

/// Loads every frame with its timestamp. Throws FormatError if the
/// dimensions change mid-stream.
std::vector<TimedFrame> ingest_frames(FrameSource& source, double input_fps);

struct ApsFrameInfo {
    std::size_t index = 0;
    std::uint64_t start_us = 0;      ///< exposure window start
    std::size_t source_frames = 0;   ///< input frames averaged
};

struct SimResult {
    std::vector<ApsFrameInfo> aps_frames;
    std::vector<EventRecord> events;  ///< canonical order
    std::size_t evs_steps = 0;        ///< sampling intervals simulated
    std::size_t evs_width = 0;
    std::size_t evs_height = 0;
    /// Mean EVS-grid intensity over all sampling instants (DN above black).
    ImagePlane evs_mean_intensity;
};

using RawSink = std::function<void(const ApsFrameInfo&, const RawFrame&)>;

/// Runs the hybrid simulation. Input frames are mapped to clean mosaics by
/// the inverse ISP; APS frames average the clean mosaics inside each
/// exposure window [m period, m period + exposure) and receive calibrated
/// noise; EVS pixels are sampled every evs_rate_divisor frames and compared
/// with the previous sample. Each RAW frame is handed to `raw_sink` as soon
/// as it is complete. Output depends only on inputs and seed.
SimResult simulate(FrameSource& source, const SimConfig& config, const CfaLayout& cfa, const ApsNoiseParams& aps,
                   const EvsNoiseParams& evs, const isp::IspConfig& isp, const RawSink& raw_sink);

/// Sub-stream identifiers for derive_seed.
inline constexpr std::uint64_t kApsStream = 1;
inline constexpr std::uint64_t kEvsStream = 2;

}  // namespace hesim::sim
