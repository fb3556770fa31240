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

#include "hesim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "hesim/aps_model.hpp"
#include "hesim/errors.hpp"
#include "hesim/io/image_io.hpp"
#include "hesim/random.hpp"

namespace hesim::sim {

namespace {

constexpr double kTimeEps = 1e-9;

/// Re-raises a toolkit error with frame context, keeping its category.
[[noreturn]] void rethrow_with_frame(std::size_t k) {
    const std::string ctx = "frame " + std::to_string(k) + ": ";
    try {
        throw;
    } catch (const DomainError& e) {
        throw DomainError(ctx + e.what());
    } catch (const LayoutError& e) {
        throw LayoutError(ctx + e.what());
    } catch (const FormatError& e) {
        throw FormatError(ctx + e.what());
    } catch (const IoError& e) {
        throw IoError(ctx + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError(ctx + e.what());
    } catch (const Error& e) {
        throw Error(ctx + e.what());
    }
}

bool is_frame_file(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm";
}

}  // namespace

void SimConfig::validate() const {
    if (!(input_fps > 0.0) || !std::isfinite(input_fps)) throw ParameterError("simulate: input fps must be > 0");
    if (!(aps_exposure_ms > 0.0)) throw ParameterError("simulate: APS exposure must be > 0");
    if (!(aps_frame_period_ms >= aps_exposure_ms)) {
        throw ParameterError("simulate: APS exposure must not exceed the APS frame period");
    }
    if (input_fps * aps_exposure_ms / 1000.0 < 1.0 - kTimeEps) {
        throw ParameterError("simulate: each APS exposure must span at least one input frame");
    }
    if (evs_rate_divisor < 1) throw ParameterError("simulate: EVS rate divisor must be >= 1");
}

std::uint64_t frame_timestamp_us(std::size_t k, double fps) {
    return static_cast<std::uint64_t>(std::nearbyint(static_cast<double>(k) * 1e6 / fps));
}

RgbImage FileFrameSource::frame(std::size_t index) {
    if (index >= files_.size()) throw IoError("frame index " + std::to_string(index) + " out of range");
    const auto& path = files_[index];
    if (path != cached_path_) {
        try {
            cached_ = io::read_image(path);
        } catch (const Error&) {
            rethrow_with_frame(index);
        }
        cached_path_ = path;
    }
    return cached_;
}

std::unique_ptr<FileFrameSource> open_frame_source(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw MissingFileError(path);
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && is_frame_file(entry.path())) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open frame list " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            fs::path entry(line.substr(first));
            files.push_back(entry.is_absolute() ? entry : path.parent_path() / entry);
        }
    }
    return std::make_unique<FileFrameSource>(std::move(files));
}

std::vector<TimedFrame> ingest_frames(FrameSource& source, double input_fps) {
    if (!(input_fps > 0.0)) throw ParameterError("ingest_frames: fps must be > 0");
    std::vector<TimedFrame> out;
    out.reserve(source.size());
    for (std::size_t k = 0; k < source.size(); ++k) {
        RgbImage img = source.frame(k);
        if (!out.empty() && (img.width != out.front().image.width || img.height != out.front().image.height)) {
            throw FormatError("frame " + std::to_string(k) + ": dimensions changed mid-stream");
        }
        out.push_back({frame_timestamp_us(k, input_fps), std::move(img)});
    }
    return out;
}

SimResult simulate(FrameSource& source, const SimConfig& config, const CfaLayout& cfa, const ApsNoiseParams& aps,
                   const EvsNoiseParams& evs, const isp::IspConfig& isp, const RawSink& raw_sink) {
    config.validate();
    isp.validate();
    SimResult result;
    const std::size_t n = source.size();
    if (n == 0) return result;

    const std::uint64_t aps_seed = derive_seed(config.seed, kApsStream);
    const std::uint64_t evs_seed = derive_seed(config.seed, kEvsStream);
    const double frame_ms = 1000.0 / config.input_fps;
    const double period = config.aps_frame_period_ms;
    const double exposure = config.aps_exposure_ms;
    const std::size_t div = config.evs_rate_divisor;

    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t ew = 0;
    std::size_t eh = 0;

    // APS accumulation state.
    ImagePlane aps_sum;
    std::size_t aps_count = 0;
    std::size_t aps_index = 0;
    auto finish_aps = [&] {
        ImagePlane mean(width, height);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] = aps_sum[i] / static_cast<double>(aps_count);
        const RandomKey key{aps_seed, aps_index, 0, 0};
        const RawFrame raw = aps::synthesize_raw(mean, exposure, aps, cfa, key, config.threads);
        ApsFrameInfo info{aps_index, static_cast<std::uint64_t>(std::llround(aps_index * period * 1000.0)), aps_count};
        if (raw_sink) raw_sink(info, raw);
        result.aps_frames.push_back(info);
        aps_count = 0;
    };

    // EVS state.
    ImagePlane evs_sum;
    evs::VoltageField v_ref;
    std::vector<std::uint8_t> fired;
    std::size_t samples = 0;

    for (std::size_t k = 0; k < n; ++k) {
        ImagePlane clean;
        try {
            const RgbImage rgb = source.frame(k);
            if (k == 0) {
                width = rgb.width;
                height = rgb.height;
                cfa.check_tiles(width, height);
                aps.validate(cfa);
                if (aps.width() != width || aps.height() != height) {
                    throw LayoutError("APS calibration maps are " + std::to_string(aps.width()) + "x" +
                                      std::to_string(aps.height()) + ", input frames are " + std::to_string(width) +
                                      "x" + std::to_string(height));
                }
                ew = cfa.evs_width(width);
                eh = cfa.evs_height(height);
                if (cfa.has_evs()) evs.validate(ew, eh);
                result.evs_width = ew;
                result.evs_height = eh;
                aps_sum = ImagePlane(width, height);
                evs_sum = ImagePlane(ew, eh);
                result.evs_mean_intensity = ImagePlane(ew, eh);
            } else if (rgb.width != width || rgb.height != height) {
                throw FormatError("dimensions changed mid-stream");
            }
            clean = isp::inverse_pipeline(rgb, isp, cfa);
        } catch (const Error&) {
            rethrow_with_frame(k);
        }

        // APS: window m covers [m period, m period + exposure).
        const double t_ms = static_cast<double>(k) * frame_ms;
        const auto m = static_cast<std::size_t>(std::floor((t_ms + kTimeEps) / period));
        const bool inside = t_ms - static_cast<double>(m) * period < exposure - kTimeEps;
        if (aps_count > 0 && (m != aps_index || !inside)) finish_aps();
        if (inside) {
            if (aps_count == 0) {
                aps_index = m;
                std::fill(aps_sum.data().begin(), aps_sum.data().end(), 0.0);
            }
            for (std::size_t i = 0; i < clean.size(); ++i) aps_sum[i] += clean[i];
            ++aps_count;
        }

        // EVS: sample 0 is frame 0; sample j averages frames ((j-1) div, j div].
        if (!cfa.has_evs()) continue;
        for (std::size_t ey = 0; ey < eh; ++ey) {
            for (std::size_t ex = 0; ex < ew; ++ex) {
                const Cell c = cfa.evs_to_sensor(ex, ey);
                evs_sum.at(ex, ey) += std::max(0.0, clean.at(c.x, c.y) - isp.black_level);
            }
        }
        if (k % div != 0) continue;
        const double frames_in_sample = k == 0 ? 1.0 : static_cast<double>(div);
        ImagePlane intensity(ew, eh);
        for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = evs_sum[i] / frames_in_sample;
        std::fill(evs_sum.data().begin(), evs_sum.data().end(), 0.0);
        for (std::size_t i = 0; i < intensity.size(); ++i) result.evs_mean_intensity[i] += intensity[i];
        ++samples;
        evs::VoltageField v_now = evs::intensity_to_voltage(intensity, evs);
        if (k == 0) {
            v_ref = std::move(v_now);
            continue;
        }
        const std::size_t step = k / div;
        const RandomKey key{evs_seed, step, 0, 0};
        try {
            auto events = evs::step_events(v_ref, v_now, intensity, evs, evs.theta(), frame_timestamp_us(k, config.input_fps),
                                           key, config.threads, &fired);
            result.events.insert(result.events.end(), events.begin(), events.end());
        } catch (const Error&) {
            rethrow_with_frame(k);
        }
        ++result.evs_steps;
        if (config.baseline == evs::Baseline::per_step) {
            v_ref = std::move(v_now);
        } else {
            for (std::size_t i = 0; i < fired.size(); ++i) {
                if (fired[i] != 0) v_ref.values[i] = v_now.values[i];
            }
        }
    }
    if (aps_count > 0 && static_cast<double>(aps_index) * period + exposure <= static_cast<double>(n) * frame_ms + kTimeEps) {
        finish_aps();
    }
    for (double& v : result.evs_mean_intensity.data()) v /= static_cast<double>(std::max<std::size_t>(samples, 1));
    return result;
}

}  // namespace hesim::sim
