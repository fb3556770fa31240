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
#include <span>
#include <vector>

#include "json.hpp"

#include "hesim/events.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace hesim::sim {

/// Linear fit of ln(histogram count) against normalized event count k / N,
/// over the non-empty bins from the histogram mode upward.
struct LogHistogramFit {
    bool valid = false;   ///< false with fewer than 3 usable bins
    std::size_t bins = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct BrightnessBin {
    double i_low = 0.0;
    double i_high = 0.0;
    double i_mean = 0.0;
    std::size_t pixels = 0;
    double mean_probability = 0.0;   ///< observed, polarity-averaged
    double model_probability = 0.0;  ///< Q(curve) under the expected parameters
};

struct OnOffSummary {
    double mean_on = 0.0;
    double mean_off = 0.0;
    /// Pearson correlation of per-pixel ON and OFF frequencies (0 if undefined).
    double correlation = 0.0;
    /// Fraction of pixels whose ON frequency exceeds their OFF frequency.
    double on_dominant_fraction = 0.0;
};

struct ValidationReport {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint64_t n_trials = 0;
    std::size_t pixels_used = 0;  ///< live (unmasked) pixels
    std::uint64_t on_events = 0;
    std::uint64_t off_events = 0;
    /// Polarity-averaged event probability (n_plus + n_minus) / (2 N) per pixel.
    ImagePlane probability;
    /// histogram[k] = number of live pixels with k events in total.
    std::vector<std::uint64_t> histogram;
    LogHistogramFit log_fit;
    std::vector<BrightnessBin> brightness_bins;
    OnOffSummary on_off;
};

/// Fits the log-scale count histogram (see LogHistogramFit).
LogHistogramFit fit_log_histogram(std::span<const std::uint64_t> histogram, std::uint64_t n_trials);

/// Statistics of a static-scene event stream observed over n_trials EVS
/// sampling intervals. Pixels flagged in the expected bad-pixel mask are
/// excluded. Throws LayoutError when brightness and parameter grids differ.
ValidationReport validate_statistics(std::span<const EventRecord> events, const ImagePlane& brightness,
                                     const EvsNoiseParams& expected, std::uint64_t n_trials,
                                     std::size_t brightness_bins = 8);

/// Report summary as JSON (the per-pixel map is omitted).
nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace hesim::sim
