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

#include "hesim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hesim/errors.hpp"
#include "hesim/evs_calib.hpp"
#include "hesim/numerics.hpp"

namespace hesim::sim {

LogHistogramFit fit_log_histogram(std::span<const std::uint64_t> histogram, std::uint64_t n_trials) {
    LogHistogramFit fit;
    if (histogram.empty() || n_trials == 0) return fit;
    const auto mode = static_cast<std::size_t>(std::max_element(histogram.begin(), histogram.end()) - histogram.begin());
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = mode; k < histogram.size(); ++k) {
        if (histogram[k] == 0) continue;
        xs.push_back(static_cast<double>(k) / static_cast<double>(n_trials));
        ys.push_back(std::log(static_cast<double>(histogram[k])));
    }
    fit.bins = xs.size();
    if (xs.size() < 3) return fit;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.valid = true;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

ValidationReport validate_statistics(std::span<const EventRecord> events, const ImagePlane& brightness,
                                     const EvsNoiseParams& expected, std::uint64_t n_trials,
                                     std::size_t brightness_bins) {
    if (n_trials == 0) throw ParameterError("validate_statistics: n_trials must be > 0");
    const std::size_t w = brightness.width();
    const std::size_t h = brightness.height();
    expected.validate(w, h);

    ValidationReport report;
    report.width = w;
    report.height = h;
    report.n_trials = n_trials;
    report.probability = ImagePlane(w, h);

    std::vector<std::uint64_t> on(w * h, 0);
    std::vector<std::uint64_t> off(w * h, 0);
    for (const auto& e : events) {
        if (e.x >= w || e.y >= h) throw LayoutError("validate_statistics: event outside the EVS grid");
        const std::size_t i = static_cast<std::size_t>(e.y) * w + e.x;
        if (expected.bad_pixel_mask.flags[i] != 0) continue;
        if (e.polarity > 0) {
            ++on[i];
            ++report.on_events;
        } else {
            ++off[i];
            ++report.off_events;
        }
    }

    const auto nt = static_cast<double>(n_trials);
    std::vector<std::size_t> live;
    live.reserve(w * h);
    for (std::size_t i = 0; i < w * h; ++i) {
        if (expected.bad_pixel_mask.flags[i] != 0) continue;
        live.push_back(i);
        report.probability[i] = static_cast<double>(on[i] + off[i]) / (2.0 * nt);
        const std::uint64_t total = on[i] + off[i];
        if (report.histogram.size() <= total) report.histogram.resize(total + 1, 0);
        ++report.histogram[total];
    }
    report.pixels_used = live.size();
    report.log_fit = fit_log_histogram(report.histogram, n_trials);
    if (live.empty()) return report;

    // ON vs OFF summary.
    double s_on = 0.0;
    double s_off = 0.0;
    std::size_t on_dominant = 0;
    for (std::size_t i : live) {
        s_on += static_cast<double>(on[i]) / nt;
        s_off += static_cast<double>(off[i]) / nt;
        if (on[i] > off[i]) ++on_dominant;
    }
    const auto n_live = static_cast<double>(live.size());
    report.on_off.mean_on = s_on / n_live;
    report.on_off.mean_off = s_off / n_live;
    report.on_off.on_dominant_fraction = static_cast<double>(on_dominant) / n_live;
    double c_xy = 0.0;
    double c_xx = 0.0;
    double c_yy = 0.0;
    for (std::size_t i : live) {
        const double a = static_cast<double>(on[i]) / nt - report.on_off.mean_on;
        const double b = static_cast<double>(off[i]) / nt - report.on_off.mean_off;
        c_xy += a * b;
        c_xx += a * a;
        c_yy += b * b;
    }
    report.on_off.correlation = c_xx > 0.0 && c_yy > 0.0 ? c_xy / std::sqrt(c_xx * c_yy) : 0.0;

    // Equal-width brightness bins over the live pixels' range.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i : live) {
        lo = std::min(lo, brightness[i]);
        hi = std::max(hi, brightness[i]);
    }
    const std::size_t nb = hi > lo ? std::max<std::size_t>(brightness_bins, 1) : 1;
    const double width = hi > lo ? (hi - lo) / static_cast<double>(nb) : 0.0;
    std::vector<BrightnessBin> bins(nb);
    std::vector<double> model_sum(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        bins[b].i_low = lo + width * static_cast<double>(b);
        bins[b].i_high = b + 1 == nb ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (std::size_t i : live) {
        const std::size_t b =
            width > 0.0 ? std::min(nb - 1, static_cast<std::size_t>((brightness[i] - lo) / width)) : 0;
        auto& bin = bins[b];
        ++bin.pixels;
        bin.i_mean += brightness[i];
        bin.mean_probability += report.probability[i];
        const double y = evs::evs_model_curve(brightness[i], expected.beta_e, expected.theta_hw);
        model_sum[b] += std::isinf(y) ? (y > 0 ? 0.0 : 1.0) : numerics::q_function(y);
    }
    for (std::size_t b = 0; b < nb; ++b) {
        auto& bin = bins[b];
        if (bin.pixels == 0) continue;
        const auto np = static_cast<double>(bin.pixels);
        bin.i_mean /= np;
        bin.mean_probability /= np;
        bin.model_probability = model_sum[b] / np;
    }
    std::erase_if(bins, [](const BrightnessBin& b) { return b.pixels == 0; });
    report.brightness_bins = std::move(bins);
    return report;
}

nlohmann::json report_to_json(const ValidationReport& r) {
    using nlohmann::json;
    json bins = json::array();
    for (const auto& b : r.brightness_bins) {
        bins.push_back({{"i_low", b.i_low},
                        {"i_high", b.i_high},
                        {"i_mean", b.i_mean},
                        {"pixels", b.pixels},
                        {"mean_probability", b.mean_probability},
                        {"model_probability", b.model_probability}});
    }
    json fit = {{"valid", r.log_fit.valid}, {"bins", r.log_fit.bins}};
    if (r.log_fit.valid) {
        fit["slope"] = r.log_fit.slope;
        fit["intercept"] = r.log_fit.intercept;
        fit["r_squared"] = r.log_fit.r_squared;
    }
    return {{"width", r.width},
            {"height", r.height},
            {"n_trials", r.n_trials},
            {"pixels_used", r.pixels_used},
            {"on_events", r.on_events},
            {"off_events", r.off_events},
            {"histogram", r.histogram},
            {"log_histogram_fit", fit},
            {"brightness_bins", bins},
            {"on_off",
             {{"mean_on", r.on_off.mean_on},
              {"mean_off", r.on_off.mean_off},
              {"correlation", r.on_off.correlation},
              {"on_dominant_fraction", r.on_off.on_dominant_fraction}}}};
}

}  // namespace hesim::sim
