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

#include "hesim/io/calibration_file.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "hesim/errors.hpp"
#include "hesim/io/hraw.hpp"

namespace hesim::io {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "hesim-calibration";

std::filesystem::path map_path(const std::filesystem::path& json_path, const std::string& name) {
    return json_path.parent_path() / (json_path.stem().string() + "." + name + ".hraw");
}

std::string relative_name(const std::filesystem::path& json_path, const std::string& name) {
    return map_path(json_path, name).filename().string();
}

ImagePlane load_map(const std::filesystem::path& json_path, const json& entry) {
    return read_hraw_plane(json_path.parent_path() / entry.get<std::string>());
}

template <std::size_t N>
std::array<double, N> to_array(const json& j, const char* what) {
    if (!j.is_array() || j.size() != N) {
        throw FormatError(std::string("calibration: '") + what + "' must be an array of " + std::to_string(N) +
                          " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<double>();
    return out;
}

std::pair<int, int> parse_version(const std::string& v) {
    const auto dot = v.find('.');
    try {
        if (dot == std::string::npos) throw std::invalid_argument(v);
        std::size_t used_major = 0;
        std::size_t used_minor = 0;
        const int major = std::stoi(v.substr(0, dot), &used_major);
        const int minor = std::stoi(v.substr(dot + 1), &used_minor);
        if (used_major != dot || used_minor != v.size() - dot - 1) throw std::invalid_argument(v);
        return {major, minor};
    } catch (const std::logic_error&) {
        throw FormatError("calibration: malformed version string '" + v + "'");
    }
}

}  // namespace

void Calibration::validate() const {
    cfa.check_tiles(width, height);
    isp.validate();
    if (aps) {
        aps->validate(cfa);
        if (aps->width() != width || aps->height() != height) {
            throw LayoutError("calibration: APS maps do not match the sensor dimensions");
        }
    }
    if (evs) evs->validate(cfa.evs_width(width), cfa.evs_height(height));
}

json isp_to_json(const isp::IspConfig& c) {
    json ccm = json::array();
    for (const auto& row : c.ccm) ccm.push_back({row[0], row[1], row[2]});
    return {{"gamma", c.gamma},
            {"srgb_curve", c.srgb_curve},
            {"ccm", ccm},
            {"wb_gains", {c.wb_gains[0], c.wb_gains[1], c.wb_gains[2]}},
            {"black_level", c.black_level},
            {"white_level", c.white_level},
            {"tone_map", c.tone_map == isp::ToneMap::global_curve ? "global" : "identity"},
            {"demosaic", c.demosaic == isp::DemosaicMode::binned ? "binned" : "full"}};
}

isp::IspConfig isp_from_json(const json& j) {
    isp::IspConfig c;
    c.gamma = j.value("gamma", c.gamma);
    c.srgb_curve = j.value("srgb_curve", c.srgb_curve);
    if (j.contains("ccm")) {
        const json& m = j.at("ccm");
        if (!m.is_array() || m.size() != 3) throw FormatError("calibration: 'ccm' must be a 3x3 array");
        for (std::size_t r = 0; r < 3; ++r) c.ccm[r] = to_array<3>(m[r], "ccm row");
    }
    if (j.contains("wb_gains")) c.wb_gains = to_array<3>(j.at("wb_gains"), "wb_gains");
    c.black_level = j.value("black_level", c.black_level);
    c.white_level = j.value("white_level", c.white_level);
    const std::string tone = j.value("tone_map", std::string("identity"));
    if (tone == "global") {
        c.tone_map = isp::ToneMap::global_curve;
    } else if (tone != "identity") {
        throw FormatError("calibration: unknown tone map '" + tone + "'");
    }
    const std::string mode = j.value("demosaic", std::string("binned"));
    if (mode == "full") {
        c.demosaic = isp::DemosaicMode::full;
    } else if (mode != "binned") {
        throw FormatError("calibration: unknown demosaic mode '" + mode + "'");
    }
    return c;
}

void save_calibration(const std::filesystem::path& path, const Calibration& cal) {
    cal.validate();
    json roles = json::array();
    for (CfaRole r : cal.cfa.roles()) roles.push_back(std::string(role_name(r)));
    json doc = {{"format", kFormatName},
                {"version", std::to_string(kCalibrationMajor) + "." + std::to_string(kCalibrationMinor)},
                {"sensor",
                 {{"width", cal.width},
                  {"height", cal.height},
                  {"cfa",
                   {{"name", cal.cfa.name()},
                    {"block_width", cal.cfa.block_width()},
                    {"block_height", cal.cfa.block_height()},
                    {"roles", roles}}}}},
                {"isp", isp_to_json(cal.isp)}};
    if (cal.aps) {
        const auto& a = *cal.aps;
        json beta = json::array();
        for (const auto& b : a.beta_a) beta.push_back(b);
        ImagePlane rows(1, a.n_row.size(), a.n_row);
        write_hraw_plane(map_path(path, "n_blc"), a.n_blc);
        write_hraw_plane(map_path(path, "n_row"), rows);
        write_hraw_plane(map_path(path, "n_dp"), a.n_dp);
        doc["aps"] = {{"bit_depth", a.bit_depth},
                      {"n_blc", relative_name(path, "n_blc")},
                      {"n_row", relative_name(path, "n_row")},
                      {"n_dp", relative_name(path, "n_dp")},
                      {"beta_a", beta}};
    }
    if (cal.evs) {
        const auto& e = *cal.evs;
        ImagePlane mask(e.bad_pixel_mask.width, e.bad_pixel_mask.height);
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = e.bad_pixel_mask.flags[i] != 0 ? 1.0 : 0.0;
        write_hraw_plane(map_path(path, "mu_n"), e.mu_n);
        write_hraw_plane(map_path(path, "bad_pixels"), mask);
        doc["evs"] = {{"theta_hw", e.theta_hw},
                      {"beta_e", e.beta_e},
                      {"theta", e.theta()},
                      {"mu_n", relative_name(path, "mu_n")},
                      {"bad_pixel_mask", relative_name(path, "bad_pixels")},
                      {"bad_pixel_count", e.bad_pixel_mask.count()}};
        if (!cal.evs_diagnostics_json.empty()) doc["evs"]["diagnostics"] = json::parse(cal.evs_diagnostics_json);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Calibration load_calibration(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    try {
        if (doc.value("format", std::string()) != kFormatName) {
            throw FormatError("not a calibration file (missing format tag)");
        }
        const auto [major, minor] = parse_version(doc.at("version").get<std::string>());
        (void)minor;
        if (major > kCalibrationMajor) {
            throw VersionError(path.string() + ": calibration version " + doc.at("version").get<std::string>() +
                               " is newer than supported " + std::to_string(kCalibrationMajor) + "." +
                               std::to_string(kCalibrationMinor));
        }
        const json& sensor = doc.at("sensor");
        const json& cfa = sensor.at("cfa");
        std::vector<CfaRole> roles;
        for (const auto& r : cfa.at("roles")) roles.push_back(parse_role(r.get<std::string>()));
        Calibration cal{sensor.at("width").get<std::size_t>(),
                        sensor.at("height").get<std::size_t>(),
                        CfaLayout(cfa.at("block_width").get<std::size_t>(), cfa.at("block_height").get<std::size_t>(),
                                  std::move(roles), cfa.value("name", std::string("custom"))),
                        doc.contains("isp") ? isp_from_json(doc.at("isp")) : isp::IspConfig{},
                        std::nullopt,
                        std::nullopt,
                        {}};
        if (doc.contains("aps")) {
            const json& a = doc.at("aps");
            ApsNoiseParams p;
            p.bit_depth = a.at("bit_depth").get<std::uint16_t>();
            p.n_blc = load_map(path, a.at("n_blc"));
            p.n_dp = load_map(path, a.at("n_dp"));
            const ImagePlane rows = load_map(path, a.at("n_row"));
            if (rows.width() != 1) throw FormatError("row-offset map must have width 1");
            p.n_row.assign(rows.data().begin(), rows.data().end());
            for (const auto& b : a.at("beta_a")) p.beta_a.push_back(to_array<6>(b, "beta_a"));
            cal.aps = std::move(p);
        }
        if (doc.contains("evs")) {
            const json& e = doc.at("evs");
            EvsNoiseParams p;
            p.theta_hw = e.at("theta_hw").get<double>();
            p.beta_e = to_array<6>(e.at("beta_e"), "beta_e");
            p.mu_n = load_map(path, e.at("mu_n"));
            const ImagePlane mask = load_map(path, e.at("bad_pixel_mask"));
            p.bad_pixel_mask = PixelMask(mask.width(), mask.height());
            for (std::size_t i = 0; i < mask.size(); ++i) p.bad_pixel_mask.flags[i] = mask[i] != 0.0 ? 1 : 0;
            if (e.contains("theta")) {
                const double stored = e.at("theta").get<double>();
                if (std::abs(stored - p.theta()) > 1e-12 * std::max(1.0, std::abs(stored))) {
                    throw FormatError("stored threshold " + std::to_string(stored) + " disagrees with b0 * theta_hw = " +
                                      std::to_string(p.theta()));
                }
            }
            if (e.contains("diagnostics")) cal.evs_diagnostics_json = e.at("diagnostics").dump();
            cal.evs = std::move(p);
        }
        cal.validate();
        return cal;
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const VersionError&) {
        throw;
    } catch (const IoError&) {
        throw;
    } catch (const FormatError& e) {
        const std::string msg = e.what();
        throw FormatError(msg.rfind(path.string(), 0) == 0 ? msg : path.string() + ": " + msg);
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace hesim::io
