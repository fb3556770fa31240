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
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "hesim/cfa.hpp"
#include "hesim/isp.hpp"
#include "hesim/params.hpp"

namespace hesim::io {

/// Current calibration container version "major.minor". Readers accept any
/// minor revision of a known major and reject newer majors.
inline constexpr int kCalibrationMajor = 1;
inline constexpr int kCalibrationMinor = 0;

/// Everything the simulator needs to reproduce one sensor.
struct Calibration {
    std::size_t width = 0;
    std::size_t height = 0;
    CfaLayout cfa = CfaLayout::preset("quad_bayer");
    isp::IspConfig isp{};
    std::optional<ApsNoiseParams> aps;
    std::optional<EvsNoiseParams> evs;
    /// Free-form fit diagnostics kept alongside the parameters.
    std::string evs_diagnostics_json;

    /// Throws LayoutError / ParameterError for inconsistent contents.
    void validate() const;
};

/// Writes `path` (JSON) plus the binary maps next to it, named after the
/// file stem ("<stem>.n_blc.hraw", ...). Map paths are stored relative to
/// the JSON file.
void save_calibration(const std::filesystem::path& path, const Calibration& calibration);

/// Throws MissingFileError for absent files (including referenced maps),
/// VersionError for newer major versions and FormatError for malformed or
/// inconsistent content (e.g. a stored threshold that disagrees with b0 Theta).
Calibration load_calibration(const std::filesystem::path& path);

nlohmann::json isp_to_json(const isp::IspConfig& config);
isp::IspConfig isp_from_json(const nlohmann::json& j);

}  // namespace hesim::io
