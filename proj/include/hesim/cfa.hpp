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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hesim {

/// Role of one cell of the repeating CFA block. EVS roles mark event pixels
/// embedded in the APS mosaic, with or without a color filter.
enum class CfaRole : std::uint8_t { R, G, B, W, EvsW, EvsR, EvsG, EvsB };

bool is_evs(CfaRole role) noexcept;
/// 0/1/2 for R/G/B-filtered cells (APS or EVS); nullopt for white cells.
std::optional<int> filter_channel(CfaRole role) noexcept;
std::string_view role_name(CfaRole role) noexcept;
/// Accepts the names produced by role_name ("R", "EVS_W", ...).
CfaRole parse_role(std::string_view name);

struct Cell {
    std::size_t x = 0;
    std::size_t y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Repeating pixel-role grid of a (hybrid) mosaic.
///
/// `aps_positions()` enumerates the non-EVS cells of one block in row-major
/// order; its indices are the "positions" used by the per-position APS
/// variance model. EVS cells inside a block must form a regular sub-lattice
/// (distinct columns x distinct rows), which defines the EVS grid: one event
/// pixel per EVS cell.
class CfaLayout {
   public:
    CfaLayout(std::size_t block_width, std::size_t block_height, std::vector<CfaRole> roles,
              std::string name = "custom");

    /// Built-in layouts: "bayer", "quad_bayer", "gen2", "eiger".
    static CfaLayout preset(std::string_view name);
    static std::vector<std::string> preset_names();

    const std::string& name() const noexcept { return name_; }
    std::size_t block_width() const noexcept { return block_width_; }
    std::size_t block_height() const noexcept { return block_height_; }
    const std::vector<CfaRole>& roles() const noexcept { return roles_; }

    CfaRole role(std::size_t cx, std::size_t cy) const noexcept { return roles_[cy * block_width_ + cx]; }
    CfaRole role_at(std::size_t x, std::size_t y) const noexcept {
        return role(x % block_width_, y % block_height_);
    }
    bool is_evs_at(std::size_t x, std::size_t y) const noexcept { return is_evs(role_at(x, y)); }

    const std::vector<Cell>& aps_positions() const noexcept { return aps_positions_; }
    std::size_t position_count() const noexcept { return aps_positions_.size(); }

    /// Index into aps_positions(). EVS cells map to their nearest APS cell
    /// (Manhattan distance inside the block, same 2x2 quad preferred, then
    /// lowest index).
    std::size_t position_at(std::size_t x, std::size_t y) const noexcept {
        return cell_position_[(y % block_height_) * block_width_ + (x % block_width_)];
    }
    /// True when the cell at (x, y) is itself an APS position, not an EVS stand-in.
    bool is_aps_at(std::size_t x, std::size_t y) const noexcept { return !is_evs_at(x, y); }

    /// Color channel a cell contributes to demosaicing. White and EVS_W cells
    /// borrow the channel of their nearest R/G/B APS cell.
    int infill_channel_at(std::size_t x, std::size_t y) const noexcept {
        return infill_channel_[(y % block_height_) * block_width_ + (x % block_width_)];
    }
    /// True for cells whose value is a native R/G/B APS sample.
    bool is_native_sample_at(std::size_t x, std::size_t y) const noexcept;

    bool has_evs() const noexcept { return !evs_columns_.empty(); }
    std::size_t evs_cells_per_block() const noexcept { return evs_columns_.size() * evs_rows_.size(); }
    std::size_t evs_width(std::size_t sensor_width) const noexcept {
        return sensor_width / block_width_ * evs_columns_.size();
    }
    std::size_t evs_height(std::size_t sensor_height) const noexcept {
        return sensor_height / block_height_ * evs_rows_.size();
    }
    /// Sensor coordinates of EVS-grid pixel (ex, ey).
    Cell evs_to_sensor(std::size_t ex, std::size_t ey) const noexcept;

    /// Throws LayoutError unless the block tiles a width x height sensor.
    void check_tiles(std::size_t width, std::size_t height) const;

    /// Every aligned 2x2 quad has a single infill channel, so the mosaic can
    /// be binned to a half-resolution Bayer-like grid.
    bool quad_binnable() const noexcept { return quad_binnable_; }

    friend bool operator==(const CfaLayout& a, const CfaLayout& b) {
        return a.block_width_ == b.block_width_ && a.block_height_ == b.block_height_ && a.roles_ == b.roles_;
    }

   private:
    std::string name_;
    std::size_t block_width_;
    std::size_t block_height_;
    std::vector<CfaRole> roles_;
    std::vector<Cell> aps_positions_;
    std::vector<std::size_t> cell_position_;
    std::vector<int> infill_channel_;
    std::vector<std::size_t> evs_columns_;
    std::vector<std::size_t> evs_rows_;
    bool quad_binnable_ = false;
};

struct SensorPreset {
    std::string name;
    std::size_t aps_width = 0;
    std::size_t aps_height = 0;
};

/// Full-sensor dimensions of the hybrid presets (gen2, eiger).
SensorPreset sensor_preset(std::string_view name);

}  // namespace hesim
