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

#include "hesim/cfa.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>
#include <tuple>

#include "hesim/errors.hpp"

namespace hesim {

namespace {

constexpr std::array<std::string_view, 8> kRoleNames = {"R", "G", "B", "W", "EVS_W", "EVS_R", "EVS_G", "EVS_B"};

std::size_t manhattan(const Cell& a, const Cell& b) {
    const auto dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const auto dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx + dy;
}

bool same_quad(const Cell& a, const Cell& b) { return a.x / 2 == b.x / 2 && a.y / 2 == b.y / 2; }

}  // namespace

bool is_evs(CfaRole role) noexcept {
    return role == CfaRole::EvsW || role == CfaRole::EvsR || role == CfaRole::EvsG || role == CfaRole::EvsB;
}

std::optional<int> filter_channel(CfaRole role) noexcept {
    switch (role) {
        case CfaRole::R:
        case CfaRole::EvsR:
            return 0;
        case CfaRole::G:
        case CfaRole::EvsG:
            return 1;
        case CfaRole::B:
        case CfaRole::EvsB:
            return 2;
        default:
            return std::nullopt;
    }
}

std::string_view role_name(CfaRole role) noexcept { return kRoleNames[static_cast<std::size_t>(role)]; }

CfaRole parse_role(std::string_view name) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
        if (kRoleNames[i] == name) return static_cast<CfaRole>(i);
    }
    throw FormatError("unknown CFA role '" + std::string(name) + "'");
}

CfaLayout::CfaLayout(std::size_t block_width, std::size_t block_height, std::vector<CfaRole> roles, std::string name)
    : name_(std::move(name)), block_width_(block_width), block_height_(block_height), roles_(std::move(roles)) {
    if (block_width_ == 0 || block_height_ == 0) throw LayoutError("CfaLayout: empty block");
    if (roles_.size() != block_width_ * block_height_) {
        throw LayoutError("CfaLayout: expected " + std::to_string(block_width_ * block_height_) + " roles, got " +
                          std::to_string(roles_.size()));
    }

    std::vector<Cell> rgb_cells;
    std::set<std::size_t> evs_x;
    std::set<std::size_t> evs_y;
    std::size_t evs_count = 0;
    for (std::size_t cy = 0; cy < block_height_; ++cy) {
        for (std::size_t cx = 0; cx < block_width_; ++cx) {
            const CfaRole r = role(cx, cy);
            if (is_evs(r)) {
                evs_x.insert(cx);
                evs_y.insert(cy);
                ++evs_count;
            } else {
                aps_positions_.push_back({cx, cy});
                if (filter_channel(r)) rgb_cells.push_back({cx, cy});
            }
        }
    }
    if (aps_positions_.empty()) throw LayoutError("CfaLayout: block has no APS cells");
    if (rgb_cells.empty()) throw LayoutError("CfaLayout: block has no color-filtered APS cells");
    if (evs_count != evs_x.size() * evs_y.size()) {
        throw LayoutError("CfaLayout: EVS cells must form a regular lattice inside the block");
    }
    evs_columns_.assign(evs_x.begin(), evs_x.end());
    evs_rows_.assign(evs_y.begin(), evs_y.end());

    auto nearest = [&](const Cell& c, const std::vector<Cell>& candidates) {
        std::size_t best = 0;
        auto best_key = std::make_tuple(std::numeric_limits<std::size_t>::max(), true, std::size_t{0});
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto key = std::make_tuple(manhattan(c, candidates[i]), !same_quad(c, candidates[i]), i);
            if (key < best_key) {
                best_key = key;
                best = i;
            }
        }
        return best;
    };

    cell_position_.resize(roles_.size());
    infill_channel_.resize(roles_.size());
    for (std::size_t cy = 0; cy < block_height_; ++cy) {
        for (std::size_t cx = 0; cx < block_width_; ++cx) {
            const std::size_t idx = cy * block_width_ + cx;
            const CfaRole r = roles_[idx];
            const Cell c{cx, cy};
            if (is_evs(r)) {
                cell_position_[idx] = nearest(c, aps_positions_);
            } else {
                cell_position_[idx] = static_cast<std::size_t>(
                    std::find(aps_positions_.begin(), aps_positions_.end(), c) - aps_positions_.begin());
            }
            if (auto ch = filter_channel(r)) {
                infill_channel_[idx] = *ch;
            } else {
                const Cell& src = rgb_cells[nearest(c, rgb_cells)];
                infill_channel_[idx] = *filter_channel(role(src.x, src.y));
            }
        }
    }

    quad_binnable_ = block_width_ % 2 == 0 && block_height_ % 2 == 0;
    for (std::size_t qy = 0; quad_binnable_ && qy < block_height_; qy += 2) {
        for (std::size_t qx = 0; quad_binnable_ && qx < block_width_; qx += 2) {
            const int ch = infill_channel_[qy * block_width_ + qx];
            for (std::size_t k = 1; k < 4; ++k) {
                if (infill_channel_[(qy + k / 2) * block_width_ + qx + k % 2] != ch) quad_binnable_ = false;
            }
        }
    }
}

bool CfaLayout::is_native_sample_at(std::size_t x, std::size_t y) const noexcept {
    const CfaRole r = role_at(x, y);
    return r == CfaRole::R || r == CfaRole::G || r == CfaRole::B;
}

Cell CfaLayout::evs_to_sensor(std::size_t ex, std::size_t ey) const noexcept {
    const std::size_t nx = evs_columns_.size();
    const std::size_t ny = evs_rows_.size();
    return {(ex / nx) * block_width_ + evs_columns_[ex % nx], (ey / ny) * block_height_ + evs_rows_[ey % ny]};
}

void CfaLayout::check_tiles(std::size_t width, std::size_t height) const {
    if (width == 0 || height == 0 || width % block_width_ != 0 || height % block_height_ != 0) {
        throw LayoutError("sensor " + std::to_string(width) + "x" + std::to_string(height) + " is not tiled by the " +
                          std::to_string(block_width_) + "x" + std::to_string(block_height_) + " CFA block '" +
                          name_ + "'");
    }
}

CfaLayout CfaLayout::preset(std::string_view name) {
    using enum CfaRole;
    if (name == "bayer") return CfaLayout(2, 2, {R, G, G, B}, "bayer");

    // Quad-Bayer: 2x2 groups of identical filters.
    std::vector<CfaRole> quad = {R, R, G, G,  //
                                 R, R, G, G,  //
                                 G, G, B, B,  //
                                 G, G, B, B};
    if (name == "quad_bayer") return CfaLayout(4, 4, quad, "quad_bayer");
    if (name == "gen2") {
        // One white event pixel in the lower-right corner of every quad.
        for (auto [x, y] : {std::pair{1, 1}, {3, 1}, {1, 3}, {3, 3}}) quad[y * 4 + x] = EvsW;
        return CfaLayout(4, 4, quad, "gen2");
    }
    if (name == "eiger") {
        // The upper-right green quad is replaced by four color-filtered event pixels.
        quad[2] = EvsR;
        quad[3] = EvsG;
        quad[6] = EvsG;
        quad[7] = EvsB;
        return CfaLayout(4, 4, quad, "eiger");
    }
    throw LayoutError("unknown CFA preset '" + std::string(name) + "'");
}

std::vector<std::string> CfaLayout::preset_names() { return {"bayer", "quad_bayer", "gen2", "eiger"}; }

SensorPreset sensor_preset(std::string_view name) {
    if (name == "gen2" || name == "eiger") return {std::string(name), 3264, 2448};
    throw LayoutError("no sensor dimensions for preset '" + std::string(name) + "'");
}

}  // namespace hesim
