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

#include <set>

#include <gtest/gtest.h>

#include "hesim/cfa.hpp"
#include "hesim/errors.hpp"
#include "hesim/events.hpp"
#include "hesim/frame_stack.hpp"
#include "hesim/image.hpp"
#include "hesim/params.hpp"

namespace {

using namespace hesim;

TEST(Cfa, BayerPreset) {
    const auto cfa = CfaLayout::preset("bayer");
    EXPECT_EQ(cfa.role_at(0, 0), CfaRole::R);
    EXPECT_EQ(cfa.role_at(1, 0), CfaRole::G);
    EXPECT_EQ(cfa.role_at(0, 1), CfaRole::G);
    EXPECT_EQ(cfa.role_at(3, 3), CfaRole::B);
    EXPECT_EQ(cfa.position_count(), 4u);
    EXPECT_FALSE(cfa.has_evs());
    EXPECT_FALSE(cfa.quad_binnable());
}

TEST(Cfa, QuadBayerHasSixteenPositionsAndBins) {
    const auto cfa = CfaLayout::preset("quad_bayer");
    EXPECT_EQ(cfa.position_count(), 16u);
    EXPECT_TRUE(cfa.quad_binnable());
    EXPECT_EQ(cfa.role_at(1, 1), CfaRole::R);
    EXPECT_EQ(cfa.role_at(2, 0), CfaRole::G);
    EXPECT_EQ(cfa.role_at(3, 3), CfaRole::B);
}

TEST(Cfa, Gen2EventPixelsAndGrid) {
    const auto cfa = CfaLayout::preset("gen2");
    EXPECT_EQ(cfa.position_count(), 12u);
    EXPECT_EQ(cfa.evs_cells_per_block(), 4u);
    EXPECT_TRUE(cfa.is_evs_at(1, 1));
    EXPECT_TRUE(cfa.is_evs_at(7, 5));
    EXPECT_FALSE(cfa.is_evs_at(0, 0));
    EXPECT_EQ(cfa.evs_width(64), 32u);
    EXPECT_EQ(cfa.evs_height(48), 24u);
    EXPECT_EQ(cfa.evs_to_sensor(0, 0), (Cell{1, 1}));
    EXPECT_EQ(cfa.evs_to_sensor(3, 2), (Cell{7, 5}));
    // The EVS cell in the red quad borrows the red channel for demosaicing.
    EXPECT_EQ(cfa.infill_channel_at(1, 1), 0);
    EXPECT_EQ(cfa.infill_channel_at(3, 3), 2);
    EXPECT_TRUE(cfa.quad_binnable());
    // Its statistics come from a same-quad APS neighbour.
    const Cell p = cfa.aps_positions()[cfa.position_at(1, 1)];
    EXPECT_LE(p.x, 1u);
    EXPECT_LE(p.y, 1u);
    EXPECT_TRUE(cfa.is_aps_at(p.x, p.y));
}

TEST(Cfa, EigerColorEventQuad) {
    const auto cfa = CfaLayout::preset("eiger");
    EXPECT_EQ(cfa.position_count(), 12u);
    EXPECT_EQ(cfa.role_at(2, 0), CfaRole::EvsR);
    EXPECT_EQ(cfa.role_at(3, 1), CfaRole::EvsB);
    const auto preset = sensor_preset("eiger");
    EXPECT_EQ(cfa.evs_width(preset.aps_width), 1632u);
    EXPECT_EQ(cfa.evs_height(preset.aps_height), 1224u);
}

TEST(Cfa, PresetSensorDimensions) {
    EXPECT_EQ(sensor_preset("gen2").aps_width, 3264u);
    EXPECT_EQ(sensor_preset("gen2").aps_height, 2448u);
    EXPECT_THROW(sensor_preset("bayer"), LayoutError);
}

TEST(Cfa, RejectsBadLayouts) {
    EXPECT_THROW(CfaLayout::preset("nope"), LayoutError);
    EXPECT_THROW(CfaLayout(2, 2, {CfaRole::R, CfaRole::G, CfaRole::G}), LayoutError);
    EXPECT_THROW(CfaLayout(1, 1, {CfaRole::EvsW}), LayoutError);
    EXPECT_THROW(CfaLayout::preset("quad_bayer").check_tiles(66, 64), LayoutError);
    EXPECT_NO_THROW(CfaLayout::preset("quad_bayer").check_tiles(64, 64));
}

TEST(Cfa, RoleNamesRoundTrip) {
    for (auto r : {CfaRole::R, CfaRole::G, CfaRole::B, CfaRole::W, CfaRole::EvsW, CfaRole::EvsR, CfaRole::EvsG,
                   CfaRole::EvsB}) {
        EXPECT_EQ(parse_role(role_name(r)), r);
    }
    EXPECT_THROW(parse_role("Q"), FormatError);
    EXPECT_EQ(filter_channel(CfaRole::B), 2);
    EXPECT_FALSE(filter_channel(CfaRole::W).has_value());
}

TEST(Image, PlaneShapeChecks) {
    EXPECT_THROW(ImagePlane(2, 2, std::vector<double>(3)), LayoutError);
    ImagePlane p(3, 2, 1.5);
    p.at(2, 1) = 4.0;
    EXPECT_EQ(p[5], 4.0);
    EXPECT_THROW(require_same_shape(p, ImagePlane(2, 3), "test"), LayoutError);
}

TEST(Image, RawFrameValidation) {
    RawFrame f{2, 1, 10, 1000, {0, 1023}};
    EXPECT_NO_THROW(f.validate());
    f.data[1] = 1024;
    EXPECT_THROW(f.validate(), FormatError);
    f.data[1] = 0;
    f.exposure_us = 0;
    EXPECT_THROW(f.validate(), FormatError);
}

TEST(FrameStack, MeanAndUnbiasedVariance) {
    FrameStack s{{ImagePlane(1, 1, 1.0), ImagePlane(1, 1, 2.0), ImagePlane(1, 1, 6.0)}, 10.0, false};
    const auto mv = stack_mean_var(s);
    EXPECT_DOUBLE_EQ(mv.mean[0], 3.0);
    // Deviations -2, -1, 3: sum of squares 14, / (n - 1) = 7.
    EXPECT_DOUBLE_EQ(mv.variance[0], 7.0);
    EXPECT_THROW(stack_mean_var(FrameStack{{ImagePlane(1, 1)}, 1.0, false}), InsufficientDataError);
}

TEST(Events, CanonicalOrderIsTimeRowColumn) {
    std::vector<EventRecord> ev{{5, 0, 1, 1}, {5, 1, 0, -1}, {2, 3, 3, 1}, {5, 0, 0, 1}};
    sort_canonical(ev);
    EXPECT_EQ(ev[0], (EventRecord{2, 3, 3, 1}));
    EXPECT_EQ(ev[1], (EventRecord{5, 0, 0, 1}));
    EXPECT_EQ(ev[2], (EventRecord{5, 1, 0, -1}));
    EXPECT_EQ(ev[3], (EventRecord{5, 0, 1, 1}));
    EXPECT_TRUE(is_canonical(ev));
    EXPECT_NO_THROW(validate_stream(ev, 4, 4));
    EXPECT_THROW(validate_stream(ev, 3, 4), FormatError);
    std::swap(ev[0], ev[1]);
    EXPECT_THROW(validate_stream(ev, 4, 4), FormatError);
}

TEST(Params, Validation) {
    const auto cfa = CfaLayout::preset("gen2");
    auto aps = ApsNoiseParams::zero(8, 8, cfa.position_count(), 10);
    EXPECT_NO_THROW(aps.validate(cfa));
    aps.beta_a.pop_back();
    EXPECT_THROW(aps.validate(cfa), LayoutError);

    auto evs = EvsNoiseParams::with_zero_maps(4, 4, {1, 1, 0, 0, 0, 0}, 0.75);
    EXPECT_DOUBLE_EQ(evs.theta(), 0.75);
    EXPECT_NO_THROW(evs.validate(4, 4));
    EXPECT_THROW(evs.validate(4, 5), LayoutError);
    evs.beta_e[5] = 1.5;
    EXPECT_THROW(evs.validate(4, 4), ParameterError);
    evs.beta_e[5] = 0.0;
    evs.beta_e[0] = 0.0;
    EXPECT_THROW(evs.validate(4, 4), ParameterError);
}

}  // namespace
