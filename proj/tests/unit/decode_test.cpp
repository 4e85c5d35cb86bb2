/* Copyright 2026 The catattack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <random>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "catattack/decode.hpp"
#include "catattack/errors.hpp"

namespace catattack {
namespace {

struct Heads {
  Tensor3 size;
  Tensor3 offset;
};

Heads constant_heads(int h, int w, double size) {
  return {Tensor3(2, h, w, size), Tensor3(2, h, w, 0.0)};
}

// Peaks under a strict total order: higher score first, then earlier
// raster position. A pixel is kept iff it outranks all of its neighbours.
std::set<std::tuple<int, int, int>> brute_force_peaks(const HeatmapStack& h,
                                                      double threshold) {
  std::set<std::tuple<int, int, int>> out;
  for (int c = 0; c < h.category_count(); ++c) {
    for (int r = 0; r < h.height(); ++r) {
      for (int q = 0; q < h.width(); ++q) {
        const double v = h.score(c, {r, q});
        if (v <= threshold) continue;
        const auto key = std::make_tuple(v, -(r * h.width() + q));
        bool best = true;
        for (int rr = std::max(0, r - 1); rr <= std::min(h.height() - 1, r + 1); ++rr) {
          for (int qq = std::max(0, q - 1); qq <= std::min(h.width() - 1, q + 1); ++qq) {
            if (rr == r && qq == q) continue;
            const auto other =
                std::make_tuple(h.score(c, {rr, qq}), -(rr * h.width() + qq));
            if (other > key) best = false;
          }
        }
        if (best) out.insert({c, r, q});
      }
    }
  }
  return out;
}

TEST(Decode, NothingAboveThreshold) {
  HeatmapStack h(2, 8, 8, 4);
  for (double& v : h.scores().values()) v = 0.2;
  const Heads heads = constant_heads(8, 8, 3.0);
  EXPECT_TRUE(decode_detections(h, heads.size, heads.offset, 0.3).empty());
}

TEST(Decode, SinglePeakMapsThroughStride) {
  HeatmapStack h(1, 16, 16, 4);
  h.score(0, {8, 8}) = 0.9;
  const Heads heads = constant_heads(16, 16, 5.0);
  const auto dets = decode_detections(h, heads.size, heads.offset, 0.3);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].category, 0);
  EXPECT_DOUBLE_EQ(dets[0].score, 0.9);
  EXPECT_DOUBLE_EQ(dets[0].box.cx, 32.0);
  EXPECT_DOUBLE_EQ(dets[0].box.cy, 32.0);
  EXPECT_DOUBLE_EQ(dets[0].box.w, 20.0);
  EXPECT_DOUBLE_EQ(dets[0].box.h, 20.0);
}

TEST(Decode, OffsetShiftsCentre) {
  HeatmapStack h(1, 16, 16, 4);
  h.score(0, {2, 3}) = 0.8;
  Heads heads = constant_heads(16, 16, 2.0);
  heads.offset.at(0, 2, 3) = 0.5;
  heads.offset.at(1, 2, 3) = 0.25;
  const auto dets = decode_detections(h, heads.size, heads.offset, 0.3);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_DOUBLE_EQ(dets[0].box.cx, 14.0);
  EXPECT_DOUBLE_EQ(dets[0].box.cy, 9.0);
}

TEST(Decode, BoxesAreClippedToImage) {
  HeatmapStack h(1, 8, 8, 4);
  h.score(0, {0, 0}) = 0.7;
  const Heads heads = constant_heads(8, 8, 4.0);
  const auto dets = decode_detections(h, heads.size, heads.offset, 0.3);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_DOUBLE_EQ(dets[0].box.cx, 4.0);
  EXPECT_DOUBLE_EQ(dets[0].box.w, 8.0);
  EXPECT_GE(dets[0].box.cx - dets[0].box.w / 2, 0.0);
}

TEST(Decode, PlateauYieldsOnePeak) {
  HeatmapStack h(1, 8, 8, 4);
  for (int r = 3; r <= 4; ++r) {
    for (int q = 2; q <= 4; ++q) h.score(0, {r, q}) = 0.6;
  }
  const Heads heads = constant_heads(8, 8, 2.0);
  const auto dets = decode_detections(h, heads.size, heads.offset, 0.3);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_DOUBLE_EQ(dets[0].box.cx, 8.0);
  EXPECT_DOUBLE_EQ(dets[0].box.cy, 12.0);
}

TEST(Decode, RejectsThresholdOutsideUnitInterval) {
  HeatmapStack h(1, 4, 4, 4);
  const Heads heads = constant_heads(4, 4, 1.0);
  EXPECT_THROW(decode_detections(h, heads.size, heads.offset, 0.0), InputError);
  EXPECT_THROW(decode_detections(h, heads.size, heads.offset, 1.0), InputError);
}

TEST(Decode, MatchesBruteForceScanOnRandomHeatmaps) {
  std::mt19937_64 rng(41);
  // Coarse quantisation makes ties and plateaus frequent.
  std::uniform_int_distribution<int> level(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    HeatmapStack h(2, 12, 10, 4);
    for (double& v : h.scores().values()) v = level(rng) / 10.0;
    const Heads heads = constant_heads(12, 10, 1.0);
    const double thr = trial % 2 ? 0.3 : 0.55;
    std::set<std::tuple<int, int, int>> got;
    double last = 1.0;
    for (const Detection& d : decode_detections(h, heads.size, heads.offset, thr)) {
      EXPECT_LE(d.score, last);
      last = d.score;
      got.insert({d.category, int(d.box.cy / 4), int(d.box.cx / 4)});
    }
    EXPECT_EQ(got, brute_force_peaks(h, thr)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace catattack
