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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "catattack/dense_attack.hpp"
#include "catattack/errors.hpp"
#include "catattack/toy_detector.hpp"
#include "gradient_check.hpp"

namespace catattack {
namespace {

struct Fixture {
  ToyCenterNet net{ToyDetectorConfig{}};
  Tensor3 x;
  CategoryTargetSets sets;

  explicit Fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    x = testing::random_image(net.input_shape(), rng);
    sets = build_target_sets(infer_heatmaps(net, x), 0.1);
  }
};

CategoryTargetSets single_pixel(HeatmapCoord s) {
  CategoryTargetSets sets(0.1);
  sets.insert({s, 0, 0.5});
  return sets;
}

TEST(GlobalPerturbation, SignStepMagnitudes) {
  Tensor3 g(1, 2, 3);
  EXPECT_EQ(global_perturbation(g, 12.75, 30), Tensor3(1, 2, 3));
  g[0] = 3.0;
  g[1] = -1e-9;
  const Tensor3 gp = global_perturbation(g, 12.75, 30);
  EXPECT_DOUBLE_EQ(gp[0], 0.425);
  EXPECT_DOUBLE_EQ(gp[1], -0.425);
  EXPECT_EQ(gp[2], 0.0);
  EXPECT_EQ(global_perturbation(g * -1.0, 12.75, 30), gp * -1.0);
  EXPECT_THROW(global_perturbation(g, 1.0, 0), InputError);
}

TEST(LocalMask, EmptySetsGiveEmptyMask) {
  EXPECT_EQ(generate_local_mask(CategoryTargetSets(0.1), 64, 64, 4, 9).count(), 0u);
}

TEST(LocalMask, SinglePixelSquare) {
  const AttackMask m = generate_local_mask(single_pixel({5, 5}), 128, 128, 4, 3);
  EXPECT_EQ(m.count(), 9u);
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      const bool inside = y >= 19 && y <= 21 && x >= 19 && x <= 21;
      EXPECT_EQ(m.at(y, x), inside ? 1 : 0) << y << "," << x;
    }
  }
}

TEST(LocalMask, EvenSideExtendsTowardsLargerIndices) {
  const AttackMask m = generate_local_mask(single_pixel({5, 5}), 128, 128, 4, 4);
  EXPECT_EQ(m.count(), 16u);
  EXPECT_EQ(m.at(19, 19), 1);
  EXPECT_EQ(m.at(22, 22), 1);
  EXPECT_EQ(m.at(18, 20), 0);
  EXPECT_EQ(m.at(23, 20), 0);
}

TEST(LocalMask, ClippedAtBorder) {
  const AttackMask m = generate_local_mask(single_pixel({0, 31}), 128, 128, 4, 5);
  EXPECT_EQ(m.count(), 3u * 5u);
  EXPECT_EQ(m.at(0, 126), 1);
  EXPECT_EQ(m.at(0, 127), 0);
  EXPECT_EQ(m.at(2, 122), 1);
}

TEST(LocalMask, LargerSideCoversSmaller) {
  const Fixture f(1);
  const AttackMask big = generate_local_mask(f.sets, 128, 128, 4, 60);
  const AttackMask small = generate_local_mask(f.sets, 128, 128, 4, 48);
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (small.at(y, x)) EXPECT_EQ(big.at(y, x), 1);
    }
  }
}

TEST(Upsample, ConstantAndBilinearValues) {
  Tensor3 c(1, 4, 4, 0.7);
  const Tensor3 flat = upsample_bilinear(c, 16, 16);
  for (double v : flat.values()) EXPECT_DOUBLE_EQ(v, 0.7);
  Tensor3 ramp(1, 1, 2);
  ramp.at(0, 0, 0) = 0.0;
  ramp.at(0, 0, 1) = 1.0;
  const Tensor3 up = upsample_bilinear(ramp, 1, 4);
  // Half-pixel centres: source positions -0.25, 0.25, 0.75, 1.25.
  EXPECT_DOUBLE_EQ(up.at(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(up.at(0, 0, 1), 0.25);
  EXPECT_DOUBLE_EQ(up.at(0, 0, 2), 0.75);
  EXPECT_DOUBLE_EQ(up.at(0, 0, 3), 1.0);
}

TEST(SemanticMask, ProductOfLayerMasks) {
  for (std::uint64_t seed : {2u, 3u}) {
    const Fixture f(seed);
    ASSERT_FALSE(f.sets.empty());
    const SemanticMask sm =
        generate_semantic_mask(f.net, f.x, f.sets, f.net.feature_layers(), 0.5);
    ASSERT_EQ(sm.layers.size(), 4u);
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) {
        bool all = true;
        for (const LayerSaliency& l : sm.layers) {
          const double v = l.normalized.at(0, y, x);
          EXPECT_GE(v, 0.0);
          EXPECT_LE(v, 1.0);
          EXPECT_EQ(l.mask.at(y, x), v > 0.5 ? 1 : 0);
          all = all && l.mask.at(y, x);
        }
        EXPECT_EQ(sm.mask.at(y, x), all ? 1 : 0);
      }
    }
  }
}

TEST(SemanticMask, ThresholdOneGivesEmptyMask) {
  const Fixture f(4);
  EXPECT_EQ(generate_semantic_mask(f.net, f.x, f.sets, {"block1", "block3"}, 1.0)
                .mask.count(),
            0u);
}

TEST(SemanticMask, ConstantLayerIsFlaggedAndZero) {
  // A zero head gives zero feature gradients everywhere.
  const ToyCenterNet net = ToyCenterNet::with_zero_head({});
  std::mt19937_64 rng(5);
  const Tensor3 x = testing::random_image(net.input_shape(), rng);
  const SemanticMask sm =
      generate_semantic_mask(net, x, single_pixel({4, 4}), {"block2"}, 0.0);
  ASSERT_EQ(sm.layers.size(), 1u);
  EXPECT_TRUE(sm.layers[0].constant);
  EXPECT_EQ(linf_norm(sm.layers[0].normalized), 0.0);
  EXPECT_EQ(sm.mask.count(), 0u);
}

TEST(SemanticMask, RejectsBadArguments) {
  const Fixture f(6);
  EXPECT_THROW(generate_semantic_mask(f.net, f.x, f.sets, {}, 0.5), ConfigError);
  EXPECT_THROW(generate_semantic_mask(f.net, f.x, f.sets, {"conv9"}, 0.5),
               ConfigError);
}

TEST(CategoryGradient, UnitInfinityNorm) {
  const Fixture f(7);
  for (const auto& [c, pixels] : f.sets.sets()) {
    std::vector<HeatmapCoord> coords;
    for (const TargetPixel& p : pixels) coords.push_back(p.coord);
    const CategoryGradient g = category_gradient(f.net, f.x, c, coords);
    EXPECT_FALSE(g.degenerate);
    EXPECT_NEAR(linf_norm(g.gradient), 1.0, 1e-12);
  }
  const ToyCenterNet flat = ToyCenterNet::with_zero_head({});
  const std::vector<HeatmapCoord> one = {{3, 3}};
  const CategoryGradient z = category_gradient(flat, f.x, 0, one);
  EXPECT_TRUE(z.degenerate);
  EXPECT_EQ(linf_norm(z.gradient), 0.0);
}

TEST(Dca, EmptySetsSucceedWithoutChange) {
  const Fixture f(8);
  DenseAttackConfig cfg;
  const AttackResult r = dca(f.net, f.x, CategoryTargetSets(0.1), cfg);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(linf_norm(r.perturbation), 0.0);
}

TEST(Dca, GlobalBudgetAndQuantisedSteps) {
  const Fixture f(9);
  DenseAttackConfig cfg;
  cfg.max_iter = 6;
  const AttackResult r = dca(f.net, f.x, f.sets, cfg);
  const double step = cfg.epsilon / cfg.max_iter;
  EXPECT_LE(linf_norm(r.perturbation), cfg.epsilon + 1e-9);
  for (std::size_t i = 0; i < r.perturbation.size(); ++i) {
    // Pixels near the range ends may have been clamped on the way.
    const double x = f.x[i];
    if (x < cfg.epsilon || x > 255.0 - cfg.epsilon) continue;
    const double k = r.perturbation[i] / step;
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
  EXPECT_EQ(r.trace.size(), std::size_t(r.iterations));
}

TEST(Dca, MaskedVariantsStayInsideMask) {
  for (DenseVariant v : {DenseVariant::kLocal, DenseVariant::kSemantic}) {
    const Fixture f(10);
    DenseAttackConfig cfg;
    cfg.variant = v;
    cfg.max_iter = 5;
    cfg.r_star = 9;
    cfg.t_s = 0.3;
    const auto mask = dense_attack_mask(f.net, f.x, f.sets, cfg);
    ASSERT_TRUE(mask.has_value());
    const AttackResult r = dca(f.net, f.x, f.sets, cfg);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 128; ++y) {
        for (int x = 0; x < 128; ++x) {
          if (!mask->at(y, x)) EXPECT_EQ(r.perturbation.at(c, y, x), 0.0);
        }
      }
    }
  }
}

TEST(Dca, AllOnesLocalMaskReproducesGlobal) {
  const Fixture f(11);
  DenseAttackConfig g;
  g.max_iter = 5;
  DenseAttackConfig l = g;
  l.variant = DenseVariant::kLocal;
  const AttackMask ones(128, 128, 1);
  const AttackResult rg = dca(f.net, f.x, f.sets, g);
  const AttackResult rl = dca(f.net, f.x, f.sets, l, &ones);
  EXPECT_EQ(rg.adversarial, rl.adversarial);
  EXPECT_EQ(rg.iterations, rl.iterations);
  ASSERT_EQ(rg.trace.size(), rl.trace.size());
  for (std::size_t i = 0; i < rg.trace.size(); ++i) {
    EXPECT_EQ(rg.trace[i].remaining, rl.trace[i].remaining);
  }
  // A square covering the whole image does the same.
  l.r_star = 255;
  EXPECT_EQ(dca(f.net, f.x, f.sets, l).adversarial, rg.adversarial);
}

TEST(Dca, RejectsInvalidConfig) {
  const Fixture f(12);
  DenseAttackConfig cfg;
  cfg.epsilon = 0.0;
  EXPECT_THROW(dca(f.net, f.x, f.sets, cfg), ConfigError);
  cfg = DenseAttackConfig{};
  cfg.t_s = 1.5;
  EXPECT_THROW(dca(f.net, f.x, f.sets, cfg), ConfigError);
}

}  // namespace
}  // namespace catattack
