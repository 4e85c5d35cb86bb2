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

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "catattack/errors.hpp"
#include "catattack/toy_detector.hpp"
#include "gradient_check.hpp"

namespace catattack {
namespace {

using testing::check_feature_gradient;
using testing::check_input_gradient;
using testing::random_image;
using testing::random_pixels;

ToyDetectorConfig small_config(std::uint64_t seed = 3) {
  ToyDetectorConfig c;
  c.seed = seed;
  return c;
}

TEST(ToyDetector, ZeroHeadScoresAreOneHalf) {
  const ToyCenterNet net = ToyCenterNet::with_zero_head(small_config());
  const HeatmapStack h = infer_heatmaps(net, Tensor3(net.input_shape()));
  EXPECT_EQ(h.category_count(), 3);
  EXPECT_EQ(h.height(), 32);
  EXPECT_EQ(h.width(), 32);
  EXPECT_EQ(h.output_stride(), 4);
  for (double v : h.scores().values()) EXPECT_EQ(v, 0.5);
}

TEST(ToyDetector, InferenceIsDeterministicAndBounded) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(11);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const HeatmapStack a = infer_heatmaps(net, x);
  const HeatmapStack b = infer_heatmaps(net, x);
  EXPECT_EQ(a, b);
  for (double v : a.scores().values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(ToyDetector, RejectsWrongShape) {
  const ToyCenterNet net(small_config());
  EXPECT_THROW(infer_heatmaps(net, Tensor3(3, 64, 64)), InputError);
  EXPECT_THROW(infer_heatmaps(net, Tensor3(1, 128, 128)), InputError);
}

TEST(ToyDetector, RejectsUnknownVariant) {
  ToyDetectorConfig c = small_config();
  c.variant = "huge";
  EXPECT_THROW(ToyCenterNet{c}, ConfigError);
}

TEST(ToyDetector, TargetValidation) {
  const ToyCenterNet net(small_config());
  const Tensor3 x(net.input_shape(), 100.0);
  const std::vector<HeatmapCoord> outside = {{32, 0}};
  EXPECT_THROW(grad_score_sum(net, x, 0, outside), InputError);
  EXPECT_THROW(grad_score_sum(net, x, 3, {}), InputError);
}

TEST(ToyDetector, EmptySetsGiveZeroGradients) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(5);
  const Tensor3 x = random_image(net.input_shape(), rng);
  EXPECT_EQ(linf_norm(grad_score_sum(net, x, 1, {})), 0.0);
  EXPECT_EQ(linf_norm(grad_loss_sum(net, x, 1, {})), 0.0);
  const FeatureActivation f = grad_wrt_features(net, x, 1, {}, "block2");
  EXPECT_EQ(f.layer_id, "block2");
  EXPECT_EQ(linf_norm(f.activation), 0.0);
}

TEST(ToyDetector, ScoreGradientMatchesCentralDifferences) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2; ++trial) {
    const Tensor3 x = random_image(net.input_shape(), rng);
    const auto pixels = random_pixels(32, 32, 3, rng);
    const auto r = check_input_gradient(net, x, trial % 3, pixels,
                                        TermKind::kScore, 20, 1e-3, rng);
    EXPECT_EQ(r.checked, 20u);
    EXPECT_LE(r.max_relative_error, 1e-2);
  }
}

TEST(ToyDetector, LossGradientMatchesCentralDifferences) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 2; ++trial) {
    const Tensor3 x = random_image(net.input_shape(), rng);
    const auto pixels = random_pixels(32, 32, 3, rng);
    const auto r = check_input_gradient(net, x, 2 - trial, pixels,
                                        TermKind::kCrossEntropy, 20, 1e-3, rng);
    EXPECT_EQ(r.checked, 20u);
    EXPECT_LE(r.max_relative_error, 1e-2);
  }
}

TEST(ToyDetector, ScoreGradientIsAdditiveOverDisjointSets) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(8);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const auto pixels = random_pixels(32, 32, 6, rng);
  const std::vector<HeatmapCoord> a(pixels.begin(), pixels.begin() + 3);
  const std::vector<HeatmapCoord> b(pixels.begin() + 3, pixels.end());
  const Tensor3 sum = grad_score_sum(net, x, 0, a) + grad_score_sum(net, x, 0, b);
  const Tensor3 joint = grad_score_sum(net, x, 0, pixels);
  EXPECT_LE(linf_norm(sum - joint), 1e-6);
}

TEST(ToyDetector, BatchedObjectivesMatchSingleQueries) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(9);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const auto pixels = random_pixels(32, 32, 4, rng);
  std::vector<Objective> objectives = {make_objective(0, pixels),
                                       make_objective(2, pixels)};
  const auto batch =
      net.input_gradients(x, objectives, TermKind::kCrossEntropy);
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0], grad_loss_sum(net, x, 0, pixels));
  EXPECT_EQ(batch[1], grad_loss_sum(net, x, 2, pixels));
}

TEST(ToyDetector, FeatureGradientsAddAcrossCategories) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(12);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const auto pixels = random_pixels(32, 32, 3, rng);
  for (const std::string& layer : net.feature_layers()) {
    Tensor3 sum;
    Objective all;
    for (int c = 0; c < 3; ++c) {
      const Tensor3 g = grad_wrt_features(net, x, c, pixels, layer).activation;
      sum = c == 0 ? g : sum + g;
      const Objective o = make_objective(c, pixels);
      all.insert(all.end(), o.begin(), o.end());
    }
    const Tensor3 joint = net.feature_gradient(x, all, layer).activation;
    EXPECT_LE(linf_norm(sum - joint), 1e-6) << layer;
  }
}

TEST(ToyDetector, FeatureGradientMatchesActivationOffsets) {
  const ToyCenterNet net(small_config());
  std::mt19937_64 rng(13);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const auto pixels = random_pixels(32, 32, 3, rng);
  ASSERT_EQ(net.feature_layers().size(), 4u);
  for (const std::string& layer : net.feature_layers()) {
    const auto r = check_feature_gradient(net, x, 1, pixels, layer, 20, 1e-5, rng);
    EXPECT_GT(r.checked, 0u) << layer;
    EXPECT_LE(r.max_relative_error, 1e-2) << layer;
  }
}

TEST(ToyDetector, UnknownFeatureLayerIsConfigError) {
  const ToyCenterNet net(small_config());
  const Tensor3 x(net.input_shape(), 10.0);
  const std::vector<HeatmapCoord> one = {{1, 1}};
  EXPECT_THROW(grad_wrt_features(net, x, 0, one, "block9"), ConfigError);
}

TEST(ToyDetector, CrossEntropyGradientShrinksWithConfidence) {
  ToyCenterNet net(small_config());
  // Category 0 saturates near 1; category 1 sits at 0.5 before its weights.
  Conv2d& head = net.core().layers().back();
  head.bias(0) = 8.0;
  head.bias(1) = 0.0;
  head.weight.row(1) = head.weight.row(0);
  std::mt19937_64 rng(14);
  const Tensor3 x = random_image(net.input_shape(), rng);
  const std::vector<HeatmapCoord> s = {{16, 16}};
  const HeatmapStack h = infer_heatmaps(net, x);
  ASSERT_GT(h.score(0, s[0]), 0.99);
  ASSERT_LT(std::abs(h.score(1, s[0]) - 0.5), 0.2);
  EXPECT_LT(l2_norm(grad_loss_sum(net, x, 0, s)),
            l2_norm(grad_loss_sum(net, x, 1, s)));
}

TEST(ToyDetector, CheckpointRoundTrip) {
  const ToyCenterNet net(small_config(17));
  const auto path = std::filesystem::temp_directory_path() /
                    ("catattack_ckpt_" + std::to_string(::getpid()) + ".bin");
  net.save(path);
  const ToyCenterNet loaded = ToyCenterNet::load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.weights_hash(), net.weights_hash());
  EXPECT_EQ(loaded.config().variant, "small");
  std::mt19937_64 rng(3);
  const Tensor3 x = random_image(net.input_shape(), rng);
  EXPECT_EQ(infer_heatmaps(loaded, x), infer_heatmaps(net, x));
}

TEST(ToyDetector, LoadRejectsForeignFiles) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("catattack_bad_" + std::to_string(::getpid()) + ".bin");
  { std::ofstream(path) << "not a checkpoint\n"; }
  EXPECT_THROW(ToyCenterNet::load(path), IoError);
  std::filesystem::remove(path);
  EXPECT_THROW(ToyCenterNet::load(path), IoError);
}

TEST(ToyDetector, WideVariantHasMoreChannels) {
  ToyDetectorConfig c = small_config();
  c.variant = "wide";
  const ToyCenterNet wide(c);
  const ToyCenterNet small(small_config());
  EXPECT_EQ(wide.core().layers().front().spec.out_channels, 24);
  EXPECT_EQ(small.core().layers().front().spec.out_channels, 16);
}

}  // namespace
}  // namespace catattack
