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

#include "catattack/errors.hpp"
#include "catattack/sparse_attack.hpp"
#include "catattack/toy_detector.hpp"
#include "gradient_check.hpp"
#include "linear_detector.hpp"
#include "linear_solver_oracle.hpp"

namespace catattack {
namespace {

using testing::LinearDetector;
using testing::brute_force_single_coordinate;

Tensor3 vec(std::initializer_list<double> v) {
  Tensor3 t(int(v.size()), 1, 1);
  std::size_t i = 0;
  for (double x : v) t[i++] = x;
  return t;
}

TEST(LinearSolver, HandFixture) {
  const double n = std::sqrt(10.0);
  const BoundaryNormal normal{vec({3 / n, 1 / n}), vec({1, 1})};
  const LinearSolverResult r = linear_solver(vec({0, 0}), normal);
  ASSERT_EQ(r.coords.size(), 1u);
  EXPECT_EQ(r.coords[0], 0u);
  EXPECT_NEAR(r.point[0], 4.0 / 3.0, 1e-12);
  EXPECT_EQ(r.point[1], 0.0);
  EXPECT_NEAR(r.residual, 0.0, 1e-12);
  EXPECT_TRUE(r.complete);
}

TEST(LinearSolver, AlreadyOnHyperplane) {
  const BoundaryNormal normal{vec({0.6, 0.8}), vec({3, 4})};
  const LinearSolverResult r = linear_solver(vec({3, 4}), normal);
  EXPECT_TRUE(r.coords.empty());
  EXPECT_EQ(r.point, vec({3, 4}));
  EXPECT_TRUE(r.complete);
}

TEST(LinearSolver, MatchesBruteForceWithoutClamping) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(50.0, 200.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor3 x(5, 1, 1);
    Tensor3 b(5, 1, 1);
    Tensor3 w(5, 1, 1);
    for (std::size_t i = 0; i < 5; ++i) {
      x[i] = coord(rng);
      b[i] = x[i] + gauss(rng);
      w[i] = gauss(rng);
    }
    w *= 1.0 / l2_norm(w);
    const LinearSolverResult got = linear_solver(x, {w, b});
    const auto want = brute_force_single_coordinate(x, w, b);
    EXPECT_EQ(got.coords.size(), want.changed) << "trial " << trial;
    EXPECT_EQ(got.point, want.point) << "trial " << trial;
  }
}

TEST(LinearSolver, ClampingSpillsToNextCoordinate) {
  // First coordinate saturates at 255; the second finishes the job.
  const BoundaryNormal normal{vec({0.8, 0.6}), vec({300, 10})};
  const LinearSolverResult r = linear_solver(vec({250, 10}), normal);
  ASSERT_EQ(r.coords.size(), 2u);
  EXPECT_EQ(r.point[0], 255.0);
  EXPECT_NEAR(r.point[1], 10 + (0.8 * 45) / 0.6, 1e-9);
  EXPECT_TRUE(r.complete);
}

TEST(LinearSolver, ExhaustionIsFlaggedIncomplete) {
  const BoundaryNormal normal{vec({0.8, 0.6}), vec({1000, 1000})};
  const LinearSolverResult r = linear_solver(vec({0, 0}), normal);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.point, vec({255, 255}));
}

// f_0 = (1, 2, 0.5).x, f_1 = (2, -1, 1).x + 0.1 at x = (0.1, 0.2, 0.3):
// f_0 = 0.65, f_1 = 0.4, v = (1, -3, 0.5), |v|^2 = 10.25,
// step = 1.02 * 0.4 / 10.25.
TEST(Cwdf, OneStepMatchesClosedForm) {
  const LinearDetector det({3, 1, 1}, {{1, 2, 0.5}, {2, -1, 1}}, {0.0, 0.1});
  SparseAttackConfig cfg;
  cfg.cwdf_max_steps = 1;
  const std::vector<TargetPixel> s = {{{0, 0}, 0, 0.65}};
  const CwdfResult r = cwdf(det, vec({0.1, 0.2, 0.3}), 0, s, cfg);
  EXPECT_EQ(r.steps, 1);
  EXPECT_NEAR(r.boundary_point[0], 0.13980487804878049, 1e-5);
  EXPECT_NEAR(r.boundary_point[1], 0.08058536585365853, 1e-5);
  EXPECT_NEAR(r.boundary_point[2], 0.31990243902439025, 1e-5);
}

TEST(Cwdf, EmptySetReturnsInput) {
  const LinearDetector det({3, 1, 1}, {{1, 0, 0}, {0, 1, 0}}, {0, 0});
  const Tensor3 x = vec({1, 2, 3});
  const CwdfResult r = cwdf(det, x, 0, {}, {});
  EXPECT_EQ(r.boundary_point, x);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.steps, 0);
}

TEST(Cwdf, VanishingDirectionsRaiseAfterNudge) {
  const LinearDetector det({3, 1, 1}, {{1, 1, 1}, {1, 1, 1}}, {0.5, 0.0});
  const std::vector<TargetPixel> s = {{{0, 0}, 0, 0.8}};
  EXPECT_THROW(cwdf(det, vec({0.1, 0.1, 0.1}), 0, s, {}),
               DegenerateGradientError);
}

TEST(Cwdf, SetSizesNeverGrow) {
  const ToyCenterNet net({});
  std::mt19937_64 rng(31);
  SparseAttackConfig cfg;
  cfg.cwdf_max_steps = 10;
  cfg.deepfool_margin = true;
  for (int trial = 0; trial < 2; ++trial) {
    const Tensor3 x = testing::random_image(net.input_shape(), rng);
    const HeatmapStack h = infer_heatmaps(net, x);
    const auto chosen = select_highest_set(build_target_sets(h, 0.1), h);
    ASSERT_TRUE(chosen.has_value());
    const CwdfResult r = cwdf(net, x, chosen->category, chosen->pixels, cfg);
    std::size_t last = chosen->pixels.size();
    for (std::size_t n : r.set_sizes) {
      EXPECT_LE(n, last);
      last = n;
    }
    for (double v : r.boundary_point.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 255.0);
    }
  }
}

TEST(ApproxBoundary, LinearDetectorNormal) {
  const LinearDetector det({3, 1, 1}, {{1, 2, 0.5}, {2, -1, 1}}, {0.0, 0.1});
  const Tensor3 x = vec({0.1, 0.2, 0.3});   // argmax 0
  const Tensor3 xb = vec({0.5, 0.0, 0.3});  // f_0 = 0.65, f_1 = 1.4
  const std::vector<TargetPixel> s = {{{0, 0}, 0, 0.65}};
  const BoundaryNormal n = approx_boundary(det, xb, x, s);
  const Tensor3 expected = vec({1, -3, 0.5}) * (1.0 / std::sqrt(10.25));
  EXPECT_NEAR(l2_norm(n.w), 1.0, 1e-6);
  EXPECT_LE(linf_norm(n.w - expected), 1e-6);
  EXPECT_EQ(n.anchor, xb);

  const LinearDetector scaled({3, 1, 1}, {{3, 6, 1.5}, {6, -3, 3}}, {0.0, 0.3});
  EXPECT_LE(linf_norm(approx_boundary(scaled, xb, x, s).w - n.w), 1e-12);
}

TEST(ApproxBoundary, NoLabelChangeIsDegenerate) {
  const LinearDetector det({3, 1, 1}, {{1, 2, 0.5}, {2, -1, 1}}, {0.0, 0.1});
  const Tensor3 x = vec({0.1, 0.2, 0.3});
  const std::vector<TargetPixel> s = {{{0, 0}, 0, 0.65}};
  EXPECT_THROW(approx_boundary(det, x, x, s), DegenerateGradientError);
  const BoundaryNormal t = approx_threshold_boundary(det, x, x, s);
  EXPECT_NEAR(l2_norm(t.w), 1.0, 1e-12);
  EXPECT_LE(linf_norm(t.w + vec({1, 2, 0.5}) * (1.0 / std::sqrt(5.25))), 1e-12);
}

TEST(ApproxBoundary, ToyNormalsAreUnit) {
  const ToyCenterNet net({});
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor3 x = testing::random_image(net.input_shape(), rng);
    const HeatmapStack h = infer_heatmaps(net, x);
    const auto chosen = select_highest_set(build_target_sets(h, 0.1), h);
    ASSERT_TRUE(chosen.has_value());
    const BoundaryNormal n =
        approx_threshold_boundary(net, x, x, chosen->pixels);
    EXPECT_NEAR(l2_norm(n.w), 1.0, 1e-6);
  }
}

TEST(Sca, EmptySetsSucceedImmediately) {
  const LinearDetector det({3, 1, 1}, {{1, 0, 0}, {0, 1, 0}}, {0, 0});
  const Tensor3 x = vec({1, 2, 3});
  const AttackResult r = sca(det, x, CategoryTargetSets(0.1), {});
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(linf_norm(r.perturbation), 0.0);
  EXPECT_EQ(r.adversarial, x);
}

TEST(Sca, LinearDetectorFlipsAndTracksSupport) {
  // Scores stay below 1 on the relevant region; category 0 starts on top.
  const LinearDetector det({4, 1, 1},
                           {{0.002, 0.001, 0.0005, 0.0}, {0.0, 0.001, 0.002, 0.0005}},
                           {0.1, 0.0});
  const Tensor3 x = vec({120, 100, 60, 80});
  const CategoryTargetSets sets = build_target_sets(det.infer_heatmaps(x), 0.1);
  ASSERT_EQ(sets.total_size(), 1u);
  for (bool margin : {false, true}) {
    SparseAttackConfig cfg;
    cfg.deepfool_margin = margin;
    const AttackResult r = sca(det, x, sets, cfg);
    EXPECT_TRUE(r.success) << margin;
    const HeatmapStack after = det.infer_heatmaps(r.adversarial);
    EXPECT_FALSE(after.argmax({0, 0}) == 0 && after.score(0, {0, 0}) > 0.1);
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < r.perturbation.size(); ++i) {
      if (r.perturbation[i] != 0.0) support.push_back(i);
    }
    EXPECT_EQ(support, r.touched);
    for (double v : r.adversarial.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 255.0);
    }
  }
}

TEST(Sca, RejectsInvalidConfig) {
  const LinearDetector det({3, 1, 1}, {{1, 0, 0}, {0, 1, 0}}, {0, 0});
  SparseAttackConfig cfg;
  cfg.max_iter_outer = 0;
  EXPECT_THROW(sca(det, vec({1, 2, 3}), CategoryTargetSets(0.1), cfg),
               ConfigError);
}

}  // namespace
}  // namespace catattack
