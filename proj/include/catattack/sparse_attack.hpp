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

#ifndef CATATTACK_SPARSE_ATTACK_HPP_
#define CATATTACK_SPARSE_ATTACK_HPP_

#include <cstdint>
#include <vector>

#include "catattack/attack_result.hpp"
#include "catattack/detector.hpp"
#include "catattack/targets.hpp"

namespace catattack {

struct SparseAttackConfig {
  double threshold = kDefaultAttackThreshold;
  int max_iter_outer = 50;
  int max_iter_inner = 20;
  int cwdf_max_steps = 50;
  // Each CWDF step is scaled by (1 + overshoot).
  double overshoot = 0.02;
  // false: score_j = sum f_j (as in the original CWDF); true: the classic
  // DeepFool margin score_j = sum (f_j - f_h).
  bool deepfool_margin = false;
  double pixel_min = kPixelMin;
  double pixel_max = kPixelMax;
  // Seeds the nudge applied when every CWDF direction vanishes.
  std::uint64_t seed = 0;

  void validate() const;
};

struct CwdfResult {
  Tensor3 boundary_point;
  std::vector<TargetPixel> remaining;
  std::vector<std::size_t> set_sizes;  // |S_h| after each step
  int steps = 0;
  bool complete = false;
};

// Category-wise DeepFool over the pixels of one category. Works on a copy of
// the set; the caller's set is untouched.
CwdfResult cwdf(const DetectorOracle& oracle, const Tensor3& x, int category,
                const std::vector<TargetPixel>& pixels,
                const SparseAttackConfig& config);

struct BoundaryNormal {
  Tensor3 w;       // unit L2
  Tensor3 anchor;  // boundary point x^B
};

// Normal of sum_s [f_adv(s)(x^B, s) - f_clean(s)(x^B, s)] at x^B, where
// adv(s) / clean(s) are the argmax categories at x^B / x.
// Throws DegenerateGradientError when the gradient vanishes.
BoundaryNormal approx_boundary(const DetectorOracle& oracle,
                               const Tensor3& x_boundary, const Tensor3& x,
                               const std::vector<TargetPixel>& pixels);

// Fallback normal for pixels that left the set by dropping under T without
// changing category: the boundary is f_clean = T, normal -grad sum f_clean.
BoundaryNormal approx_threshold_boundary(const DetectorOracle& oracle,
                                         const Tensor3& x_boundary,
                                         const Tensor3& x,
                                         const std::vector<TargetPixel>& pixels);

struct LinearSolverResult {
  Tensor3 point;
  std::vector<std::size_t> coords;  // in the order they were changed
  bool complete = false;            // reached or crossed the hyperplane
  double residual = 0.0;            // w^T (x_final - x^B)
};

// Greedy single-coordinate projection onto {x' : w^T (x' - x^B) = 0}; each
// step uses the unused coordinate with the largest |w_d| and clamps to the
// pixel range.
LinearSolverResult linear_solver(const Tensor3& x, const BoundaryNormal& normal,
                                 double pixel_min = kPixelMin,
                                 double pixel_max = kPixelMax);

// Sparse category-wise attack.
AttackResult sca(const DetectorOracle& oracle, const Tensor3& x,
                 const CategoryTargetSets& sets,
                 const SparseAttackConfig& config);

}  // namespace catattack

#endif  // CATATTACK_SPARSE_ATTACK_HPP_
