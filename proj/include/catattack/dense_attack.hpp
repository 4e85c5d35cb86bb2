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

#ifndef CATATTACK_DENSE_ATTACK_HPP_
#define CATATTACK_DENSE_ATTACK_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catattack/attack_result.hpp"
#include "catattack/detector.hpp"
#include "catattack/targets.hpp"

namespace catattack {

enum class DenseVariant { kGlobal, kLocal, kSemantic };

const char* variant_name(DenseVariant v);

// Binary image-resolution mask, broadcast over channels.
class AttackMask {
 public:
  AttackMask() = default;
  AttackMask(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width),
        values_(static_cast<std::size_t>(height) * width, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  std::uint8_t at(int y, int x) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  void set(int y, int x, std::uint8_t v) {
    values_[static_cast<std::size_t>(y) * width_ + x] = v;
  }
  std::size_t count() const;
  double coverage() const;

  // Multiplies every channel of `t` by the mask.
  void apply(Tensor3& t) const;
  Tensor3 to_image() const;  // 1 x H x W, 0 or 255

  bool operator==(const AttackMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> values_;
};

struct DenseAttackConfig {
  DenseVariant variant = DenseVariant::kGlobal;
  double epsilon = 0.05 * kPixelMax;  // 12.75
  int max_iter = 30;
  double threshold = kDefaultAttackThreshold;
  int r_star = 60;
  double t_s = 0.5;
  // Empty selects every feature layer the oracle declares.
  std::vector<std::string> layers;
  // Masks are built once from the initial sets unless this is set.
  bool recompute_mask = false;
  double pixel_min = kPixelMin;
  double pixel_max = kPixelMax;

  void validate() const;
};

struct CategoryGradient {
  Tensor3 gradient;  // unit L-infinity unless degenerate
  bool degenerate = false;
};

// grad_x sum_{s in S_j} CE(f(x, s), C_j), normalised by its L-infinity norm.
CategoryGradient category_gradient(const DetectorOracle& oracle,
                                   const Tensor3& x, int category,
                                   std::span<const HeatmapCoord> pixels);

// (epsilon / max_iter) * sign(G).
Tensor3 global_perturbation(const Tensor3& total_gradient, double epsilon,
                            int max_iter);

// Squares of side r_star centred on every target pixel's image location.
// Odd sides are symmetric; even sides extend one extra row/column towards
// larger indices.
AttackMask generate_local_mask(const CategoryTargetSets& sets, int height,
                               int width, int output_stride, int r_star);

struct LayerSaliency {
  std::string layer_id;
  Tensor3 normalized;  // 1 x H x W in [0, 1], upsampled
  AttackMask mask;
  bool constant = false;  // max(G_i) == min(G_i); map set to zero
};

struct SemanticMask {
  AttackMask mask;
  std::vector<LayerSaliency> layers;
};

// Bilinear resize of a 1-channel map (half-pixel centres, edge clamped).
Tensor3 upsample_bilinear(const Tensor3& map, int height, int width);

SemanticMask generate_semantic_mask(const DetectorOracle& oracle,
                                    const Tensor3& x,
                                    const CategoryTargetSets& sets,
                                    const std::vector<std::string>& layers,
                                    double t_s);

// Dense category-wise attack in its global, local and semantic variants.
// `mask_override` replaces the variant's mask (local/semantic only).
AttackResult dca(const DetectorOracle& oracle, const Tensor3& x,
                 const CategoryTargetSets& sets, const DenseAttackConfig& config,
                 const AttackMask* mask_override = nullptr);

// Mask the variant would use on (x, sets); empty optional for kGlobal.
std::optional<AttackMask> dense_attack_mask(const DetectorOracle& oracle,
                                            const Tensor3& x,
                                            const CategoryTargetSets& sets,
                                            const DenseAttackConfig& config);

}  // namespace catattack

#endif  // CATATTACK_DENSE_ATTACK_HPP_
