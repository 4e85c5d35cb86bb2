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

#ifndef CATATTACK_DETECTOR_HPP_
#define CATATTACK_DETECTOR_HPP_

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "catattack/tensor.hpp"

namespace catattack {

inline constexpr double kDefaultVisualThreshold = 0.3;

// Pixel location in heatmap (output) coordinates. Image-space position is
// (row, col) * output_stride.
struct HeatmapCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const HeatmapCoord&) const = default;
};

// Per-category post-activation score maps, values in [0, 1].
class HeatmapStack {
 public:
  HeatmapStack() = default;
  HeatmapStack(int categories, int height, int width, int output_stride)
      : scores_(categories, height, width), output_stride_(output_stride) {}
  HeatmapStack(Tensor3 scores, int output_stride)
      : scores_(std::move(scores)), output_stride_(output_stride) {}

  int category_count() const { return scores_.channels(); }
  int height() const { return scores_.height(); }
  int width() const { return scores_.width(); }
  int output_stride() const { return output_stride_; }

  double score(int category, HeatmapCoord s) const {
    return scores_.at(category, s.row, s.col);
  }
  double& score(int category, HeatmapCoord s) {
    return scores_.at(category, s.row, s.col);
  }
  bool contains(HeatmapCoord s) const {
    return s.row >= 0 && s.col >= 0 && s.row < height() && s.col < width();
  }

  // Category with the highest score at s; ties go to the lower index.
  int argmax(HeatmapCoord s) const;

  const Tensor3& scores() const { return scores_; }
  Tensor3& scores() { return scores_; }

  bool operator==(const HeatmapStack&) const = default;

 private:
  Tensor3 scores_;
  int output_stride_ = 1;
};

struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

double iou(const Box& a, const Box& b);

struct Detection {
  int category = 0;
  Box box;
  double score = 0.0;
};

struct FeatureActivation {
  std::string layer_id;
  Tensor3 activation;
};

// One weighted term of a differentiable objective over heatmap outputs.
struct ScoreTerm {
  int category = 0;
  HeatmapCoord pixel;
  double weight = 1.0;
};
using Objective = std::vector<ScoreTerm>;

// How each term enters the objective: weight * f_c(x, s) or
// weight * CE(f(x, s), c) = -weight * log f_c(x, s).
enum class TermKind { kScore, kCrossEntropy };

// Differentiable heatmap detector consumed by every attack.
//
// Implementations must be deterministic and must not mutate state on const
// calls, so a single instance can serve concurrent workers.
class DetectorOracle {
 public:
  virtual ~DetectorOracle() = default;

  virtual int category_count() const = 0;
  virtual Shape3 input_shape() const = 0;
  virtual int output_stride() const = 0;
  virtual double visual_threshold() const { return kDefaultVisualThreshold; }

  virtual HeatmapStack infer_heatmaps(const Tensor3& image) const = 0;

  // Decoded boxes above `threshold`. Oracles without box heads throw
  // ConfigError.
  virtual std::vector<Detection> detect(const Tensor3& image,
                                        double threshold) const;

  // Gradient of each objective with respect to the input image. All
  // objectives share one forward pass.
  virtual std::vector<Tensor3> input_gradients(
      const Tensor3& image, std::span<const Objective> objectives,
      TermKind kind) const = 0;

  // Layers whose activations are exposed for saliency; empty by default.
  virtual std::vector<std::string> feature_layers() const { return {}; }

  // Gradient of the score objective with respect to a layer's activation.
  virtual FeatureActivation feature_gradient(const Tensor3& image,
                                             const Objective& objective,
                                             const std::string& layer_id) const;

  virtual FeatureActivation feature_activation(
      const Tensor3& image, const std::string& layer_id) const;

  // Forward pass with `delta` added to one activation entry of `layer_id`.
  // Exists for finite-difference checks of feature gradients.
  virtual HeatmapStack infer_heatmaps_with_activation_offset(
      const Tensor3& image, const std::string& layer_id, std::size_t index,
      double delta) const;
};

// Checked entry points. They validate shapes and coordinates before
// delegating to the oracle.
HeatmapStack infer_heatmaps(const DetectorOracle& oracle, const Tensor3& image);

Tensor3 grad_score_sum(const DetectorOracle& oracle, const Tensor3& image,
                       int category, std::span<const HeatmapCoord> pixels);

Tensor3 grad_loss_sum(const DetectorOracle& oracle, const Tensor3& image,
                      int category, std::span<const HeatmapCoord> pixels);

FeatureActivation grad_wrt_features(const DetectorOracle& oracle,
                                    const Tensor3& image, int category,
                                    std::span<const HeatmapCoord> pixels,
                                    const std::string& layer_id);

void validate_image(const DetectorOracle& oracle, const Tensor3& image);

Objective make_objective(int category, std::span<const HeatmapCoord> pixels,
                         double weight = 1.0);

}  // namespace catattack

#endif  // CATATTACK_DETECTOR_HPP_
