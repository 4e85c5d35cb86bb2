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

#include "catattack/detector.hpp"

#include <algorithm>
#include <string>

#include "catattack/errors.hpp"

namespace catattack {

int HeatmapStack::argmax(HeatmapCoord s) const {
  int best = 0;
  for (int c = 1; c < category_count(); ++c) {
    if (score(c, s) > score(best, s)) best = c;
  }
  return best;
}

double iou(const Box& a, const Box& b) {
  const double ix = std::max(
      0.0, std::min(a.cx + a.w / 2, b.cx + b.w / 2) -
               std::max(a.cx - a.w / 2, b.cx - b.w / 2));
  const double iy = std::max(
      0.0, std::min(a.cy + a.h / 2, b.cy + b.h / 2) -
               std::max(a.cy - a.h / 2, b.cy - b.h / 2));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<Detection> DetectorOracle::detect(const Tensor3&, double) const {
  throw ConfigError("oracle has no box regression heads");
}

FeatureActivation DetectorOracle::feature_gradient(
    const Tensor3&, const Objective&, const std::string& layer_id) const {
  throw ConfigError("oracle exposes no feature layer '" + layer_id + "'");
}

FeatureActivation DetectorOracle::feature_activation(
    const Tensor3&, const std::string& layer_id) const {
  throw ConfigError("oracle exposes no feature layer '" + layer_id + "'");
}

HeatmapStack DetectorOracle::infer_heatmaps_with_activation_offset(
    const Tensor3&, const std::string& layer_id, std::size_t, double) const {
  throw ConfigError("oracle exposes no feature layer '" + layer_id + "'");
}

void validate_image(const DetectorOracle& oracle, const Tensor3& image) {
  const Shape3 want = oracle.input_shape();
  if (!(image.shape() == want)) {
    throw InputError("image shape " + std::to_string(image.channels()) + "x" +
                     std::to_string(image.height()) + "x" +
                     std::to_string(image.width()) + " does not match oracle " +
                     std::to_string(want.channels) + "x" +
                     std::to_string(want.height) + "x" +
                     std::to_string(want.width));
  }
}

namespace {

void validate_target(const DetectorOracle& oracle, int category,
                     std::span<const HeatmapCoord> pixels) {
  if (category < 0 || category >= oracle.category_count()) {
    throw InputError("category index out of range");
  }
  const Shape3 in = oracle.input_shape();
  const int h = in.height / oracle.output_stride();
  const int w = in.width / oracle.output_stride();
  for (const HeatmapCoord& s : pixels) {
    if (s.row < 0 || s.col < 0 || s.row >= h || s.col >= w) {
      throw InputError("target pixel outside heatmap bounds");
    }
  }
}

}  // namespace

Objective make_objective(int category, std::span<const HeatmapCoord> pixels,
                         double weight) {
  Objective o;
  o.reserve(pixels.size());
  for (const HeatmapCoord& s : pixels) o.push_back({category, s, weight});
  return o;
}

HeatmapStack infer_heatmaps(const DetectorOracle& oracle,
                            const Tensor3& image) {
  validate_image(oracle, image);
  return oracle.infer_heatmaps(image);
}

Tensor3 grad_score_sum(const DetectorOracle& oracle, const Tensor3& image,
                       int category, std::span<const HeatmapCoord> pixels) {
  validate_image(oracle, image);
  validate_target(oracle, category, pixels);
  if (pixels.empty()) return Tensor3(image.shape());
  const Objective objective = make_objective(category, pixels);
  return std::move(oracle.input_gradients(image, {&objective, 1},
                                          TermKind::kScore)[0]);
}

Tensor3 grad_loss_sum(const DetectorOracle& oracle, const Tensor3& image,
                      int category, std::span<const HeatmapCoord> pixels) {
  validate_image(oracle, image);
  validate_target(oracle, category, pixels);
  if (pixels.empty()) return Tensor3(image.shape());
  const Objective objective = make_objective(category, pixels);
  return std::move(oracle.input_gradients(image, {&objective, 1},
                                          TermKind::kCrossEntropy)[0]);
}

FeatureActivation grad_wrt_features(const DetectorOracle& oracle,
                                    const Tensor3& image, int category,
                                    std::span<const HeatmapCoord> pixels,
                                    const std::string& layer_id) {
  validate_image(oracle, image);
  validate_target(oracle, category, pixels);
  const auto layers = oracle.feature_layers();
  if (std::find(layers.begin(), layers.end(), layer_id) == layers.end()) {
    throw ConfigError("unknown feature layer '" + layer_id + "'");
  }
  return oracle.feature_gradient(image, make_objective(category, pixels),
                                 layer_id);
}

}  // namespace catattack
