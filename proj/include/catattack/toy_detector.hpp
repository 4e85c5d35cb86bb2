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

#ifndef CATATTACK_TOY_DETECTOR_HPP_
#define CATATTACK_TOY_DETECTOR_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catattack/detector.hpp"
#include "catattack/network.hpp"

namespace catattack {

struct ToyDetectorConfig {
  std::string variant = "small";  // "small" or "wide"
  int categories = 3;
  int input_size = 128;
  int channels = 3;
  std::uint64_t seed = 1;

  // Backbone width per variant.
  int backbone_width() const;
};

struct DetectorOutput {
  HeatmapStack heatmaps;
  Tensor3 size;    // 2 x H_out x W_out, (w, h) in heatmap units
  Tensor3 offset;  // 2 x H_out x W_out, (dx, dy) sub-cell offsets
};

// Four ReLU conv blocks (strides 2, 2, then two dilated blocks) feeding one
// 3x3 head that emits k heatmap logits, 2 size and 2 offset channels.
// Output stride is 4.
class ToyCenterNet final : public DetectorOracle {
 public:
  static constexpr int kOutputStride = 4;
  static constexpr int kBackboneLayers = 4;
  static constexpr double kHeatmapBiasInit = -2.19;

  // Randomly initialised from config.seed.
  explicit ToyCenterNet(ToyDetectorConfig config);

  // Random backbone, all-zero head: every score is sigmoid(0) = 0.5.
  static ToyCenterNet with_zero_head(ToyDetectorConfig config);

  const ToyDetectorConfig& config() const { return config_; }

  int category_count() const override { return config_.categories; }
  Shape3 input_shape() const override;
  int output_stride() const override { return kOutputStride; }

  HeatmapStack infer_heatmaps(const Tensor3& image) const override;
  std::vector<Tensor3> input_gradients(const Tensor3& image,
                                       std::span<const Objective> objectives,
                                       TermKind kind) const override;
  std::vector<std::string> feature_layers() const override;
  FeatureActivation feature_gradient(const Tensor3& image,
                                     const Objective& objective,
                                     const std::string& layer_id) const override;
  FeatureActivation feature_activation(
      const Tensor3& image, const std::string& layer_id) const override;
  HeatmapStack infer_heatmaps_with_activation_offset(
      const Tensor3& image, const std::string& layer_id, std::size_t index,
      double delta) const override;

  DetectorOutput infer(const Tensor3& image) const;
  std::vector<Detection> detect(const Tensor3& image,
                                double threshold) const override;

  // Network input is (pixel - 127.5) / 64.
  static RowMatrix preprocess(const Tensor3& image);
  static constexpr double kInputScale = 1.0 / 64.0;

  NetworkCore& core() { return core_; }
  const NetworkCore& core() const { return core_; }

  std::uint64_t weights_hash() const;

  void save(const std::filesystem::path& path) const;
  static ToyCenterNet load(const std::filesystem::path& path);

 private:
  ToyCenterNet(ToyDetectorConfig config, NetworkCore core);
  int layer_index(const std::string& layer_id) const;
  HeatmapStack heatmaps_from(const ForwardState& state) const;

  ToyDetectorConfig config_;
  NetworkCore core_;
};

}  // namespace catattack

#endif  // CATATTACK_TOY_DETECTOR_HPP_
