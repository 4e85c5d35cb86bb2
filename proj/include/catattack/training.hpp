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

#ifndef CATATTACK_TRAINING_HPP_
#define CATATTACK_TRAINING_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "catattack/dataset.hpp"
#include "catattack/toy_detector.hpp"

namespace catattack {

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double heatmap_loss = 0.0;
  double size_loss = 0.0;
  double offset_loss = 0.0;
  double learning_rate = 0.0;
};

// Focal heatmap loss + L1 size/offset loss, Adam, single-threaded and
// deterministic for a fixed seed.
struct TrainConfig {
  int epochs = 24;
  int batch_size = 8;
  double learning_rate = 2e-3;
  double size_weight = 0.1;
  double offset_weight = 1.0;
  double focal_alpha = 2.0;
  double focal_beta = 4.0;
  std::uint64_t seed = 1;
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  ToyCenterNet detector;
  std::vector<EpochLog> log;
};

TrainResult train_toy_detector(const std::vector<Sample>& dataset,
                               const ToyDetectorConfig& detector_config,
                               const TrainConfig& config);

// CenterNet's Gaussian radius for a box of (height, width) heatmap units.
double gaussian_radius(double height, double width, double min_overlap = 0.7);

}  // namespace catattack

#endif  // CATATTACK_TRAINING_HPP_
