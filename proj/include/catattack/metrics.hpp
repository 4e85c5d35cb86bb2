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

#ifndef CATATTACK_METRICS_HPP_
#define CATATTACK_METRICS_HPP_

#include <vector>

#include "catattack/dataset.hpp"
#include "catattack/detector.hpp"
#include "catattack/tensor.hpp"

namespace catattack {

inline constexpr double kDefaultIouThreshold = 0.5;

// All-point interpolated AP of one category. Detections are matched greedily
// in descending score order to the unmatched ground-truth box with the
// highest IoU >= iou_threshold. Returns -1 when the category has no ground
// truth.
double average_precision(
    const std::vector<std::vector<Detection>>& detections,
    const std::vector<std::vector<Annotation>>& ground_truth, int category,
    double iou_threshold = kDefaultIouThreshold);

// Mean AP over categories that have ground truth; 0 when none do.
double map_score(const std::vector<std::vector<Detection>>& detections,
                 const std::vector<std::vector<Annotation>>& ground_truth,
                 double iou_threshold = kDefaultIouThreshold);

// 1 - map_attack / map_clean. Throws UndefinedMetricError if map_clean <= 0.
double asr(double map_clean, double map_attack);

// asr_target / asr_origin. Throws UndefinedMetricError if asr_origin <= 0.
double atr(double asr_target, double asr_origin);

struct PerturbationNorms {
  double p_l0 = 0.0;  // share of spatial pixels with any channel changed
  double p_l2 = 0.0;  // ||r||_2 / (255 sqrt(H W C))
};

PerturbationNorms perturbation_norms(const Tensor3& r);
std::size_t perturbed_pixel_count(const Tensor3& r);

}  // namespace catattack

#endif  // CATATTACK_METRICS_HPP_
