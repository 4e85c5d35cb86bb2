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

#include "catattack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "catattack/errors.hpp"

namespace catattack {

double average_precision(
    const std::vector<std::vector<Detection>>& detections,
    const std::vector<std::vector<Annotation>>& ground_truth, int category,
    double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("IoU threshold must lie in (0, 1)");
  }
  if (detections.size() != ground_truth.size()) {
    throw InputError("detections and ground truth cover different images");
  }
  std::size_t gt_count = 0;
  std::vector<std::vector<bool>> matched(ground_truth.size());
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    matched[i].assign(ground_truth[i].size(), false);
    for (const Annotation& a : ground_truth[i]) {
      if (a.category == category) ++gt_count;
    }
  }
  if (gt_count == 0) return -1.0;

  // (score, image, detection index); stable order for equal scores.
  std::vector<std::tuple<double, std::size_t, std::size_t>> ranked;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    for (std::size_t d = 0; d < detections[i].size(); ++d) {
      if (detections[i][d].category == category) {
        ranked.emplace_back(detections[i][d].score, i, d);
      }
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) > std::get<0>(b);
  });

  std::vector<double> precision;
  std::vector<double> recall;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const auto& [score, img, d] : ranked) {
    const Box& box = detections[img][d].box;
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < ground_truth[img].size(); ++g) {
      const Annotation& a = ground_truth[img][g];
      if (a.category != category || matched[img][g]) continue;
      const double o = iou(box, a.box);
      if (o > best) {
        best = o;
        best_gt = g;
      }
    }
    if (best >= iou_threshold) {
      matched[img][best_gt] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(double(tp) / double(tp + fp));
    recall.push_back(double(tp) / double(gt_count));
  }

  // Precision envelope, then area under the step curve.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

double map_score(const std::vector<std::vector<Detection>>& detections,
                 const std::vector<std::vector<Annotation>>& ground_truth,
                 double iou_threshold) {
  int max_category = -1;
  for (const auto& image : ground_truth) {
    for (const Annotation& a : image) max_category = std::max(max_category, a.category);
  }
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c <= max_category; ++c) {
    const double ap = average_precision(detections, ground_truth, c, iou_threshold);
    if (ap < 0.0) continue;
    sum += ap;
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / counted;
}

double asr(double map_clean, double map_attack) {
  if (!(map_clean > 0.0)) {
    throw UndefinedMetricError("ASR undefined: clean mAP is zero");
  }
  return 1.0 - map_attack / map_clean;
}

double atr(double asr_target, double asr_origin) {
  if (!(asr_origin > 0.0)) {
    throw UndefinedMetricError("ATR undefined: origin ASR is zero");
  }
  return asr_target / asr_origin;
}

std::size_t perturbed_pixel_count(const Tensor3& r) {
  std::size_t count = 0;
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      for (int c = 0; c < r.channels(); ++c) {
        if (r.at(c, y, x) != 0.0) {
          ++count;
          break;
        }
      }
    }
  }
  return count;
}

PerturbationNorms perturbation_norms(const Tensor3& r) {
  if (r.empty()) return {};
  const double pixels = double(r.height()) * r.width();
  return {double(perturbed_pixel_count(r)) / pixels,
          l2_norm(r) / (kPixelMax * std::sqrt(double(r.size())))};
}

}  // namespace catattack
