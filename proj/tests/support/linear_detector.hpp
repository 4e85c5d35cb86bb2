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

#ifndef CATATTACK_TESTS_LINEAR_DETECTOR_HPP_
#define CATATTACK_TESTS_LINEAR_DETECTOR_HPP_

#include <cmath>
#include <vector>

#include "catattack/detector.hpp"

namespace catattack::testing {

// Detector with a 1x1 heatmap whose raw scores are affine in the input:
// f_j(x) = w_j . x + b_j. No squashing, so gradients are the rows of W.
class LinearDetector final : public DetectorOracle {
 public:
  LinearDetector(Shape3 input, std::vector<std::vector<double>> weights,
                 std::vector<double> bias)
      : input_(input), weights_(std::move(weights)), bias_(std::move(bias)) {}

  int category_count() const override { return int(weights_.size()); }
  Shape3 input_shape() const override { return input_; }
  int output_stride() const override { return input_.height; }

  HeatmapStack infer_heatmaps(const Tensor3& image) const override {
    HeatmapStack h(category_count(), 1, 1, output_stride());
    for (int j = 0; j < category_count(); ++j) {
      h.score(j, {0, 0}) = score(j, image);
    }
    return h;
  }

  std::vector<Tensor3> input_gradients(const Tensor3& image,
                                       std::span<const Objective> objectives,
                                       TermKind kind) const override {
    std::vector<Tensor3> out;
    for (const Objective& o : objectives) {
      Tensor3 g(input_);
      for (const ScoreTerm& t : o) {
        double scale = t.weight;
        if (kind == TermKind::kCrossEntropy) scale /= -score(t.category, image);
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] += scale * weights_[t.category][i];
        }
      }
      out.push_back(std::move(g));
    }
    return out;
  }

  double score(int j, const Tensor3& x) const {
    double s = bias_[j];
    for (std::size_t i = 0; i < x.size(); ++i) s += weights_[j][i] * x[i];
    return s;
  }

 private:
  Shape3 input_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

}  // namespace catattack::testing

#endif  // CATATTACK_TESTS_LINEAR_DETECTOR_HPP_
