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

#ifndef CATATTACK_TARGETS_HPP_
#define CATATTACK_TARGETS_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "catattack/detector.hpp"

namespace catattack {

inline constexpr double kDefaultAttackThreshold = 0.1;

struct TargetPixel {
  HeatmapCoord coord;
  int original_category = 0;
  double original_score = 0.0;

  bool operator==(const TargetPixel&) const = default;
};

// Disjoint per-category sets of attacked heatmap pixels. Each set is kept
// sorted by coordinate; categories with no pixels are absent from the map.
class CategoryTargetSets {
 public:
  CategoryTargetSets() = default;
  explicit CategoryTargetSets(double threshold) : threshold_(threshold) {}

  double threshold() const { return threshold_; }
  bool empty() const { return sets_.empty(); }
  std::size_t total_size() const;

  const std::map<int, std::vector<TargetPixel>>& sets() const { return sets_; }
  const std::vector<TargetPixel>& at(int category) const;
  std::vector<HeatmapCoord> coords(int category) const;

  // Replaces a category's set; an empty set removes the category.
  void set(int category, std::vector<TargetPixel> pixels);
  void insert(const TargetPixel& pixel);

  bool operator==(const CategoryTargetSets&) const = default;

 private:
  double threshold_ = kDefaultAttackThreshold;
  std::map<int, std::vector<TargetPixel>> sets_;
};

// s joins S_j, j = argmax_c f_c(s), iff f_j(s) > T.
CategoryTargetSets build_target_sets(const HeatmapStack& heatmaps,
                                     double threshold);

struct SelectedSet {
  int category = 0;
  std::vector<TargetPixel> pixels;
};

// Category with the largest summed current score over its set; ties go to
// the lower index. Empty optional when every set is empty.
std::optional<SelectedSet> select_highest_set(const CategoryTargetSets& sets,
                                              const HeatmapStack& heatmaps);

// Pixel survives iff its argmax on `adversarial` equals its argmax on
// `reference` and that score is above T.
bool pixel_survives(const HeatmapStack& reference,
                    const HeatmapStack& adversarial, HeatmapCoord s,
                    double threshold);

std::vector<TargetPixel> remove_pixels(const HeatmapStack& reference,
                                       const HeatmapStack& adversarial,
                                       const std::vector<TargetPixel>& pixels,
                                       double threshold);

std::vector<TargetPixel> remove_pixels(const DetectorOracle& oracle,
                                       const Tensor3& reference,
                                       const Tensor3& adversarial,
                                       const std::vector<TargetPixel>& pixels,
                                       double threshold);

// Prunes every set against the same pair of heatmaps.
CategoryTargetSets prune_all(const CategoryTargetSets& sets,
                             const HeatmapStack& reference,
                             const HeatmapStack& adversarial);

// Pixels that were targets on the clean heatmaps and still hold their clean
// argmax category above T on the adversarial heatmaps (full scan).
std::vector<TargetPixel> surviving_clean_targets(const HeatmapStack& clean,
                                                 const HeatmapStack& adversarial,
                                                 double threshold);

// One line per pixel: {"category", "row", "col", "score"}.
void write_target_sets(std::ostream& out, const CategoryTargetSets& sets);

}  // namespace catattack

#endif  // CATATTACK_TARGETS_HPP_
