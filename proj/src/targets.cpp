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

#include "catattack/targets.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

#include "catattack/errors.hpp"

namespace catattack {

std::size_t CategoryTargetSets::total_size() const {
  std::size_t n = 0;
  for (const auto& [c, pixels] : sets_) n += pixels.size();
  return n;
}

const std::vector<TargetPixel>& CategoryTargetSets::at(int category) const {
  static const std::vector<TargetPixel> kEmpty;
  const auto it = sets_.find(category);
  return it == sets_.end() ? kEmpty : it->second;
}

std::vector<HeatmapCoord> CategoryTargetSets::coords(int category) const {
  std::vector<HeatmapCoord> out;
  for (const TargetPixel& p : at(category)) out.push_back(p.coord);
  return out;
}

void CategoryTargetSets::set(int category, std::vector<TargetPixel> pixels) {
  if (pixels.empty()) {
    sets_.erase(category);
    return;
  }
  std::sort(pixels.begin(), pixels.end(),
            [](const TargetPixel& a, const TargetPixel& b) {
              return a.coord < b.coord;
            });
  sets_[category] = std::move(pixels);
}

void CategoryTargetSets::insert(const TargetPixel& pixel) {
  std::vector<TargetPixel>& v = sets_[pixel.original_category];
  const auto pos = std::lower_bound(
      v.begin(), v.end(), pixel,
      [](const TargetPixel& a, const TargetPixel& b) { return a.coord < b.coord; });
  if (pos != v.end() && pos->coord == pixel.coord) return;
  v.insert(pos, pixel);
}

CategoryTargetSets build_target_sets(const HeatmapStack& heatmaps,
                                     double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("attacking threshold must lie in (0, 1)");
  }
  CategoryTargetSets sets(threshold);
  for (int r = 0; r < heatmaps.height(); ++r) {
    for (int c = 0; c < heatmaps.width(); ++c) {
      const HeatmapCoord s{r, c};
      const int j = heatmaps.argmax(s);
      const double score = heatmaps.score(j, s);
      if (score > threshold) sets.insert({s, j, score});
    }
  }
  return sets;
}

std::optional<SelectedSet> select_highest_set(const CategoryTargetSets& sets,
                                              const HeatmapStack& heatmaps) {
  std::optional<SelectedSet> best;
  double best_sum = 0.0;
  // std::map iterates in ascending category order, so strict > keeps the
  // lowest index on ties.
  for (const auto& [category, pixels] : sets.sets()) {
    double sum = 0.0;
    for (const TargetPixel& p : pixels) sum += heatmaps.score(category, p.coord);
    if (!best || sum > best_sum) {
      best = SelectedSet{category, pixels};
      best_sum = sum;
    }
  }
  return best;
}

bool pixel_survives(const HeatmapStack& reference,
                    const HeatmapStack& adversarial, HeatmapCoord s,
                    double threshold) {
  const int adv = adversarial.argmax(s);
  return adv == reference.argmax(s) && adversarial.score(adv, s) > threshold;
}

std::vector<TargetPixel> remove_pixels(const HeatmapStack& reference,
                                       const HeatmapStack& adversarial,
                                       const std::vector<TargetPixel>& pixels,
                                       double threshold) {
  std::vector<TargetPixel> kept;
  for (const TargetPixel& p : pixels) {
    if (pixel_survives(reference, adversarial, p.coord, threshold)) {
      kept.push_back(p);
    }
  }
  return kept;
}

std::vector<TargetPixel> remove_pixels(const DetectorOracle& oracle,
                                       const Tensor3& reference,
                                       const Tensor3& adversarial,
                                       const std::vector<TargetPixel>& pixels,
                                       double threshold) {
  if (pixels.empty()) return {};
  return remove_pixels(infer_heatmaps(oracle, reference),
                       infer_heatmaps(oracle, adversarial), pixels, threshold);
}

CategoryTargetSets prune_all(const CategoryTargetSets& sets,
                             const HeatmapStack& reference,
                             const HeatmapStack& adversarial) {
  CategoryTargetSets out(sets.threshold());
  for (const auto& [category, pixels] : sets.sets()) {
    out.set(category,
            remove_pixels(reference, adversarial, pixels, sets.threshold()));
  }
  return out;
}

std::vector<TargetPixel> surviving_clean_targets(const HeatmapStack& clean,
                                                 const HeatmapStack& adversarial,
                                                 double threshold) {
  std::vector<TargetPixel> out;
  for (int r = 0; r < clean.height(); ++r) {
    for (int c = 0; c < clean.width(); ++c) {
      const HeatmapCoord s{r, c};
      const int j = clean.argmax(s);
      if (clean.score(j, s) <= threshold) continue;
      if (adversarial.argmax(s) == j && adversarial.score(j, s) > threshold) {
        out.push_back({s, j, clean.score(j, s)});
      }
    }
  }
  return out;
}

void write_target_sets(std::ostream& out, const CategoryTargetSets& sets) {
  for (const auto& [category, pixels] : sets.sets()) {
    for (const TargetPixel& p : pixels) {
      out << nlohmann::ordered_json{{"category", category},
                            {"row", p.coord.row},
                            {"col", p.coord.col},
                            {"score", p.original_score}}
                 .dump()
          << '\n';
    }
  }
}

}  // namespace catattack
