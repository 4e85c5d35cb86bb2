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

#include "catattack/decode.hpp"

#include <algorithm>

#include "catattack/errors.hpp"

namespace catattack {

bool is_suppressed_peak(const HeatmapStack& heatmaps, int c, HeatmapCoord s) {
  const double v = heatmaps.score(c, s);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dy == 0 && dx == 0) continue;
      const HeatmapCoord n{s.row + dy, s.col + dx};
      if (!heatmaps.contains(n)) continue;
      const double u = heatmaps.score(c, n);
      if (u > v) return false;
      // Equal neighbour earlier in raster order owns the plateau.
      if (u == v && (dy < 0 || (dy == 0 && dx < 0))) return false;
    }
  }
  return true;
}

std::vector<Detection> decode_detections(const HeatmapStack& heatmaps,
                                         const Tensor3& size,
                                         const Tensor3& offset,
                                         double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("decode threshold must lie in (0, 1)");
  }
  const int stride = heatmaps.output_stride();
  const double img_w = static_cast<double>(heatmaps.width()) * stride;
  const double img_h = static_cast<double>(heatmaps.height()) * stride;
  std::vector<Detection> out;
  for (int c = 0; c < heatmaps.category_count(); ++c) {
    for (int r = 0; r < heatmaps.height(); ++r) {
      for (int q = 0; q < heatmaps.width(); ++q) {
        const HeatmapCoord s{r, q};
        const double v = heatmaps.score(c, s);
        if (v <= threshold || !is_suppressed_peak(heatmaps, c, s)) continue;
        const double cx = (q + offset.at(0, r, q)) * stride;
        const double cy = (r + offset.at(1, r, q)) * stride;
        const double w = std::max(0.0, size.at(0, r, q)) * stride;
        const double h = std::max(0.0, size.at(1, r, q)) * stride;
        const double x0 = std::clamp(cx - w / 2, 0.0, img_w);
        const double x1 = std::clamp(cx + w / 2, 0.0, img_w);
        const double y0 = std::clamp(cy - h / 2, 0.0, img_h);
        const double y1 = std::clamp(cy + h / 2, 0.0, img_h);
        out.push_back({c, Box{(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0},
                       v});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.score > b.score;
                   });
  return out;
}

}  // namespace catattack
