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

#ifndef CATATTACK_DECODE_HPP_
#define CATATTACK_DECODE_HPP_

#include <vector>

#include "catattack/detector.hpp"

namespace catattack {

// True when s is a 3x3-suppressed peak of category `c`: its score beats every
// neighbour, and among equal neighbours the first in raster order wins, so a
// plateau yields a single peak.
bool is_suppressed_peak(const HeatmapStack& heatmaps, int c, HeatmapCoord s);

// CenterNet-style peak decode. `size` holds (w, h) and `offset` holds
// (dx, dy), both in heatmap units. Boxes are clipped to the image.
std::vector<Detection> decode_detections(const HeatmapStack& heatmaps,
                                         const Tensor3& size,
                                         const Tensor3& offset,
                                         double threshold);

}  // namespace catattack

#endif  // CATATTACK_DECODE_HPP_
