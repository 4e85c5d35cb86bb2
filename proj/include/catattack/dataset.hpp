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

#ifndef CATATTACK_DATASET_HPP_
#define CATATTACK_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catattack/detector.hpp"
#include "catattack/tensor.hpp"

namespace catattack {

// Category index doubles as shape: 0 circle, 1 square, 2 triangle.
enum class ShapeKind { kCircle = 0, kSquare = 1, kTriangle = 2 };
inline constexpr int kMaxShapeKinds = 3;

const char* shape_name(int category);

struct Annotation {
  int category = 0;
  Box box;
};

struct Sample {
  std::string id;
  Tensor3 image;
  std::vector<Annotation> annotations;
};

struct SyntheticConfig {
  int image_size = 128;
  int categories = 3;
  int count = 1000;
  int min_objects = 1;
  int max_objects = 3;
  int min_object_size = 16;
  int max_object_size = 32;
  double noise_sigma = 6.0;
  std::uint64_t seed = 7;
  // Index of the first generated sample; lets train/test splits share a
  // seed without overlapping.
  int first_index = 0;
};

// Deterministic for a fixed config. Every object lies fully inside the
// canvas; pixel values are integers in [0, 255].
std::vector<Sample> generate_synthetic_dataset(const SyntheticConfig& config);

// Writes `images/<id>.png` under `dir` plus a line-delimited manifest.
void write_dataset(const std::filesystem::path& dir,
                   const std::string& manifest_name,
                   const std::vector<Sample>& samples);

// Reads a manifest written by write_dataset; image paths are relative to the
// manifest's directory.
std::vector<Sample> read_dataset(const std::filesystem::path& manifest);

}  // namespace catattack

#endif  // CATATTACK_DATASET_HPP_
