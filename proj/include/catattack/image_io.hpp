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

#ifndef CATATTACK_IMAGE_IO_HPP_
#define CATATTACK_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "catattack/tensor.hpp"

namespace catattack {

// 8-bit PNG, 1 or 3 channels. Values are rounded and clamped to [0, 255].
void write_png(const std::filesystem::path& path, const Tensor3& image);
Tensor3 read_png(const std::filesystem::path& path);

// In-memory baseline JPEG codec (libjpeg), 3 channels.
std::vector<std::uint8_t> encode_jpeg(const Tensor3& image, int quality);
Tensor3 decode_jpeg(const std::vector<std::uint8_t>& bytes);
Tensor3 jpeg_round_trip(const Tensor3& image, int quality);

// NumPy .npy (little-endian float64, C order, shape (C, H, W)).
void write_npy(const std::filesystem::path& path, const Tensor3& array);
Tensor3 read_npy(const std::filesystem::path& path);

}  // namespace catattack

#endif  // CATATTACK_IMAGE_IO_HPP_
