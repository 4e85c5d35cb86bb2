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

#include <unistd.h>

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "catattack/errors.hpp"
#include "catattack/image_io.hpp"

namespace catattack {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("catattack_" + std::to_string(::getpid()) + "_" + name);
}

Tensor3 noise_image(int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  Tensor3 t(channels, 17, 23);
  for (double& v : t.values()) v = u(rng);
  return t;
}

TEST(ImageIo, PngRoundTripIsLossless) {
  for (int channels : {1, 3}) {
    const Tensor3 img = noise_image(channels, 4);
    const auto path = temp_file("rt.png");
    write_png(path, img);
    EXPECT_EQ(read_png(path), img);
    std::filesystem::remove(path);
  }
}

TEST(ImageIo, PngRoundsAndClamps) {
  Tensor3 img(1, 1, 3);
  img.at(0, 0, 0) = -4.0;
  img.at(0, 0, 1) = 12.6;
  img.at(0, 0, 2) = 300.0;
  const auto path = temp_file("clamp.png");
  write_png(path, img);
  const Tensor3 back = read_png(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.at(0, 0, 0), 0.0);
  EXPECT_EQ(back.at(0, 0, 1), 13.0);
  EXPECT_EQ(back.at(0, 0, 2), 255.0);
}

TEST(ImageIo, MissingPngIsIoError) {
  EXPECT_THROW(read_png(temp_file("absent.png")), IoError);
}

TEST(ImageIo, NpyRoundTripIsExact) {
  Tensor3 t(2, 3, 4);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.1 * double(i) - 0.7;
  const auto path = temp_file("a.npy");
  write_npy(path, t);
  EXPECT_EQ(read_npy(path), t);
  std::filesystem::remove(path);
}

TEST(ImageIo, JpegRoundTripKeepsShapeAndIsClose) {
  Tensor3 img(3, 32, 32);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) img.at(c, y, x) = 60 + 40 * c + 2 * x;
    }
  }
  const Tensor3 back = jpeg_round_trip(img, 95);
  ASSERT_EQ(back.shape(), img.shape());
  EXPECT_LE(linf_norm(back - img), 12.0);
  EXPECT_THROW(encode_jpeg(img, 0), InputError);
  EXPECT_THROW(decode_jpeg({0x00, 0x01, 0x02}), IoError);
}

}  // namespace
}  // namespace catattack
