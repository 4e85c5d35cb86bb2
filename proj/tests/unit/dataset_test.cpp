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

#include <array>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "catattack/dataset.hpp"
#include "catattack/errors.hpp"

namespace catattack {
namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("catattack_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(SyntheticData, SameSeedSameSamples) {
  SyntheticConfig c;
  c.count = 5;
  const auto a = generate_synthetic_dataset(c);
  const auto b = generate_synthetic_dataset(c);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].image, b[i].image);
    ASSERT_EQ(a[i].annotations.size(), b[i].annotations.size());
  }
  c.seed = 8;
  EXPECT_NE(generate_synthetic_dataset(c)[0].image, a[0].image);
}

TEST(SyntheticData, SplitsDoNotOverlap) {
  SyntheticConfig train;
  train.count = 3;
  SyntheticConfig test = train;
  test.first_index = 3;
  SyntheticConfig all = train;
  all.count = 6;
  const auto joined = generate_synthetic_dataset(all);
  const auto tail = generate_synthetic_dataset(test);
  for (std::size_t i = 0; i < tail.size(); ++i) {
    EXPECT_EQ(tail[i].image, joined[i + 3].image);
    EXPECT_EQ(tail[i].id, joined[i + 3].id);
  }
}

TEST(SyntheticData, ZeroObjectsGivesBackgroundOnly) {
  SyntheticConfig c;
  c.count = 4;
  c.min_objects = 0;
  c.max_objects = 0;
  for (const Sample& s : generate_synthetic_dataset(c)) {
    EXPECT_TRUE(s.annotations.empty());
  }
}

TEST(SyntheticData, ObjectsInsideCanvasAndPixelsValid) {
  SyntheticConfig c;
  c.count = 50;
  for (const Sample& s : generate_synthetic_dataset(c)) {
    EXPECT_GE(s.annotations.size(), 1u);
    EXPECT_LE(s.annotations.size(), 3u);
    for (const Annotation& a : s.annotations) {
      EXPECT_GE(a.box.cx - a.box.w / 2, 0.0);
      EXPECT_GE(a.box.cy - a.box.h / 2, 0.0);
      EXPECT_LE(a.box.cx + a.box.w / 2, 128.0);
      EXPECT_LE(a.box.cy + a.box.h / 2, 128.0);
      EXPECT_GE(a.category, 0);
      EXPECT_LT(a.category, 3);
    }
    for (double v : s.image.values()) {
      EXPECT_EQ(v, std::round(v));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 255.0);
    }
  }
}

TEST(SyntheticData, CategoriesRoughlyUniform) {
  SyntheticConfig c;
  c.count = 1000;
  std::array<int, 3> counts{};
  int total = 0;
  for (const Sample& s : generate_synthetic_dataset(c)) {
    for (const Annotation& a : s.annotations) {
      ++counts[a.category];
      ++total;
    }
  }
  for (int n : counts) {
    EXPECT_NEAR(n, total / 3.0, 0.1 * total / 3.0);
  }
}

TEST(SyntheticData, RejectsBadConfig) {
  SyntheticConfig c;
  c.categories = 4;
  EXPECT_THROW(generate_synthetic_dataset(c), ConfigError);
  c = SyntheticConfig{};
  c.min_objects = 3;
  c.max_objects = 1;
  EXPECT_THROW(generate_synthetic_dataset(c), ConfigError);
}

TEST(SyntheticData, ManifestRoundTrip) {
  SyntheticConfig c;
  c.count = 4;
  const auto samples = generate_synthetic_dataset(c);
  const auto dir = scratch_dir("manifest");
  write_dataset(dir, "test.jsonl", samples);
  const auto back = read_dataset(dir / "test.jsonl");
  ASSERT_EQ(back.size(), samples.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, samples[i].id);
    EXPECT_EQ(back[i].image, samples[i].image);
    ASSERT_EQ(back[i].annotations.size(), samples[i].annotations.size());
    for (std::size_t j = 0; j < back[i].annotations.size(); ++j) {
      EXPECT_EQ(back[i].annotations[j].category, samples[i].annotations[j].category);
      EXPECT_DOUBLE_EQ(back[i].annotations[j].box.cx, samples[i].annotations[j].box.cx);
      EXPECT_DOUBLE_EQ(back[i].annotations[j].box.w, samples[i].annotations[j].box.w);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(SyntheticData, MissingManifestIsIoError) {
  EXPECT_THROW(read_dataset(scratch_dir("missing") / "none.jsonl"), IoError);
}

}  // namespace
}  // namespace catattack
