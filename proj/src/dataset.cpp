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

#include "catattack/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"

#include "catattack/errors.hpp"
#include "catattack/image_io.hpp"

namespace catattack {
namespace {

using Color = std::array<double, 3>;

bool inside_shape(ShapeKind kind, const Box& box, double px, double py) {
  const double dx = px - box.cx;
  const double dy = py - box.cy;
  const double half = box.w / 2;
  switch (kind) {
    case ShapeKind::kCircle:
      return dx * dx + dy * dy <= half * half;
    case ShapeKind::kSquare:
      return std::abs(dx) <= half && std::abs(dy) <= half;
    case ShapeKind::kTriangle: {
      // Apex at top centre, base along the bottom edge.
      if (dy < -half || dy > half) return false;
      const double t = (dy + half) / box.h;  // 0 at apex, 1 at base
      return std::abs(dx) <= t * half;
    }
  }
  return false;
}

double color_distance(const Color& a, const Color& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

Sample make_sample(const SyntheticConfig& config, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> channel(0, 255);
  std::uniform_int_distribution<int> object_count(config.min_objects,
                                                  config.max_objects);
  std::uniform_int_distribution<int> category(0, config.categories - 1);
  std::uniform_int_distribution<int> object_size(config.min_object_size,
                                                 config.max_object_size);
  std::normal_distribution<double> noise(0.0, config.noise_sigma);

  const int n = config.image_size;
  Sample sample;
  char id[32];
  std::snprintf(id, sizeof(id), "%06d", index);
  sample.id = id;

  const Color background{double(channel(rng)), double(channel(rng)),
                         double(channel(rng))};
  sample.image = Tensor3(3, n, n);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) sample.image.at(c, y, x) = background[c];
    }
  }

  const int wanted = object_count(rng);
  for (int obj = 0; obj < wanted; ++obj) {
    const int cat = category(rng);
    const int size = object_size(rng);
    Box box;
    bool placed = false;
    for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
      const double half = size / 2.0;
      box = Box{half + unit(rng) * (n - size), half + unit(rng) * (n - size),
                double(size), double(size)};
      placed = std::none_of(
          sample.annotations.begin(), sample.annotations.end(),
          [&](const Annotation& a) { return iou(a.box, box) > 0.0; });
    }
    if (!placed) continue;
    Color fill;
    do {
      fill = {double(channel(rng)), double(channel(rng)), double(channel(rng))};
    } while (color_distance(fill, background) < 150.0);
    const auto kind = static_cast<ShapeKind>(cat);
    const int x0 = static_cast<int>(std::floor(box.cx - box.w / 2));
    const int y0 = static_cast<int>(std::floor(box.cy - box.h / 2));
    for (int y = std::max(0, y0); y <= std::min(n - 1, y0 + size); ++y) {
      for (int x = std::max(0, x0); x <= std::min(n - 1, x0 + size); ++x) {
        if (!inside_shape(kind, box, x + 0.5, y + 0.5)) continue;
        for (int c = 0; c < 3; ++c) sample.image.at(c, y, x) = fill[c];
      }
    }
    sample.annotations.push_back({cat, box});
  }

  for (double& v : sample.image.values()) {
    v = std::clamp(std::round(v + noise(rng)), kPixelMin, kPixelMax);
  }
  return sample;
}

}  // namespace

const char* shape_name(int category) {
  switch (category) {
    case 0: return "circle";
    case 1: return "square";
    case 2: return "triangle";
    default: return "unknown";
  }
}

std::vector<Sample> generate_synthetic_dataset(const SyntheticConfig& config) {
  if (config.categories < 1 || config.categories > kMaxShapeKinds) {
    throw ConfigError("synthetic dataset supports 1 to 3 categories");
  }
  if (config.min_objects < 0 || config.max_objects < config.min_objects) {
    throw ConfigError("invalid object count range");
  }
  if (config.min_object_size < 4 ||
      config.max_object_size < config.min_object_size ||
      config.max_object_size >= config.image_size) {
    throw ConfigError("invalid object size range");
  }
  std::vector<Sample> samples;
  samples.reserve(std::max(0, config.count));
  for (int i = 0; i < config.count; ++i) {
    samples.push_back(make_sample(config, config.first_index + i));
  }
  return samples;
}

void write_dataset(const std::filesystem::path& dir,
                   const std::string& manifest_name,
                   const std::vector<Sample>& samples) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "images", ec);
  if (ec) throw IoError("cannot create " + (dir / "images").string());
  std::ofstream manifest(dir / manifest_name);
  if (!manifest) throw IoError("cannot write " + (dir / manifest_name).string());
  for (const Sample& s : samples) {
    const std::string rel = "images/" + s.id + ".png";
    write_png(dir / rel, s.image);
    nlohmann::json objects = nlohmann::json::array();
    for (const Annotation& a : s.annotations) {
      objects.push_back({{"category", a.category},
                         {"box", {a.box.cx, a.box.cy, a.box.w, a.box.h}}});
    }
    manifest << nlohmann::json{{"id", s.id}, {"image", rel}, {"objects", objects}}
                    .dump()
             << '\n';
  }
  if (!manifest) throw IoError("failed writing manifest");
}

std::vector<Sample> read_dataset(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  const std::filesystem::path root = manifest.parent_path();
  std::vector<Sample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json rec = nlohmann::json::parse(line);
    Sample s;
    s.id = rec.at("id").get<std::string>();
    s.image = read_png(root / rec.at("image").get<std::string>());
    for (const auto& o : rec.at("objects")) {
      const auto b = o.at("box");
      s.annotations.push_back(
          {o.at("category").get<int>(),
           Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
               b[3].get<double>()}});
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace catattack
