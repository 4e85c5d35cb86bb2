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

#ifndef CATATTACK_TENSOR_HPP_
#define CATATTACK_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace catattack {

inline constexpr double kPixelMin = 0.0;
inline constexpr double kPixelMax = 255.0;

struct Shape3 {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * height * width;
  }
  bool operator==(const Shape3&) const = default;
};

// Dense channel-major (CHW) array of doubles. Images use the [0, 255] pixel
// scale; gradients and perturbations share the layout.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Shape3 shape, double fill = 0.0)
      : shape_(shape), data_(shape.size(), fill) {}
  Tensor3(int channels, int height, int width, double fill = 0.0)
      : Tensor3(Shape3{channels, height, width}, fill) {}

  const Shape3& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x;
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double scale);

  bool operator==(const Tensor3& other) const = default;

 private:
  Shape3 shape_;
  std::vector<double> data_;
};

Tensor3 operator+(Tensor3 lhs, const Tensor3& rhs);
Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs);
Tensor3 operator*(Tensor3 lhs, double scale);

double dot(const Tensor3& a, const Tensor3& b);
double l2_norm(const Tensor3& t);
double linf_norm(const Tensor3& t);

// Clamps every value into [lo, hi] in place.
void clamp_inplace(Tensor3& t, double lo = kPixelMin, double hi = kPixelMax);

// FNV-1a over the raw bytes; stable across runs on the same platform.
std::uint64_t content_hash(std::span<const double> values);

}  // namespace catattack

#endif  // CATATTACK_TENSOR_HPP_
