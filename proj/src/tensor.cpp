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

#include "catattack/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "catattack/errors.hpp"

namespace catattack {
namespace {

void require_same_shape(const Tensor3& a, const Tensor3& b) {
  if (!(a.shape() == b.shape())) {
    throw InputError("tensor shape mismatch");
  }
}

}  // namespace

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

Tensor3 operator+(Tensor3 lhs, const Tensor3& rhs) { return lhs += rhs; }
Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs) { return lhs -= rhs; }
Tensor3 operator*(Tensor3 lhs, double scale) { return lhs *= scale; }

double dot(const Tensor3& a, const Tensor3& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(const Tensor3& t) { return std::sqrt(dot(t, t)); }

double linf_norm(const Tensor3& t) {
  double m = 0.0;
  for (double v : t.values()) m = std::max(m, std::abs(v));
  return m;
}

void clamp_inplace(Tensor3& t, double lo, double hi) {
  for (double& v : t.values()) v = std::clamp(v, lo, hi);
}

std::uint64_t content_hash(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace catattack
