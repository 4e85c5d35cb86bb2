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

#include "catattack/network.hpp"

#include <cmath>

#include "catattack/errors.hpp"

namespace catattack {

Conv2d::Conv2d(ConvSpec s)
    : spec(s),
      weight(RowMatrix::Zero(s.out_channels,
                             s.in_channels * s.kernel * s.kernel)),
      bias(Eigen::VectorXd::Zero(s.out_channels)) {}

RowMatrix im2col(const RowMatrix& input, int height, int width,
                 const ConvSpec& spec) {
  const int k = spec.kernel;
  const int pad = spec.padding();
  const int out_h = spec.output_extent(height);
  const int out_w = spec.output_extent(width);
  RowMatrix cols = RowMatrix::Zero(spec.in_channels * k * k, out_h * out_w);
  for (int c = 0; c < spec.in_channels; ++c) {
    const double* plane = input.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        double* dst = cols.row((c * k + ky) * k + kx).data();
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * spec.stride - pad + ky * spec.dilation;
          if (iy < 0 || iy >= height) continue;
          const double* src_row = plane + static_cast<std::size_t>(iy) * width;
          double* dst_row = dst + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * spec.stride - pad + kx * spec.dilation;
            if (ix >= 0 && ix < width) dst_row[ox] = src_row[ix];
          }
        }
      }
    }
  }
  return cols;
}

RowMatrix col2im(const RowMatrix& columns, int height, int width,
                 const ConvSpec& spec) {
  const int k = spec.kernel;
  const int pad = spec.padding();
  const int out_h = spec.output_extent(height);
  const int out_w = spec.output_extent(width);
  RowMatrix image = RowMatrix::Zero(spec.in_channels, height * width);
  for (int c = 0; c < spec.in_channels; ++c) {
    double* plane = image.row(c).data();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const double* src = columns.row((c * k + ky) * k + kx).data();
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * spec.stride - pad + ky * spec.dilation;
          if (iy < 0 || iy >= height) continue;
          double* dst_row = plane + static_cast<std::size_t>(iy) * width;
          const double* src_row = src + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * spec.stride - pad + kx * spec.dilation;
            if (ix >= 0 && ix < width) dst_row[ix] += src_row[ox];
          }
        }
      }
    }
  }
  return image;
}

void ParamGrads::zero_like(const std::vector<Conv2d>& layers) {
  weight.clear();
  bias.clear();
  for (const Conv2d& l : layers) {
    weight.push_back(RowMatrix::Zero(l.weight.rows(), l.weight.cols()));
    bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
}

NetworkCore::NetworkCore(std::vector<ConvSpec> specs, int backbone_layers)
    : backbone_layers_(backbone_layers) {
  if (backbone_layers < 0 ||
      backbone_layers >= static_cast<int>(specs.size())) {
    throw ConfigError("network needs at least one head layer");
  }
  for (const ConvSpec& s : specs) layers_.emplace_back(s);
}

void NetworkCore::init_he(std::mt19937_64& rng) {
  for (Conv2d& l : layers_) {
    const double fan_in = static_cast<double>(l.weight.cols());
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) {
      l.weight.data()[i] = dist(rng);
    }
    l.bias.setZero();
  }
}

ForwardState NetworkCore::forward(const RowMatrix& input, int height,
                                  int width,
                                  std::optional<ActivationOffset> offset) const {
  ForwardState state;
  state.layers.resize(layers_.size());
  const RowMatrix* current = &input;
  int h = height;
  int w = width;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Conv2d& layer = layers_[i];
    LayerCache& cache = state.layers[i];
    cache.in_height = h;
    cache.in_width = w;
    cache.out_height = layer.spec.output_extent(h);
    cache.out_width = layer.spec.output_extent(w);
    cache.columns = im2col(*current, h, w, layer.spec);
    cache.pre.noalias() = layer.weight * cache.columns;
    cache.pre.colwise() += layer.bias;
    if (static_cast<int>(i) < backbone_layers_) {
      cache.out = cache.pre.cwiseMax(0.0);
      if (offset && offset->layer == static_cast<int>(i)) {
        cache.out.data()[offset->index] += offset->delta;
      }
    } else {
      cache.out = cache.pre;
    }
    current = &cache.out;
    h = cache.out_height;
    w = cache.out_width;
  }
  return state;
}

NetworkCore::Backward NetworkCore::backward(const ForwardState& state,
                                            const RowMatrix& d_head,
                                            bool need_input, int stop_layer,
                                            ParamGrads* grads) const {
  Backward result;
  result.activation.resize(backbone_layers_);
  RowMatrix d_out = d_head;
  const int lowest = need_input ? 0 : stop_layer;
  for (int i = static_cast<int>(layers_.size()) - 1; i >= lowest; --i) {
    const Conv2d& layer = layers_[i];
    const LayerCache& cache = state.layers[i];
    RowMatrix d_pre;
    if (i < backbone_layers_) {
      result.activation[i] = d_out;
      d_pre = (cache.pre.array() > 0.0).select(d_out, 0.0);
    } else {
      d_pre = std::move(d_out);
    }
    if (grads != nullptr) {
      grads->weight[i].noalias() += d_pre * cache.columns.transpose();
      grads->bias[i] += d_pre.rowwise().sum();
    }
    if (i == 0 && !need_input) break;
    if (i == lowest && i > 0 && !need_input) break;
    RowMatrix d_cols = layer.weight.transpose() * d_pre;
    d_out = col2im(d_cols, cache.in_height, cache.in_width, layer.spec);
  }
  if (need_input) result.input = std::move(d_out);
  return result;
}

}  // namespace catattack
