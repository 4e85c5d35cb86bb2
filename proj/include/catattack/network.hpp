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

#ifndef CATATTACK_NETWORK_HPP_
#define CATATTACK_NETWORK_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace catattack {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ConvSpec {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  int stride = 1;
  int dilation = 1;

  int padding() const { return dilation * (kernel - 1) / 2; }
  int output_extent(int input_extent) const {
    return (input_extent + 2 * padding() - dilation * (kernel - 1) - 1) /
               stride +
           1;
  }
};

// Convolution as im2col + GEMM. Activations are (channels x height*width)
// row-major matrices.
struct Conv2d {
  ConvSpec spec;
  RowMatrix weight;        // out x (in * k * k)
  Eigen::VectorXd bias;    // out

  explicit Conv2d(ConvSpec s);
};

RowMatrix im2col(const RowMatrix& input, int height, int width,
                 const ConvSpec& spec);
RowMatrix col2im(const RowMatrix& columns, int height, int width,
                 const ConvSpec& spec);

struct ActivationOffset {
  int layer = 0;
  std::size_t index = 0;
  double delta = 0.0;
};

struct LayerCache {
  int in_height = 0;
  int in_width = 0;
  int out_height = 0;
  int out_width = 0;
  RowMatrix columns;
  RowMatrix pre;  // pre-activation
  RowMatrix out;  // post-activation (backbone) or raw output (head)
};

struct ForwardState {
  std::vector<LayerCache> layers;
  const RowMatrix& head() const { return layers.back().out; }
};

struct ParamGrads {
  std::vector<RowMatrix> weight;
  std::vector<Eigen::VectorXd> bias;
  void zero_like(const std::vector<Conv2d>& layers);
};

// ReLU backbone of `backbone_layers` conv blocks followed by one linear conv
// head. Pure computation; holds weights only.
class NetworkCore {
 public:
  NetworkCore() = default;
  NetworkCore(std::vector<ConvSpec> specs, int backbone_layers);

  int backbone_layers() const { return backbone_layers_; }
  const std::vector<Conv2d>& layers() const { return layers_; }
  std::vector<Conv2d>& layers() { return layers_; }

  ForwardState forward(const RowMatrix& input, int height, int width,
                       std::optional<ActivationOffset> offset = {}) const;

  // Backpropagates d(objective)/d(head output). Fills activation gradients
  // for every backbone layer (post-activation), the input gradient when
  // requested, and parameter gradients when `grads` is non-null.
  struct Backward {
    std::vector<RowMatrix> activation;
    RowMatrix input;
  };
  Backward backward(const ForwardState& state, const RowMatrix& d_head,
                    bool need_input, int stop_layer = 0,
                    ParamGrads* grads = nullptr) const;

  void init_he(std::mt19937_64& rng);

 private:
  std::vector<Conv2d> layers_;
  int backbone_layers_ = 0;
};

}  // namespace catattack

#endif  // CATATTACK_NETWORK_HPP_
