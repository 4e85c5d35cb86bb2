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

#include "catattack/toy_detector.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "catattack/decode.hpp"
#include "catattack/errors.hpp"

namespace catattack {
namespace {

constexpr const char* kCheckpointMagic = "CATATTACK-CHECKPOINT";
constexpr int kCheckpointVersion = 1;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<ConvSpec> make_specs(const ToyDetectorConfig& config) {
  const int c = config.backbone_width();
  return {
      {config.channels, c, 3, 2, 1},
      {c, c, 3, 2, 1},
      {c, c, 3, 1, 2},
      {c, c, 3, 1, 2},
      {c, config.categories + 4, 3, 1, 1},
  };
}

Tensor3 to_tensor(const RowMatrix& m, int height, int width) {
  Tensor3 t(static_cast<int>(m.rows()), height, width);
  std::memcpy(t.data(), m.data(), sizeof(double) * t.size());
  return t;
}

}  // namespace

int ToyDetectorConfig::backbone_width() const {
  if (variant == "small") return 16;
  if (variant == "wide") return 24;
  throw ConfigError("unknown detector variant '" + variant + "'");
}

ToyCenterNet::ToyCenterNet(ToyDetectorConfig config)
    : config_(std::move(config)),
      core_(make_specs(config_), kBackboneLayers) {
  if (config_.input_size % kOutputStride != 0) {
    throw ConfigError("input size must be a multiple of the output stride");
  }
  std::mt19937_64 rng(config_.seed);
  core_.init_he(rng);
  Conv2d& head = core_.layers().back();
  head.weight *= 0.1;
  for (int c = 0; c < config_.categories; ++c) head.bias(c) = kHeatmapBiasInit;
}

ToyCenterNet::ToyCenterNet(ToyDetectorConfig config, NetworkCore core)
    : config_(std::move(config)), core_(std::move(core)) {}

ToyCenterNet ToyCenterNet::with_zero_head(ToyDetectorConfig config) {
  ToyCenterNet net(std::move(config));
  Conv2d& head = net.core_.layers().back();
  head.weight.setZero();
  head.bias.setZero();
  return net;
}

Shape3 ToyCenterNet::input_shape() const {
  return {config_.channels, config_.input_size, config_.input_size};
}

RowMatrix ToyCenterNet::preprocess(const Tensor3& image) {
  RowMatrix m(image.channels(),
              static_cast<Eigen::Index>(image.height()) * image.width());
  for (std::size_t i = 0; i < image.size(); ++i) {
    m.data()[i] = (image[i] - 127.5) * kInputScale;
  }
  return m;
}

HeatmapStack ToyCenterNet::heatmaps_from(const ForwardState& state) const {
  const LayerCache& head = state.layers.back();
  HeatmapStack hm(config_.categories, head.out_height, head.out_width,
                  kOutputStride);
  double* dst = hm.scores().data();
  const std::size_t plane =
      static_cast<std::size_t>(head.out_height) * head.out_width;
  for (int c = 0; c < config_.categories; ++c) {
    const double* src = head.out.row(c).data();
    for (std::size_t p = 0; p < plane; ++p) dst[c * plane + p] = sigmoid(src[p]);
  }
  return hm;
}

HeatmapStack ToyCenterNet::infer_heatmaps(const Tensor3& image) const {
  validate_image(*this, image);
  const ForwardState state =
      core_.forward(preprocess(image), image.height(), image.width());
  return heatmaps_from(state);
}

DetectorOutput ToyCenterNet::infer(const Tensor3& image) const {
  validate_image(*this, image);
  const ForwardState state =
      core_.forward(preprocess(image), image.height(), image.width());
  const LayerCache& head = state.layers.back();
  DetectorOutput out;
  out.heatmaps = heatmaps_from(state);
  const int k = config_.categories;
  out.size = to_tensor(head.out.middleRows(k, 2), head.out_height,
                       head.out_width);
  out.offset = to_tensor(head.out.middleRows(k + 2, 2), head.out_height,
                         head.out_width);
  return out;
}

std::vector<Detection> ToyCenterNet::detect(const Tensor3& image,
                                            double threshold) const {
  const DetectorOutput out = infer(image);
  return decode_detections(out.heatmaps, out.size, out.offset, threshold);
}

std::vector<Tensor3> ToyCenterNet::input_gradients(
    const Tensor3& image, std::span<const Objective> objectives,
    TermKind kind) const {
  validate_image(*this, image);
  const ForwardState state =
      core_.forward(preprocess(image), image.height(), image.width());
  const LayerCache& head = state.layers.back();
  std::vector<Tensor3> grads;
  grads.reserve(objectives.size());
  for (const Objective& objective : objectives) {
    if (objective.empty()) {
      grads.emplace_back(image.shape());
      continue;
    }
    RowMatrix d_head = RowMatrix::Zero(head.out.rows(), head.out.cols());
    for (const ScoreTerm& t : objective) {
      const Eigen::Index p =
          static_cast<Eigen::Index>(t.pixel.row) * head.out_width + t.pixel.col;
      const double f = sigmoid(head.out(t.category, p));
      // d f / dz = f (1 - f); d(-log f) / dz = -(1 - f).
      d_head(t.category, p) += kind == TermKind::kScore
                                   ? t.weight * f * (1.0 - f)
                                   : -t.weight * (1.0 - f);
    }
    NetworkCore::Backward back = core_.backward(state, d_head, true);
    Tensor3 g = to_tensor(back.input, image.height(), image.width());
    g *= kInputScale;
    grads.push_back(std::move(g));
  }
  return grads;
}

std::vector<std::string> ToyCenterNet::feature_layers() const {
  return {"block1", "block2", "block3", "block4"};
}

int ToyCenterNet::layer_index(const std::string& layer_id) const {
  const auto layers = feature_layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i] == layer_id) return static_cast<int>(i);
  }
  throw ConfigError("unknown feature layer '" + layer_id + "'");
}

FeatureActivation ToyCenterNet::feature_gradient(
    const Tensor3& image, const Objective& objective,
    const std::string& layer_id) const {
  validate_image(*this, image);
  const int index = layer_index(layer_id);
  const ForwardState state =
      core_.forward(preprocess(image), image.height(), image.width());
  const LayerCache& head = state.layers.back();
  const LayerCache& layer = state.layers[index];
  RowMatrix d_head = RowMatrix::Zero(head.out.rows(), head.out.cols());
  for (const ScoreTerm& t : objective) {
    const Eigen::Index p =
        static_cast<Eigen::Index>(t.pixel.row) * head.out_width + t.pixel.col;
    const double f = sigmoid(head.out(t.category, p));
    d_head(t.category, p) += t.weight * f * (1.0 - f);
  }
  NetworkCore::Backward back = core_.backward(state, d_head, false, index);
  return {layer_id,
          to_tensor(back.activation[index], layer.out_height, layer.out_width)};
}

FeatureActivation ToyCenterNet::feature_activation(
    const Tensor3& image, const std::string& layer_id) const {
  validate_image(*this, image);
  const int index = layer_index(layer_id);
  const ForwardState state =
      core_.forward(preprocess(image), image.height(), image.width());
  const LayerCache& layer = state.layers[index];
  return {layer_id, to_tensor(layer.out, layer.out_height, layer.out_width)};
}

HeatmapStack ToyCenterNet::infer_heatmaps_with_activation_offset(
    const Tensor3& image, const std::string& layer_id, std::size_t index,
    double delta) const {
  validate_image(*this, image);
  const ActivationOffset offset{layer_index(layer_id), index, delta};
  const ForwardState state = core_.forward(
      preprocess(image), image.height(), image.width(), offset);
  return heatmaps_from(state);
}

std::uint64_t ToyCenterNet::weights_hash() const {
  std::vector<double> all;
  for (const Conv2d& l : core_.layers()) {
    all.insert(all.end(), l.weight.data(), l.weight.data() + l.weight.size());
    all.insert(all.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return content_hash(all);
}

void ToyCenterNet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  nlohmann::json header = {
      {"magic", kCheckpointMagic},
      {"version", kCheckpointVersion},
      {"variant", config_.variant},
      {"categories", config_.categories},
      {"input_size", config_.input_size},
      {"channels", config_.channels},
      {"seed", config_.seed},
      {"layers", core_.layers().size()},
  };
  out << header.dump() << '\n';
  for (const Conv2d& l : core_.layers()) {
    out.write(reinterpret_cast<const char*>(l.weight.data()),
              static_cast<std::streamsize>(sizeof(double) * l.weight.size()));
    out.write(reinterpret_cast<const char*>(l.bias.data()),
              static_cast<std::streamsize>(sizeof(double) * l.bias.size()));
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ToyCenterNet ToyCenterNet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw IoError("checkpoint header is not valid: " + path.string());
  }
  if (header.value("magic", "") != kCheckpointMagic) {
    throw IoError("not a catattack checkpoint: " + path.string());
  }
  if (header.value("version", 0) != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version in " + path.string());
  }
  ToyDetectorConfig config;
  config.variant = header.at("variant").get<std::string>();
  config.categories = header.at("categories").get<int>();
  config.input_size = header.at("input_size").get<int>();
  config.channels = header.at("channels").get<int>();
  config.seed = header.at("seed").get<std::uint64_t>();
  NetworkCore core(make_specs(config), kBackboneLayers);
  if (header.at("layers").get<std::size_t>() != core.layers().size()) {
    throw IoError("checkpoint layer count mismatch in " + path.string());
  }
  for (Conv2d& l : core.layers()) {
    in.read(reinterpret_cast<char*>(l.weight.data()),
            static_cast<std::streamsize>(sizeof(double) * l.weight.size()));
    in.read(reinterpret_cast<char*>(l.bias.data()),
            static_cast<std::streamsize>(sizeof(double) * l.bias.size()));
  }
  if (!in) throw IoError("truncated checkpoint " + path.string());
  return ToyCenterNet(std::move(config), std::move(core));
}

}  // namespace catattack
