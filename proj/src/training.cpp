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

#include "catattack/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "catattack/errors.hpp"

namespace catattack {
namespace {

struct Targets {
  RowMatrix heatmap;  // k x P
  std::vector<Eigen::Index> centers;
  std::vector<std::array<double, 4>> regression;  // w, h, dx, dy
};

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

Targets build_targets(const Sample& sample, int categories, int out_h,
                      int out_w, int stride) {
  Targets t;
  t.heatmap = RowMatrix::Zero(categories, out_h * out_w);
  for (const Annotation& a : sample.annotations) {
    const double cx = a.box.cx / stride;
    const double cy = a.box.cy / stride;
    const double bw = a.box.w / stride;
    const double bh = a.box.h / stride;
    const int ix = std::clamp(static_cast<int>(std::floor(cx)), 0, out_w - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(cy)), 0, out_h - 1);
    const int radius =
        std::max(0, static_cast<int>(gaussian_radius(bh, bw)));
    const double sigma = (2 * radius + 1) / 6.0;
    for (int y = std::max(0, iy - radius); y <= std::min(out_h - 1, iy + radius);
         ++y) {
      for (int x = std::max(0, ix - radius);
           x <= std::min(out_w - 1, ix + radius); ++x) {
        const double d2 = double(x - ix) * (x - ix) + double(y - iy) * (y - iy);
        const double g = std::exp(-d2 / (2 * sigma * sigma));
        double& v = t.heatmap(a.category, static_cast<Eigen::Index>(y) * out_w + x);
        v = std::max(v, g);
      }
    }
    t.centers.push_back(static_cast<Eigen::Index>(iy) * out_w + ix);
    t.regression.push_back({bw, bh, cx - ix, cy - iy});
  }
  return t;
}

struct Adam {
  std::vector<RowMatrix> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step = 0;

  explicit Adam(const std::vector<Conv2d>& layers) {
    for (const Conv2d& l : layers) {
      m_w.push_back(RowMatrix::Zero(l.weight.rows(), l.weight.cols()));
      v_w.push_back(RowMatrix::Zero(l.weight.rows(), l.weight.cols()));
      m_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
      v_b.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
  }

  void apply(std::vector<Conv2d>& layers, const ParamGrads& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++step;
    const double c1 = 1.0 - std::pow(b1, double(step));
    const double c2 = 1.0 - std::pow(b2, double(step));
    for (std::size_t i = 0; i < layers.size(); ++i) {
      m_w[i] = b1 * m_w[i] + (1 - b1) * g.weight[i];
      v_w[i] = b2 * v_w[i] + (1 - b2) * g.weight[i].cwiseAbs2();
      layers[i].weight.array() -=
          lr * (m_w[i].array() / c1) / ((v_w[i].array() / c2).sqrt() + eps);
      m_b[i] = b1 * m_b[i] + (1 - b1) * g.bias[i];
      v_b[i] = b2 * v_b[i] + (1 - b2) * g.bias[i].cwiseAbs2();
      layers[i].bias.array() -=
          lr * (m_b[i].array() / c1) / ((v_b[i].array() / c2).sqrt() + eps);
    }
  }
};

}  // namespace

double gaussian_radius(double height, double width, double min_overlap) {
  const double a1 = 1;
  const double b1 = height + width;
  const double c1 = width * height * (1 - min_overlap) / (1 + min_overlap);
  const double r1 = (b1 + std::sqrt(b1 * b1 - 4 * a1 * c1)) / 2;

  const double a2 = 4;
  const double b2 = 2 * (height + width);
  const double c2 = (1 - min_overlap) * width * height;
  const double r2 = (b2 + std::sqrt(b2 * b2 - 4 * a2 * c2)) / 2;

  const double a3 = 4 * min_overlap;
  const double b3 = -2 * min_overlap * (height + width);
  const double c3 = (min_overlap - 1) * width * height;
  const double r3 = (b3 + std::sqrt(b3 * b3 - 4 * a3 * c3)) / 2;
  return std::min({r1, r2, r3});
}

TrainResult train_toy_detector(const std::vector<Sample>& dataset,
                               const ToyDetectorConfig& detector_config,
                               const TrainConfig& config) {
  if (dataset.empty()) throw ConfigError("training dataset is empty");
  if (config.epochs < 1 || config.batch_size < 1) {
    throw ConfigError("epochs and batch size must be positive");
  }
  ToyDetectorConfig net_config = detector_config;
  net_config.seed = config.seed;
  TrainResult result{ToyCenterNet(net_config), {}};
  ToyCenterNet& net = result.detector;
  NetworkCore& core = net.core();
  const int k = net_config.categories;
  const int n = net_config.input_size;
  const int stride = ToyCenterNet::kOutputStride;
  const int out = n / stride;

  std::vector<Targets> targets;
  targets.reserve(dataset.size());
  for (const Sample& s : dataset) {
    if (!(s.image.shape() == net.input_shape())) {
      throw ConfigError("training image " + s.id + " has the wrong shape");
    }
    targets.push_back(build_targets(s, k, out, out, stride));
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Adam adam(core.layers());
  ParamGrads grads;
  const double alpha = config.focal_alpha;
  const double beta = config.focal_beta;
  const long total_steps =
      long(config.epochs) *
      long((dataset.size() + config.batch_size - 1) / config.batch_size);
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLog log;
    log.epoch = epoch + 1;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + std::size_t(config.batch_size));
      grads.zero_like(core.layers());
      double batch_objects = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        batch_objects += double(targets[order[b]].centers.size());
      }
      const double norm = std::max(1.0, batch_objects);
      for (std::size_t b = start; b < end; ++b) {
        const Sample& sample = dataset[order[b]];
        const Targets& tgt = targets[order[b]];
        const ForwardState state =
            core.forward(ToyCenterNet::preprocess(sample.image), n, n);
        const RowMatrix& head = state.head();
        RowMatrix d_head = RowMatrix::Zero(head.rows(), head.cols());
        for (int c = 0; c < k; ++c) {
          for (Eigen::Index p = 0; p < head.cols(); ++p) {
            const double z = head(c, p);
            const double prob = 1.0 / (1.0 + std::exp(-z));
            const double log_p = -softplus(-z);
            const double log_q = -softplus(z);
            const double y = tgt.heatmap(c, p);
            if (y == 1.0) {
              const double q = 1.0 - prob;
              log.heatmap_loss += -std::pow(q, alpha) * log_p / norm;
              d_head(c, p) =
                  (alpha * std::pow(q, alpha) * prob * log_p -
                   std::pow(q, alpha + 1)) /
                  norm;
            } else {
              const double wneg = std::pow(1.0 - y, beta);
              log.heatmap_loss += -wneg * std::pow(prob, alpha) * log_q / norm;
              d_head(c, p) = -wneg *
                             (alpha * std::pow(prob, alpha) * (1.0 - prob) *
                                  log_q -
                              std::pow(prob, alpha + 1)) /
                             norm;
            }
          }
        }
        for (std::size_t o = 0; o < tgt.centers.size(); ++o) {
          const Eigen::Index p = tgt.centers[o];
          for (int r = 0; r < 4; ++r) {
            const double w = r < 2 ? config.size_weight : config.offset_weight;
            const double diff = head(k + r, p) - tgt.regression[o][r];
            (r < 2 ? log.size_loss : log.offset_loss) += std::abs(diff) / norm;
            d_head(k + r, p) += w * (diff > 0 ? 1.0 : diff < 0 ? -1.0 : 0.0) / norm;
          }
        }
        core.backward(state, d_head, false, 0, &grads);
      }
      // Cosine decay to 5% of the base rate.
      const double progress = double(step) / double(std::max(1L, total_steps));
      const double lr = config.learning_rate *
                        (0.05 + 0.95 * 0.5 * (1 + std::cos(M_PI * progress)));
      adam.apply(core.layers(), grads, lr);
      log.learning_rate = lr;
      ++step;
    }
    const double batches = std::ceil(double(order.size()) / config.batch_size);
    log.heatmap_loss /= batches;
    log.size_loss /= batches;
    log.offset_loss /= batches;
    log.loss = log.heatmap_loss + config.size_weight * log.size_loss +
               config.offset_weight * log.offset_loss;
    if (!std::isfinite(log.loss)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << log.epoch
          << ": heatmap=" << log.heatmap_loss << " size=" << log.size_loss
          << " offset=" << log.offset_loss << " lr=" << log.learning_rate;
      throw TrainingError(msg.str());
    }
    result.log.push_back(log);
    if (config.on_epoch) config.on_epoch(log);
  }
  return result;
}

}  // namespace catattack
