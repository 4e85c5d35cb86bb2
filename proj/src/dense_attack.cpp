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

#include "catattack/dense_attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "catattack/errors.hpp"
#include "catattack/metrics.hpp"

namespace catattack {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double sign(double v) { return v > 0 ? 1.0 : v < 0 ? -1.0 : 0.0; }

}  // namespace

const char* variant_name(DenseVariant v) {
  switch (v) {
    case DenseVariant::kGlobal: return "dca-g";
    case DenseVariant::kLocal: return "dca-l";
    case DenseVariant::kSemantic: return "dca-s";
  }
  return "dca";
}

std::size_t AttackMask::count() const {
  return static_cast<std::size_t>(
      std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

double AttackMask::coverage() const {
  return values_.empty() ? 0.0 : double(count()) / double(values_.size());
}

void AttackMask::apply(Tensor3& t) const {
  if (t.height() != height_ || t.width() != width_) {
    throw InputError("mask and tensor differ in spatial size");
  }
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        if (at(y, x) == 0) t.at(c, y, x) = 0.0;
      }
    }
  }
}

Tensor3 AttackMask::to_image() const {
  Tensor3 img(1, height_, width_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) img.at(0, y, x) = at(y, x) ? 255.0 : 0.0;
  }
  return img;
}

void DenseAttackConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("attacking threshold must lie in (0, 1)");
  }
  if (r_star < 1) throw ConfigError("R* must be at least 1");
  if (t_s < 0.0 || t_s > 1.0) throw ConfigError("T_s must lie in [0, 1]");
  if (!(pixel_max > pixel_min)) throw ConfigError("invalid pixel range");
}

CategoryGradient category_gradient(const DetectorOracle& oracle,
                                   const Tensor3& x, int category,
                                   std::span<const HeatmapCoord> pixels) {
  CategoryGradient out{grad_loss_sum(oracle, x, category, pixels), false};
  const double m = linf_norm(out.gradient);
  if (!(m > 0.0) || !std::isfinite(m)) {
    out.gradient = Tensor3(x.shape());
    out.degenerate = true;
    return out;
  }
  out.gradient *= 1.0 / m;
  return out;
}

Tensor3 global_perturbation(const Tensor3& total_gradient, double epsilon,
                            int max_iter) {
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  const double step = epsilon / max_iter;
  Tensor3 gp(total_gradient.shape());
  for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = step * sign(total_gradient[i]);
  return gp;
}

AttackMask generate_local_mask(const CategoryTargetSets& sets, int height,
                               int width, int output_stride, int r_star) {
  if (r_star < 1) throw InputError("R* must be at least 1");
  AttackMask mask(height, width);
  const int below = (r_star - 1) / 2;
  for (const auto& [category, pixels] : sets.sets()) {
    for (const TargetPixel& p : pixels) {
      const int cy = p.coord.row * output_stride;
      const int cx = p.coord.col * output_stride;
      const int y0 = std::max(0, cy - below);
      const int y1 = std::min(height - 1, cy - below + r_star - 1);
      const int x0 = std::max(0, cx - below);
      const int x1 = std::min(width - 1, cx - below + r_star - 1);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) mask.set(y, x, 1);
      }
    }
  }
  return mask;
}

Tensor3 upsample_bilinear(const Tensor3& map, int height, int width) {
  if (map.channels() != 1) throw InputError("upsample expects one channel");
  Tensor3 out(1, height, width);
  const double sy = double(map.height()) / height;
  const double sx = double(map.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(map.height() - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, map.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(map.width() - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, map.width() - 1);
      const double wx = fx - x0;
      out.at(0, y, x) =
          (1 - wy) * ((1 - wx) * map.at(0, y0, x0) + wx * map.at(0, y0, x1)) +
          wy * ((1 - wx) * map.at(0, y1, x0) + wx * map.at(0, y1, x1));
    }
  }
  return out;
}

SemanticMask generate_semantic_mask(const DetectorOracle& oracle,
                                    const Tensor3& x,
                                    const CategoryTargetSets& sets,
                                    const std::vector<std::string>& layers,
                                    double t_s) {
  if (layers.empty()) throw ConfigError("semantic mask needs at least one layer");
  if (sets.empty()) throw InputError("semantic mask needs a non-empty target set");
  validate_image(oracle, x);
  const auto declared = oracle.feature_layers();
  Objective all;
  for (const auto& [category, pixels] : sets.sets()) {
    for (const TargetPixel& p : pixels) all.push_back({category, p.coord, 1.0});
  }
  SemanticMask out;
  out.mask = AttackMask(x.height(), x.width(), 1);
  for (const std::string& id : layers) {
    if (std::find(declared.begin(), declared.end(), id) == declared.end()) {
      throw ConfigError("unknown feature layer '" + id + "'");
    }
    const FeatureActivation grad = oracle.feature_gradient(x, all, id);
    const Tensor3& g = grad.activation;
    // Collapse channels by summation.
    Tensor3 summed(1, g.height(), g.width());
    for (int c = 0; c < g.channels(); ++c) {
      for (int y = 0; y < g.height(); ++y) {
        for (int xx = 0; xx < g.width(); ++xx) summed.at(0, y, xx) += g.at(c, y, xx);
      }
    }
    const auto [lo_it, hi_it] =
        std::minmax_element(summed.values().begin(), summed.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    LayerSaliency layer;
    layer.layer_id = id;
    if (hi > lo) {
      for (double& v : summed.values()) v = (v - lo) / (hi - lo);
      layer.normalized = upsample_bilinear(summed, x.height(), x.width());
    } else {
      layer.constant = true;
      layer.normalized = Tensor3(1, x.height(), x.width());
    }
    layer.mask = AttackMask(x.height(), x.width());
    for (int y = 0; y < x.height(); ++y) {
      for (int xx = 0; xx < x.width(); ++xx) {
        const std::uint8_t on = layer.normalized.at(0, y, xx) > t_s ? 1 : 0;
        layer.mask.set(y, xx, on);
        if (!on) out.mask.set(y, xx, 0);
      }
    }
    out.layers.push_back(std::move(layer));
  }
  return out;
}

std::optional<AttackMask> dense_attack_mask(const DetectorOracle& oracle,
                                            const Tensor3& x,
                                            const CategoryTargetSets& sets,
                                            const DenseAttackConfig& config) {
  switch (config.variant) {
    case DenseVariant::kGlobal:
      return std::nullopt;
    case DenseVariant::kLocal:
      return generate_local_mask(sets, x.height(), x.width(),
                                 oracle.output_stride(), config.r_star);
    case DenseVariant::kSemantic: {
      if (sets.empty()) return AttackMask(x.height(), x.width());
      const auto layers =
          config.layers.empty() ? oracle.feature_layers() : config.layers;
      return generate_semantic_mask(oracle, x, sets, layers, config.t_s).mask;
    }
  }
  return std::nullopt;
}

AttackResult dca(const DetectorOracle& oracle, const Tensor3& x,
                 const CategoryTargetSets& sets, const DenseAttackConfig& config,
                 const AttackMask* mask_override) {
  config.validate();
  validate_image(oracle, x);
  const auto start = Clock::now();
  AttackResult result;
  const double T = config.threshold;
  const HeatmapStack clean_heat = infer_heatmaps(oracle, x);
  CategoryTargetSets remaining = sets;

  std::optional<AttackMask> mask;
  if (config.variant != DenseVariant::kGlobal) {
    if (mask_override != nullptr) {
      mask = *mask_override;
    } else {
      mask = dense_attack_mask(oracle, x, remaining, config);
    }
  }

  Tensor3 x_p = x;
  HeatmapStack heat_p = clean_heat;
  for (int p = 1; p <= config.max_iter && !remaining.empty(); ++p) {
    if (config.recompute_mask && p > 1 && mask_override == nullptr &&
        config.variant != DenseVariant::kGlobal) {
      mask = dense_attack_mask(oracle, x_p, remaining, config);
    }
    std::vector<Objective> objectives;
    for (const auto& [category, pixels] : remaining.sets()) {
      Objective o;
      for (const TargetPixel& t : pixels) o.push_back({category, t.coord, 1.0});
      objectives.push_back(std::move(o));
    }
    std::vector<Tensor3> grads =
        oracle.input_gradients(x_p, objectives, TermKind::kCrossEntropy);
    Tensor3 total(x.shape());
    for (Tensor3& g : grads) {
      const double m = linf_norm(g);
      if (!(m > 0.0) || !std::isfinite(m)) {
        result.notes.push_back("degenerate category gradient at iteration " +
                               std::to_string(p));
        continue;
      }
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += g[i] / m;
    }
    Tensor3 step = global_perturbation(total, config.epsilon, config.max_iter);
    if (mask) mask->apply(step);
    Tensor3 next = x_p + step;
    clamp_inplace(next, config.pixel_min, config.pixel_max);
    HeatmapStack next_heat = infer_heatmaps(oracle, next);
    remaining = prune_all(remaining, heat_p, next_heat);
    x_p = std::move(next);
    heat_p = std::move(next_heat);
    if (remaining.empty()) {
      for (const TargetPixel& t : surviving_clean_targets(clean_heat, heat_p, T)) {
        remaining.insert(t);
      }
    }
    result.iterations = p;
    TraceRecord rec;
    rec.iteration = p;
    rec.outer = p;
    rec.category = -1;
    rec.set_size = remaining.total_size();
    rec.remaining = remaining.total_size();
    rec.p_l0 = double(perturbed_pixel_count(x_p - x)) /
               (double(x.height()) * x.width());
    rec.wall_time_s = seconds_since(start);
    result.trace.push_back(rec);
  }

  result.success = remaining.empty();
  result.adversarial = std::move(x_p);
  result.perturbation = result.adversarial - x;
  result.wall_time_s = seconds_since(start);
  return result;
}

}  // namespace catattack
