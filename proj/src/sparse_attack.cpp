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

#include "catattack/sparse_attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "catattack/errors.hpp"
#include "catattack/metrics.hpp"

namespace catattack {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct StepDirection {
  Tensor3 v;
  double score = 0.0;
  double norm = 0.0;
};

// v_j = grad sum f_j - grad sum f_h over the set, for every j != h.
std::vector<StepDirection> cwdf_directions(const DetectorOracle& oracle,
                                           const Tensor3& x,
                                           const HeatmapStack& heat, int h,
                                           const std::vector<TargetPixel>& set,
                                           bool margin) {
  std::vector<Objective> objectives;
  std::vector<double> scores;
  for (int j = 0; j < oracle.category_count(); ++j) {
    if (j == h) continue;
    Objective o;
    double score = 0.0;
    for (const TargetPixel& p : set) {
      o.push_back({j, p.coord, 1.0});
      o.push_back({h, p.coord, -1.0});
      score += heat.score(j, p.coord);
      if (margin) score -= heat.score(h, p.coord);
    }
    objectives.push_back(std::move(o));
    scores.push_back(score);
  }
  std::vector<Tensor3> grads =
      oracle.input_gradients(x, objectives, TermKind::kScore);
  std::vector<StepDirection> out;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double n = l2_norm(grads[i]);
    out.push_back({std::move(grads[i]), scores[i], n});
  }
  return out;
}

BoundaryNormal normalized(Tensor3 g, const Tensor3& anchor, const char* what) {
  const double n = l2_norm(g);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateGradientError(std::string(what) + ": zero gradient");
  }
  g *= 1.0 / n;
  return {std::move(g), anchor};
}

}  // namespace

void SparseAttackConfig::validate() const {
  if (max_iter_outer < 1 || max_iter_inner < 1 || cwdf_max_steps < 1) {
    throw ConfigError("iteration caps must be at least 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("attacking threshold must lie in (0, 1)");
  }
  if (!(pixel_max > pixel_min)) throw ConfigError("invalid pixel range");
  if (overshoot < 0.0) throw ConfigError("overshoot must be non-negative");
}

CwdfResult cwdf(const DetectorOracle& oracle, const Tensor3& x, int category,
                const std::vector<TargetPixel>& pixels,
                const SparseAttackConfig& config) {
  config.validate();
  CwdfResult result;
  result.boundary_point = x;
  result.remaining = pixels;
  if (pixels.empty()) {
    result.complete = true;
    return result;
  }
  if (oracle.category_count() < 2) {
    throw DegenerateGradientError("CWDF needs at least two categories");
  }
  std::mt19937_64 rng(config.seed ^ 0xc3a5c85c97cb3127ULL);
  Tensor3 current = x;
  HeatmapStack heat = infer_heatmaps(oracle, current);
  bool nudged = false;
  while (!result.remaining.empty() && result.steps < config.cwdf_max_steps) {
    std::vector<StepDirection> dirs = cwdf_directions(
        oracle, current, heat, category, result.remaining,
        config.deepfool_margin);
    const StepDirection* best = nullptr;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (const StepDirection& d : dirs) {
      if (!(d.norm > 0.0)) continue;
      const double ratio = std::abs(d.score) / d.norm;
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = &d;
      }
    }
    Tensor3 next = current;
    if (best == nullptr) {
      if (nudged) {
        throw DegenerateGradientError(
            "CWDF: every direction vanished, also after a random nudge");
      }
      std::uniform_real_distribution<double> u(-1e-3, 1e-3);
      for (double& v : next.values()) v += u(rng);
      nudged = true;
    } else {
      const double step = (1.0 + config.overshoot) * std::abs(best->score) /
                          (best->norm * best->norm);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += step * best->v[i];
    }
    clamp_inplace(next, config.pixel_min, config.pixel_max);
    HeatmapStack next_heat = infer_heatmaps(oracle, next);
    result.remaining = remove_pixels(heat, next_heat, result.remaining,
                                     config.threshold);
    current = std::move(next);
    heat = std::move(next_heat);
    ++result.steps;
    result.set_sizes.push_back(result.remaining.size());
  }
  result.boundary_point = std::move(current);
  result.complete = result.remaining.empty();
  return result;
}

BoundaryNormal approx_boundary(const DetectorOracle& oracle,
                               const Tensor3& x_boundary, const Tensor3& x,
                               const std::vector<TargetPixel>& pixels) {
  const HeatmapStack heat_b = infer_heatmaps(oracle, x_boundary);
  const HeatmapStack heat_x = infer_heatmaps(oracle, x);
  Objective o;
  for (const TargetPixel& p : pixels) {
    o.push_back({heat_b.argmax(p.coord), p.coord, 1.0});
    o.push_back({heat_x.argmax(p.coord), p.coord, -1.0});
  }
  Tensor3 g = std::move(
      oracle.input_gradients(x_boundary, {&o, 1}, TermKind::kScore)[0]);
  return normalized(std::move(g), x_boundary, "ApproxBoundary");
}

BoundaryNormal approx_threshold_boundary(const DetectorOracle& oracle,
                                         const Tensor3& x_boundary,
                                         const Tensor3& x,
                                         const std::vector<TargetPixel>& pixels) {
  const HeatmapStack heat_x = infer_heatmaps(oracle, x);
  Objective o;
  for (const TargetPixel& p : pixels) {
    o.push_back({heat_x.argmax(p.coord), p.coord, -1.0});
  }
  Tensor3 g = std::move(
      oracle.input_gradients(x_boundary, {&o, 1}, TermKind::kScore)[0]);
  return normalized(std::move(g), x_boundary, "threshold boundary");
}

LinearSolverResult linear_solver(const Tensor3& x, const BoundaryNormal& normal,
                                 double pixel_min, double pixel_max) {
  if (!(x.shape() == normal.w.shape()) || !(x.shape() == normal.anchor.shape())) {
    throw InputError("LinearSolver operands differ in shape");
  }
  LinearSolverResult result;
  result.point = x;
  const Tensor3& w = normal.w;
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    residual += w[i] * (x[i] - normal.anchor[i]);
  }
  const double start_sign = residual > 0 ? 1.0 : -1.0;
  const double tol = 1e-12 * std::max(1.0, std::abs(residual));
  if (std::abs(residual) <= tol) {
    result.complete = true;
    result.residual = residual;
    return result;
  }

  std::vector<std::size_t> order;
  order.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) order.push_back(i);
  }
  auto by_magnitude = [&w](std::size_t a, std::size_t b) {
    const double ma = std::abs(w[a]);
    const double mb = std::abs(w[b]);
    return ma > mb || (ma == mb && a < b);
  };
  // Most calls finish within a handful of coordinates.
  std::size_t sorted = std::min<std::size_t>(order.size(), 256);
  std::partial_sort(order.begin(), order.begin() + sorted, order.end(),
                    by_magnitude);

  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == sorted) {
      std::sort(order.begin() + sorted, order.end(), by_magnitude);
      sorted = order.size();
    }
    const std::size_t d = order[k];
    // Move coordinate d towards the hyperplane (for residual < 0 this is
    // |residual| / |w_d| * sign(w_d)).
    const double step = -residual / w[d];
    const double before = result.point[d];
    const double after = std::clamp(before + step, pixel_min, pixel_max);
    if (after != before) {
      result.point[d] = after;
      result.coords.push_back(d);
      residual += w[d] * (after - before);
    }
    if (std::abs(residual) <= tol || residual * start_sign < 0.0) {
      result.complete = true;
      break;
    }
  }
  result.residual = residual;
  return result;
}

AttackResult sca(const DetectorOracle& oracle, const Tensor3& x,
                 const CategoryTargetSets& sets,
                 const SparseAttackConfig& config) {
  config.validate();
  validate_image(oracle, x);
  const auto start = Clock::now();
  AttackResult result;
  const double T = config.threshold;
  const HeatmapStack clean_heat = infer_heatmaps(oracle, x);
  CategoryTargetSets remaining = sets;
  Tensor3 x_p = x;
  HeatmapStack heat_p = clean_heat;
  std::set<std::size_t> touched;
  int step_counter = 0;

  for (int p = 1; p <= config.max_iter_outer && !remaining.empty(); ++p) {
    const std::optional<SelectedSet> selected =
        select_highest_set(remaining, heat_p);
    const int h = selected->category;
    std::vector<TargetPixel> s_h = selected->pixels;
    Tensor3 x_pq = x_p;
    HeatmapStack heat_pq = heat_p;

    for (int q = 0; q < config.max_iter_inner && !s_h.empty(); ++q) {
      SparseAttackConfig step_config = config;
      step_config.seed = config.seed + 7919ULL * std::uint64_t(step_counter);
      const CwdfResult boundary = cwdf(oracle, x_pq, h, s_h, step_config);
      BoundaryNormal normal;
      try {
        normal = approx_boundary(oracle, boundary.boundary_point, x_pq, s_h);
      } catch (const DegenerateGradientError&) {
        // No pixel changed category at x^B; the active boundary is f = T.
        try {
          normal = approx_threshold_boundary(oracle, boundary.boundary_point,
                                             x_pq, s_h);
        } catch (const DegenerateGradientError&) {
          result.notes.push_back("degenerate boundary at outer " +
                                 std::to_string(p) + " inner " +
                                 std::to_string(q));
          break;
        }
      }
      LinearSolverResult lin =
          linear_solver(x_pq, normal, config.pixel_min, config.pixel_max);
      touched.insert(lin.coords.begin(), lin.coords.end());
      HeatmapStack heat_adv = infer_heatmaps(oracle, lin.point);
      s_h = remove_pixels(heat_pq, heat_adv, s_h, T);
      x_pq = std::move(lin.point);
      heat_pq = std::move(heat_adv);

      ++step_counter;
      TraceRecord rec;
      rec.iteration = step_counter;
      rec.outer = p;
      rec.inner = q;
      rec.category = h;
      rec.set_size = s_h.size();
      rec.remaining = remaining.total_size() - remaining.at(h).size() + s_h.size();
      rec.p_l0 = double(perturbed_pixel_count(x_pq - x)) /
                 (double(x.height()) * x.width());
      rec.wall_time_s = seconds_since(start);
      result.trace.push_back(rec);
    }

    remaining.set(h, s_h);
    remaining = prune_all(remaining, heat_p, heat_pq);
    x_p = std::move(x_pq);
    heat_p = std::move(heat_pq);
    result.iterations = p;

    if (remaining.empty()) {
      // Pixels pruned against an intermediate image may have recovered.
      for (const TargetPixel& t : surviving_clean_targets(clean_heat, heat_p, T)) {
        remaining.insert(t);
      }
    }
  }

  result.success = remaining.empty();
  result.adversarial = std::move(x_p);
  result.perturbation = result.adversarial - x;
  result.touched.assign(touched.begin(), touched.end());
  result.wall_time_s = seconds_since(start);
  return result;
}

}  // namespace catattack
