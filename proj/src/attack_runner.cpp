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

#include "catattack/attack_runner.hpp"

#include "catattack/errors.hpp"
#include "catattack/parallel.hpp"

namespace catattack {

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "sca") return AttackKind::kSca;
  if (name == "dca-g") return AttackKind::kDcaG;
  if (name == "dca-l") return AttackKind::kDcaL;
  if (name == "dca-s") return AttackKind::kDcaS;
  throw ConfigError("unknown attack variant '" + std::string(name) +
                    "' (expected sca, dca-g, dca-l or dca-s)");
}

const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kSca: return "sca";
    case AttackKind::kDcaG: return "dca-g";
    case AttackKind::kDcaL: return "dca-l";
    case AttackKind::kDcaS: return "dca-s";
  }
  return "unknown";
}

double AttackSuiteConfig::threshold() const {
  return kind == AttackKind::kSca ? sparse.threshold : dense.threshold;
}

std::uint64_t image_seed(std::uint64_t root, std::size_t index) {
  // splitmix64 over (root, index)
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<ImageAttack> run_attack_suite(const DetectorOracle& oracle,
                                          const std::vector<Sample>& samples,
                                          const AttackSuiteConfig& config) {
  DenseAttackConfig dense = config.dense;
  switch (config.kind) {
    case AttackKind::kDcaG: dense.variant = DenseVariant::kGlobal; break;
    case AttackKind::kDcaL: dense.variant = DenseVariant::kLocal; break;
    case AttackKind::kDcaS: dense.variant = DenseVariant::kSemantic; break;
    case AttackKind::kSca: break;
  }
  if (config.kind == AttackKind::kSca) {
    config.sparse.validate();
  } else {
    dense.validate();
  }
  const double T = config.threshold();

  std::vector<ImageAttack> out(samples.size());
  parallel_for(samples.size(), config.workers, [&](std::size_t i) {
    const Tensor3& x = samples[i].image;
    ImageAttack& a = out[i];
    a.initial_sets = build_target_sets(infer_heatmaps(oracle, x), T);
    try {
      if (config.kind == AttackKind::kSca) {
        SparseAttackConfig sparse = config.sparse;
        sparse.seed = image_seed(config.seed, i);
        a.result = sca(oracle, x, a.initial_sets, sparse);
      } else {
        if (dense.variant != DenseVariant::kGlobal) {
          a.mask = dense_attack_mask(oracle, x, a.initial_sets, dense);
        }
        const AttackMask* fixed =
            a.mask && !dense.recompute_mask ? &*a.mask : nullptr;
        a.result = dca(oracle, x, a.initial_sets, dense, fixed);
      }
    } catch (const DegenerateGradientError& e) {
      a.result = AttackResult{};
      a.result.adversarial = x;
      a.result.perturbation = Tensor3(x.shape());
      a.result.notes.push_back(std::string("degenerate gradient: ") + e.what());
    }
  });
  return out;
}

std::vector<AttackResult> results_of(const std::vector<ImageAttack>& attacks) {
  std::vector<AttackResult> out;
  out.reserve(attacks.size());
  for (const ImageAttack& a : attacks) out.push_back(a.result);
  return out;
}

}  // namespace catattack
