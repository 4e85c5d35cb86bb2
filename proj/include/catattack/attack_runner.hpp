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

#ifndef CATATTACK_ATTACK_RUNNER_HPP_
#define CATATTACK_ATTACK_RUNNER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catattack/dataset.hpp"
#include "catattack/dense_attack.hpp"
#include "catattack/sparse_attack.hpp"

namespace catattack {

enum class AttackKind { kSca, kDcaG, kDcaL, kDcaS };

// Accepts "sca", "dca-g", "dca-l", "dca-s"; throws ConfigError otherwise.
AttackKind parse_attack_kind(std::string_view name);
const char* attack_kind_name(AttackKind kind);

struct AttackSuiteConfig {
  AttackKind kind = AttackKind::kDcaG;
  SparseAttackConfig sparse;
  // `variant` is overwritten from `kind`.
  DenseAttackConfig dense;
  int workers = 1;
  std::uint64_t seed = 0;

  double threshold() const;
};

struct ImageAttack {
  CategoryTargetSets initial_sets;
  AttackResult result;
  std::optional<AttackMask> mask;  // DCA-L / DCA-S only
};

// Per-image seed derived from the root seed; independent of worker count.
std::uint64_t image_seed(std::uint64_t root, std::size_t index);

// Builds target sets on the clean heatmaps and attacks every sample.
// Attack failures that raise (degenerate gradients) are recorded as
// unsuccessful runs with the clean image as output.
std::vector<ImageAttack> run_attack_suite(const DetectorOracle& oracle,
                                          const std::vector<Sample>& samples,
                                          const AttackSuiteConfig& config);

std::vector<AttackResult> results_of(const std::vector<ImageAttack>& attacks);

}  // namespace catattack

#endif  // CATATTACK_ATTACK_RUNNER_HPP_
