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

#ifndef CATATTACK_ATTACK_RESULT_HPP_
#define CATATTACK_ATTACK_RESULT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "catattack/tensor.hpp"

namespace catattack {

struct TraceRecord {
  int iteration = 0;        // running step counter across the whole attack
  int outer = 0;
  int inner = 0;
  int category = -1;        // chosen h (SCA) or -1 when all sets step (DCA)
  std::size_t set_size = 0; // |S_h| after the step (SCA) or total (DCA)
  std::size_t remaining = 0;
  double p_l0 = 0.0;
  double wall_time_s = 0.0;
};

struct AttackResult {
  Tensor3 adversarial;
  Tensor3 perturbation;  // adversarial - clean
  bool success = false;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::vector<TraceRecord> trace;
  // Flat coordinates changed by LinearSolver steps (SCA only).
  std::vector<std::size_t> touched;
  std::vector<std::string> notes;
};

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace,
                 bool include_wall_time);

}  // namespace catattack

#endif  // CATATTACK_ATTACK_RESULT_HPP_
