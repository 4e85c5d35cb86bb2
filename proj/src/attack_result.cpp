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

#include "catattack/attack_result.hpp"

#include <ostream>

#include "json.hpp"

namespace catattack {

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace,
                 bool include_wall_time) {
  for (const TraceRecord& r : trace) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["outer"] = r.outer;
    j["inner"] = r.inner;
    j["category"] = r.category;
    j["set_size"] = r.set_size;
    j["remaining"] = r.remaining;
    j["p_l0"] = r.p_l0;
    j["wall_time_s"] = include_wall_time ? r.wall_time_s : 0.0;
    out << j.dump() << '\n';
  }
}

}  // namespace catattack
