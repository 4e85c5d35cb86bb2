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

#ifndef CATATTACK_TOOLS_RUN_CONFIG_HPP_
#define CATATTACK_TOOLS_RUN_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace catattack::cli {

using Params = nlohmann::ordered_json;

// Set to a non-empty value other than "0" to force one worker and write
// zero wall times, making every artifact byte-reproducible.
inline constexpr const char* kDeterministicEnv = "CATATTACK_DETERMINISTIC";

bool deterministic_mode();

// Every tunable of `command` with its default value.
Params default_params(const std::string& command);

// defaults < config file < flag overrides. The file may be a flat object
// or a snapshot written by write_snapshot. Unknown keys and type mismatches
// raise ConfigError.
Params resolve_params(const std::string& command,
                      const std::optional<std::filesystem::path>& config_file,
                      const Params& overrides);

void write_snapshot(const std::filesystem::path& dir,
                    const std::string& command, const Params& params);

// Params of a run directory's snapshot.
Params read_snapshot(const std::filesystem::path& dir);

[[noreturn]] void bad_param(const char* key, const char* what);

template <class T>
T param(const Params& p, const char* key) {
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad_param(key, e.what());
  }
}

}  // namespace catattack::cli

#endif  // CATATTACK_TOOLS_RUN_CONFIG_HPP_
