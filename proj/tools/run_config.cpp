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

#include "run_config.hpp"

#include <cstdlib>
#include <fstream>

#include "catattack/errors.hpp"

#ifndef CATATTACK_VERSION
#define CATATTACK_VERSION "unknown"
#endif

namespace catattack::cli {
namespace {

Params attack_params() {
  return {{"model", ""},
          {"data", ""},
          {"max_images", -1},
          {"variant", "dca-g"},
          {"t_attack", 0.1},
          {"epsilon", 0.05},
          {"max_iter", 30},
          {"r_star", 60},
          {"t_s", 0.5},
          {"max_iter_outer", 50},
          {"max_iter_inner", 20},
          {"deepfool_margin", false},
          {"seed", 0},
          {"workers", 1}};
}

bool same_kind(const Params& a, const Params& b) {
  if (a.is_number_float()) return b.is_number();
  if (a.is_number_integer()) return b.is_number_integer();
  return a.type() == b.type();
}

void merge(Params& into, const Params& from, const std::string& source) {
  if (!from.is_object()) throw ConfigError(source + ": expected a JSON object");
  for (const auto& [key, value] : from.items()) {
    if (!into.contains(key)) {
      throw ConfigError(source + ": unknown parameter '" + key + "'");
    }
    if (!same_kind(into[key], value)) {
      throw ConfigError(source + ": parameter '" + key + "' has the wrong type");
    }
    into[key] = into[key].is_number_float() ? Params(value.get<double>()) : value;
  }
}

Params load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Params::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

bool deterministic_mode() {
  const char* v = std::getenv(kDeterministicEnv);
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

Params default_params(const std::string& command) {
  if (command == "gen-data") {
    return {{"train_count", 1000}, {"test_count", 200}, {"categories", 3},
            {"image_size", 128},   {"min_objects", 1},  {"max_objects", 3},
            {"noise_sigma", 6.0},  {"seed", 7}};
  }
  if (command == "train") {
    return {{"data", ""},         {"test_data", ""}, {"variant", "small"},
            {"epochs", 24},       {"batch_size", 8}, {"learning_rate", 2e-3},
            {"gate", 0.5},        {"seed", 1}};
  }
  if (command == "attack") return attack_params();
  if (command == "sweep") {
    Params p = attack_params();
    p["max_images"] = 30;
    p["param"] = "epsilon";
    p["values"] = Params::array({0.01, 0.03, 0.05});
    return p;
  }
  if (command == "inspect-mask") {
    Params p = attack_params();
    p["variant"] = "dca-l";
    p["index"] = 0;
    p["targets"] = "";
    p["image_size"] = 128;
    return p;
  }
  if (command == "eval") {
    return {{"model", ""}, {"data", ""}, {"run", ""}, {"max_images", -1},
            {"workers", 1}};
  }
  if (command == "transfer") {
    return {{"run", ""}, {"target_model", ""}, {"workers", 1}};
  }
  if (command == "jpeg") {
    return {{"run", ""}, {"target_model", ""}, {"jpeg_quality", 95},
            {"workers", 1}};
  }
  throw ConfigError("unknown command '" + command + "'");
}

Params resolve_params(const std::string& command,
                      const std::optional<std::filesystem::path>& config_file,
                      const Params& overrides) {
  Params p = default_params(command);
  if (config_file) {
    Params file = load_json(*config_file);
    if (file.contains("params")) {
      if (file.value("command", command) != command) {
        throw ConfigError(config_file->string() + " is a snapshot of '" +
                          file["command"].get<std::string>() + "'");
      }
      file = file["params"];
    }
    merge(p, file, config_file->string());
  }
  merge(p, overrides, "command line");
  // Snapshots must stay valid from any working directory.
  for (const char* key : {"model", "data", "test_data", "run", "target_model", "targets"}) {
    if (p.contains(key) && !p[key].get<std::string>().empty()) {
      p[key] = std::filesystem::absolute(p[key].get<std::string>()).lexically_normal().string();
    }
  }
  if (deterministic_mode() && p.contains("workers")) p["workers"] = 1;
  return p;
}

void write_snapshot(const std::filesystem::path& dir, const std::string& command,
                    const Params& params) {
  std::ofstream out(dir / "config.json");
  if (!out) throw IoError("cannot write " + (dir / "config.json").string());
  const Params snapshot = {{"command", command},
                           {"version", CATATTACK_VERSION},
                           {"params", params}};
  out << snapshot.dump(2) << '\n';
  if (!out) throw IoError("failed writing config snapshot");
}

Params read_snapshot(const std::filesystem::path& dir) {
  const Params s = load_json(dir / "config.json");
  if (!s.contains("params")) {
    throw ConfigError((dir / "config.json").string() + " is not a run snapshot");
  }
  return s["params"];
}

void bad_param(const char* key, const char* what) {
  throw ConfigError(std::string("parameter '") + key + "': " + what);
}

}  // namespace catattack::cli
