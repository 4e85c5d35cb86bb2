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

#include <functional>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "catattack/errors.hpp"
#include "commands.hpp"
#include "run_config.hpp"

namespace {

using catattack::cli::Params;
namespace fs = std::filesystem;

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> h = {
      {"model", "detector checkpoint"},
      {"data", "dataset manifest (JSONL)"},
      {"test_data", "held-out manifest for the mAP gate"},
      {"run", "attack run directory"},
      {"target_model", "checkpoint the adversarial images are replayed on"},
      {"max_images", "use only the first N images (-1: all)"},
      {"variant", "attack: sca, dca-g, dca-l, dca-s; train: small, wide"},
      {"t_attack", "attacking threshold T"},
      {"epsilon", "L-inf budget as a fraction of the pixel range"},
      {"max_iter", "dense attack iterations"},
      {"r_star", "local mask side in pixels"},
      {"t_s", "semantic saliency threshold"},
      {"max_iter_outer", "sparse attack outer iterations"},
      {"max_iter_inner", "sparse attack inner iterations"},
      {"deepfool_margin", "sparse attack scores categories by margin"},
      {"seed", "root seed"},
      {"workers", "parallel image workers"},
      {"jpeg_quality", "JPEG quality, 1 to 100"},
      {"param", "swept parameter: epsilon, t_attack, r_star, t_s, max_iter"},
      {"values", "swept values"},
      {"index", "image index within the manifest"},
      {"targets", "target pixel JSONL used instead of the detector's"},
      {"gate", "minimum held-out mAP"},
  };
  return h;
}

// Registers one flag per parameter, named after its key, and records
// which ones the user actually passed.
class FlagSet {
 public:
  FlagSet(CLI::App* app, const Params& defaults) {
    for (const auto& [key, value] : defaults.items()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      const auto it = help_text().find(key);
      const std::string help = it == help_text().end() ? key : it->second;
      if (value.is_boolean()) {
        add<bool>(app, flag, help, key);
      } else if (value.is_number_integer()) {
        add<long long>(app, flag, help, key);
      } else if (value.is_number()) {
        add<double>(app, flag, help, key);
      } else if (value.is_array()) {
        add<std::vector<double>>(app, flag, help, key);
      } else {
        add<std::string>(app, flag, help, key);
      }
      options_.back()->default_str(value.dump());
    }
  }

  Params overrides() const {
    Params p = Params::object();
    for (const auto& apply : apply_) apply(p);
    return p;
  }

 private:
  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& help,
           const std::string& key) {
    auto value = std::make_shared<T>();
    CLI::Option* option = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
      option = app->add_flag(flag, *value, help);
    } else {
      option = app->add_option(flag, *value, help);
    }
    options_.push_back(option);
    apply_.push_back([option, value, key](Params& p) {
      if (option->count() > 0) p[key] = *value;
    });
  }

  std::vector<CLI::Option*> options_;
  std::vector<std::function<void(Params&)>> apply_;
};

struct Command {
  const char* name;
  const char* help;
  int (*run)(const Params&, const fs::path&);
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = catattack::cli;
  static const Command kCommands[] = {
      {"gen-data", "generate the synthetic shapes dataset", cli::cmd_gen_data},
      {"train", "train the toy detector", cli::cmd_train},
      {"attack", "attack every image of a dataset", cli::cmd_attack},
      {"eval", "evaluate clean or adversarial images", cli::cmd_eval},
      {"transfer", "replay an attack run on another detector", cli::cmd_transfer},
      {"jpeg", "replay an attack run through JPEG compression", cli::cmd_jpeg},
      {"sweep", "sweep one attack hyperparameter", cli::cmd_sweep},
      {"inspect-mask", "write the local or semantic attack mask of one image",
       cli::cmd_inspect_mask},
  };

  CLI::App app{"Category-wise adversarial attacks on a toy anchor-free detector"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::unique_ptr<FlagSet>> flags;
  std::map<std::string, std::string> config_files;
  std::map<std::string, std::string> outs;
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_files[c.name],
                    "JSON parameters or a config.json snapshot");
    sub->add_option("--out", outs[c.name], "output directory")->required();
    flags[c.name] = std::make_unique<FlagSet>(sub, cli::default_params(c.name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  const Command* chosen = nullptr;
  for (const Command& c : kCommands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }
  try {
    const std::string& file = config_files[chosen->name];
    const Params params = cli::resolve_params(
        chosen->name, file.empty() ? std::nullopt : std::optional<fs::path>(file),
        flags[chosen->name]->overrides());
    return chosen->run(params, outs[chosen->name]);
  } catch (const catattack::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const catattack::InputError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const catattack::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return cli::kExitIo;
  } catch (const catattack::UndefinedMetricError& e) {
    std::cerr << "undefined metric: " << e.what() << '\n';
    return cli::kExitCheckFailed;
  } catch (const catattack::TrainingError& e) {
    std::cerr << "training failed: " << e.what() << '\n';
    return cli::kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitIo;
  }
}
