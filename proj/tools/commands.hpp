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

#ifndef CATATTACK_TOOLS_COMMANDS_HPP_
#define CATATTACK_TOOLS_COMMANDS_HPP_

#include <filesystem>

#include "run_config.hpp"

namespace catattack::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // run completed, a gate failed
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

int cmd_gen_data(const Params& p, const std::filesystem::path& out);
int cmd_train(const Params& p, const std::filesystem::path& out);
int cmd_attack(const Params& p, const std::filesystem::path& out);
int cmd_eval(const Params& p, const std::filesystem::path& out);
int cmd_transfer(const Params& p, const std::filesystem::path& out);
int cmd_jpeg(const Params& p, const std::filesystem::path& out);
int cmd_sweep(const Params& p, const std::filesystem::path& out);
int cmd_inspect_mask(const Params& p, const std::filesystem::path& out);

}  // namespace catattack::cli

#endif  // CATATTACK_TOOLS_COMMANDS_HPP_
