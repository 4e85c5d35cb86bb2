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

#ifndef CATATTACK_ERRORS_HPP_
#define CATATTACK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace catattack {

// Input does not match what the callee expects (shape, range).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad configuration: unknown layer, invalid hyperparameter, missing dataset.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system or codec failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gradient vanished where a direction was required.
class DegenerateGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Metric is undefined for the given inputs (e.g. ASR with mAP_clean = 0).
class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace catattack

#endif  // CATATTACK_ERRORS_HPP_
