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

#ifndef CATATTACK_EVALUATION_HPP_
#define CATATTACK_EVALUATION_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catattack/attack_result.hpp"
#include "catattack/dataset.hpp"
#include "catattack/detector.hpp"

namespace catattack {

inline constexpr int kDefaultJpegQuality = 95;

struct ImageRecord {
  std::string id;
  std::size_t ground_truth = 0;
  std::size_t clean_detections = 0;
  std::size_t attack_detections = 0;
  bool success = false;
  int iterations = 0;
  double p_l0 = 0.0;
  double p_l2 = 0.0;
  double linf = 0.0;
  double attack_time_s = 0.0;
  bool skipped = false;
  std::string note;
};

struct EvalReport {
  std::string attack;
  std::string model;
  std::size_t images = 0;
  double map_clean = 0.0;
  double map_attack = 0.0;
  // Empty when map_clean is zero.
  std::optional<double> asr;
  double success_rate = 0.0;
  double p_l0 = 0.0;  // means over evaluated images
  double p_l2 = 0.0;
  double linf = 0.0;
  double mean_attack_time_s = 0.0;
  std::vector<ImageRecord> records;
};

struct TransferReport {
  std::string origin_model;
  std::string target_model;
  std::string attack;
  double asr_origin = 0.0;
  double asr_target = 0.0;
  double atr = 0.0;
  EvalReport target;
};

struct JpegReport {
  int quality = kDefaultJpegQuality;
  EvalReport pre;   // adversarial images as generated
  EvalReport post;  // after the JPEG round trip
};

std::vector<std::vector<Annotation>> ground_truth_of(
    const std::vector<Sample>& samples);

std::vector<std::vector<Detection>> detect_all(
    const DetectorOracle& oracle, const std::vector<Tensor3>& images,
    double threshold, int workers = 1);

// Clean and perturbed mAP of `oracle` on the same ground truth, decoded at
// the oracle's visual threshold. Per-image perturbation norms are taken
// against the clean images.
EvalReport evaluate_images(const DetectorOracle& oracle,
                           const std::vector<Sample>& clean,
                           const std::vector<Tensor3>& perturbed,
                           int workers = 1);

// evaluate_images on the attack outputs plus success flags and timing.
EvalReport evaluate_attack(const DetectorOracle& oracle,
                           const std::vector<Sample>& clean,
                           const std::vector<AttackResult>& results,
                           int workers = 1);

// Evaluates adversarial images generated against another oracle. Throws
// UndefinedMetricError when either ASR is undefined or the origin ASR is
// not positive.
TransferReport transfer_eval(const std::vector<Sample>& clean,
                             const std::vector<Tensor3>& adversarial,
                             const EvalReport& origin_report,
                             const DetectorOracle& target,
                             const std::string& target_model,
                             int workers = 1);

// Evaluates the adversarial images on `target` before and after a JPEG
// round trip at `quality`. Images the codec rejects are skipped in both
// halves and recorded.
JpegReport jpeg_transfer_eval(const std::vector<Sample>& clean,
                              const std::vector<Tensor3>& adversarial,
                              int quality, const DetectorOracle& target,
                              int workers = 1);

// Stable CSV column order of the summary table.
const std::vector<std::string>& summary_fields();
void write_summary_csv_header(std::ostream& out);
void write_summary_csv_row(std::ostream& out, const EvalReport& report);
// One JSON object per image.
void write_records(std::ostream& out, const EvalReport& report,
                   bool include_wall_time);
// Aligned human-readable table.
void write_summary_table(std::ostream& out,
                         const std::vector<EvalReport>& reports);

}  // namespace catattack

#endif  // CATATTACK_EVALUATION_HPP_
