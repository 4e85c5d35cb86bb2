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

#include "catattack/evaluation.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "catattack/errors.hpp"
#include "catattack/image_io.hpp"
#include "catattack/metrics.hpp"
#include "catattack/parallel.hpp"

namespace catattack {
namespace {

// Evaluates only the records not marked skipped.
EvalReport evaluate_subset(const DetectorOracle& oracle,
                           const std::vector<Sample>& clean,
                           const std::vector<Tensor3>& perturbed,
                           std::vector<ImageRecord> records, int workers) {
  std::vector<Tensor3> clean_images;
  std::vector<Tensor3> attacked;
  std::vector<std::vector<Annotation>> truth;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (records[i].skipped) continue;
    kept.push_back(i);
    clean_images.push_back(clean[i].image);
    attacked.push_back(perturbed[i]);
    truth.push_back(clean[i].annotations);
  }
  const double thr = oracle.visual_threshold();
  const auto clean_dets = detect_all(oracle, clean_images, thr, workers);
  const auto attack_dets = detect_all(oracle, attacked, thr, workers);

  EvalReport report;
  report.images = kept.size();
  report.map_clean = map_score(clean_dets, truth);
  report.map_attack = map_score(attack_dets, truth);
  if (report.map_clean > 0.0) {
    report.asr = asr(report.map_clean, report.map_attack);
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    ImageRecord& r = records[kept[k]];
    const Tensor3 delta = attacked[k] - clean_images[k];
    const PerturbationNorms n = perturbation_norms(delta);
    r.ground_truth = truth[k].size();
    r.clean_detections = clean_dets[k].size();
    r.attack_detections = attack_dets[k].size();
    r.p_l0 = n.p_l0;
    r.p_l2 = n.p_l2;
    r.linf = linf_norm(delta);
    report.p_l0 += n.p_l0;
    report.p_l2 += n.p_l2;
    report.linf = std::max(report.linf, r.linf);
  }
  if (!kept.empty()) {
    report.p_l0 /= double(kept.size());
    report.p_l2 /= double(kept.size());
  }
  report.records = std::move(records);
  return report;
}

std::vector<ImageRecord> initial_records(const std::vector<Sample>& clean) {
  std::vector<ImageRecord> records(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) records[i].id = clean[i].id;
  return records;
}

void check_sizes(const std::vector<Sample>& clean, std::size_t n) {
  if (clean.size() != n) {
    throw InputError("clean and adversarial image counts differ");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<std::vector<Annotation>> ground_truth_of(
    const std::vector<Sample>& samples) {
  std::vector<std::vector<Annotation>> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.annotations);
  return out;
}

std::vector<std::vector<Detection>> detect_all(
    const DetectorOracle& oracle, const std::vector<Tensor3>& images,
    double threshold, int workers) {
  std::vector<std::vector<Detection>> out(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) {
    out[i] = oracle.detect(images[i], threshold);
  });
  return out;
}

EvalReport evaluate_images(const DetectorOracle& oracle,
                           const std::vector<Sample>& clean,
                           const std::vector<Tensor3>& perturbed,
                           int workers) {
  check_sizes(clean, perturbed.size());
  return evaluate_subset(oracle, clean, perturbed, initial_records(clean),
                         workers);
}

EvalReport evaluate_attack(const DetectorOracle& oracle,
                           const std::vector<Sample>& clean,
                           const std::vector<AttackResult>& results,
                           int workers) {
  check_sizes(clean, results.size());
  std::vector<Tensor3> adversarial;
  adversarial.reserve(results.size());
  std::vector<ImageRecord> records = initial_records(clean);
  std::size_t successes = 0;
  double total_time = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    adversarial.push_back(results[i].adversarial);
    records[i].success = results[i].success;
    records[i].iterations = results[i].iterations;
    records[i].attack_time_s = results[i].wall_time_s;
    if (!results[i].notes.empty()) records[i].note = results[i].notes.front();
    successes += results[i].success ? 1 : 0;
    total_time += results[i].wall_time_s;
  }
  EvalReport report = evaluate_subset(oracle, clean, adversarial,
                                      std::move(records), workers);
  if (!results.empty()) {
    report.success_rate = double(successes) / double(results.size());
    report.mean_attack_time_s = total_time / double(results.size());
  }
  return report;
}

TransferReport transfer_eval(const std::vector<Sample>& clean,
                             const std::vector<Tensor3>& adversarial,
                             const EvalReport& origin_report,
                             const DetectorOracle& target,
                             const std::string& target_model, int workers) {
  if (!origin_report.asr) {
    throw UndefinedMetricError("origin ASR is undefined");
  }
  TransferReport t;
  t.origin_model = origin_report.model;
  t.target_model = target_model;
  t.attack = origin_report.attack;
  t.target = evaluate_images(target, clean, adversarial, workers);
  t.target.attack = origin_report.attack;
  t.target.model = target_model;
  if (!t.target.asr) {
    throw UndefinedMetricError("target model has zero clean mAP");
  }
  t.asr_origin = *origin_report.asr;
  t.asr_target = *t.target.asr;
  t.atr = atr(t.asr_target, t.asr_origin);
  return t;
}

JpegReport jpeg_transfer_eval(const std::vector<Sample>& clean,
                              const std::vector<Tensor3>& adversarial,
                              int quality, const DetectorOracle& target,
                              int workers) {
  if (quality < 1 || quality > 100) {
    throw ConfigError("JPEG quality must lie in [1, 100]");
  }
  check_sizes(clean, adversarial.size());
  std::vector<ImageRecord> records = initial_records(clean);
  std::vector<Tensor3> decoded(adversarial.size());
  parallel_for(adversarial.size(), workers, [&](std::size_t i) {
    try {
      decoded[i] = jpeg_round_trip(adversarial[i], quality);
      if (!(decoded[i].shape() == adversarial[i].shape())) {
        throw IoError("decoded shape differs");
      }
    } catch (const std::exception& e) {
      records[i].skipped = true;
      records[i].note = std::string("jpeg codec failure: ") + e.what();
      decoded[i] = adversarial[i];
    }
  });
  JpegReport report;
  report.quality = quality;
  report.pre = evaluate_subset(target, clean, adversarial, records, workers);
  report.post = evaluate_subset(target, clean, decoded, records, workers);
  return report;
}

const std::vector<std::string>& summary_fields() {
  static const std::vector<std::string> fields = {
      "attack", "model",  "images", "map_clean", "map_attack",
      "asr",    "success_rate",     "p_l0",      "p_l2",
      "linf",   "mean_attack_time_s"};
  return fields;
}

void write_summary_csv_header(std::ostream& out) {
  const auto& f = summary_fields();
  for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
  out << '\n';
}

void write_summary_csv_row(std::ostream& out, const EvalReport& r) {
  out << r.attack << ',' << r.model << ',' << r.images << ','
      << fmt(r.map_clean) << ',' << fmt(r.map_attack) << ','
      << (r.asr ? fmt(*r.asr) : std::string("")) << ','
      << fmt(r.success_rate) << ',' << fmt(r.p_l0) << ',' << fmt(r.p_l2)
      << ',' << fmt(r.linf) << ',' << fmt(r.mean_attack_time_s) << '\n';
}

void write_records(std::ostream& out, const EvalReport& report,
                   bool include_wall_time) {
  for (const ImageRecord& r : report.records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["ground_truth"] = r.ground_truth;
    j["clean_detections"] = r.clean_detections;
    j["attack_detections"] = r.attack_detections;
    j["success"] = r.success;
    j["iterations"] = r.iterations;
    j["p_l0"] = r.p_l0;
    j["p_l2"] = r.p_l2;
    j["linf"] = r.linf;
    j["attack_time_s"] = include_wall_time ? r.attack_time_s : 0.0;
    j["skipped"] = r.skipped;
    j["note"] = r.note;
    out << j.dump() << '\n';
  }
}

void write_summary_table(std::ostream& out,
                         const std::vector<EvalReport>& reports) {
  const auto fixed4 = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
  };
  const std::ios::fmtflags flags = out.flags();
  const std::streamsize precision = out.precision();
  out << std::left << std::setw(8) << "attack" << std::setw(10) << "model"
      << std::right << std::setw(7) << "images" << std::setw(11) << "mAP"
      << std::setw(11) << "mAP_adv" << std::setw(9) << "ASR" << std::setw(10)
      << "success" << std::setw(10) << "P_L0" << std::setw(11) << "P_L2"
      << std::setw(9) << "Linf" << std::setw(10) << "time_s" << '\n';
  for (const EvalReport& r : reports) {
    out << std::left << std::setw(8) << r.attack << std::setw(10) << r.model
        << std::right << std::setw(7) << r.images << std::fixed
        << std::setprecision(4) << std::setw(11) << r.map_clean
        << std::setw(11) << r.map_attack << std::setw(9)
        << (r.asr ? fixed4(*r.asr) : std::string("--")) << std::setw(10)
        << r.success_rate << std::setw(10) << r.p_l0 << std::setprecision(6)
        << std::setw(11) << r.p_l2 << std::setprecision(2) << std::setw(9)
        << r.linf << std::setprecision(3) << std::setw(10)
        << r.mean_attack_time_s << '\n';
    out.flags(flags);
  }
  out.precision(precision);
}

}  // namespace catattack
