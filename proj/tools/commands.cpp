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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "catattack/attack_runner.hpp"
#include "catattack/dataset.hpp"
#include "catattack/errors.hpp"
#include "catattack/evaluation.hpp"
#include "catattack/image_io.hpp"
#include "catattack/metrics.hpp"
#include "catattack/toy_detector.hpp"
#include "catattack/training.hpp"
#include "svg_plot.hpp"

namespace catattack::cli {
namespace {

namespace fs = std::filesystem;

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Missing inputs are configuration mistakes; unreadable ones are I/O errors.
fs::path require_input(const Params& p, const char* key) {
  const std::string value = param<std::string>(p, key);
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  if (value.empty()) throw ConfigError("--" + flag + " is required");
  if (!fs::exists(value)) throw ConfigError("--" + flag + ": no such path " + value);
  return value;
}

std::vector<Sample> load_samples(const fs::path& manifest, int max_images) {
  std::vector<Sample> samples;
  try {
    samples = read_dataset(manifest);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(manifest.string() + ": " + e.what());
  }
  if (max_images >= 0 && std::size_t(max_images) < samples.size()) {
    samples.resize(max_images);
  }
  return samples;
}

std::vector<Tensor3> images_of(const std::vector<Sample>& samples) {
  std::vector<Tensor3> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.image);
  return out;
}

AttackSuiteConfig suite_config(const Params& p) {
  AttackSuiteConfig c;
  c.kind = parse_attack_kind(param<std::string>(p, "variant"));
  const double t = param<double>(p, "t_attack");
  c.sparse.threshold = t;
  c.sparse.max_iter_outer = param<int>(p, "max_iter_outer");
  c.sparse.max_iter_inner = param<int>(p, "max_iter_inner");
  c.sparse.deepfool_margin = param<bool>(p, "deepfool_margin");
  const double eps = param<double>(p, "epsilon");
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw ConfigError("--epsilon is a fraction of the pixel range in (0, 1]");
  }
  c.dense.threshold = t;
  c.dense.epsilon = eps * kPixelMax;
  c.dense.max_iter = param<int>(p, "max_iter");
  c.dense.r_star = param<int>(p, "r_star");
  c.dense.t_s = param<double>(p, "t_s");
  c.workers = param<int>(p, "workers");
  c.seed = param<std::uint64_t>(p, "seed");
  if (c.workers < 1) throw ConfigError("--workers must be at least 1");
  return c;
}

void strip_wall_time(EvalReport& r) {
  r.mean_attack_time_s = 0.0;
  for (ImageRecord& rec : r.records) rec.attack_time_s = 0.0;
}

Params report_json(const EvalReport& r) {
  return {{"attack", r.attack},
          {"model", r.model},
          {"images", r.images},
          {"map_clean", r.map_clean},
          {"map_attack", r.map_attack},
          {"asr", r.asr ? Params(*r.asr) : Params(nullptr)},
          {"success_rate", r.success_rate},
          {"p_l0", r.p_l0},
          {"p_l2", r.p_l2},
          {"linf", r.linf},
          {"mean_attack_time_s", r.mean_attack_time_s}};
}

EvalReport report_from_json(const Params& j) {
  EvalReport r;
  r.attack = j.at("attack").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.images = j.at("images").get<std::size_t>();
  r.map_clean = j.at("map_clean").get<double>();
  r.map_attack = j.at("map_attack").get<double>();
  if (!j.at("asr").is_null()) r.asr = j.at("asr").get<double>();
  return r;
}

void write_json(const fs::path& path, const Params& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

// records.jsonl, summary.csv, summary.txt and report.json under `dir`.
void write_report(const fs::path& dir, const EvalReport& r) {
  const bool wall = !deterministic_mode();
  {
    std::ofstream out = open_out(dir / "records.jsonl");
    write_records(out, r, wall);
  }
  {
    std::ofstream out = open_out(dir / "summary.csv");
    write_summary_csv_header(out);
    write_summary_csv_row(out, r);
  }
  {
    std::ofstream out = open_out(dir / "summary.txt");
    write_summary_table(out, {r});
  }
  write_json(dir / "report.json", report_json(r));
  write_summary_table(std::cout, {r});
}

Tensor3 perturbation_view(const Tensor3& r) {
  const double m = linf_norm(r);
  Tensor3 v(r.shape(), 127.5);
  if (m > 0.0) {
    for (std::size_t i = 0; i < r.size(); ++i) v[i] += r[i] * (127.5 / m);
  }
  return v;
}

std::vector<Tensor3> load_adversarial(const fs::path& run,
                                      const std::vector<Sample>& samples) {
  std::vector<Tensor3> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    const Tensor3 r = read_npy(run / "perturbation" / (s.id + ".npy"));
    if (r.shape() != s.image.shape()) {
      throw IoError("perturbation shape mismatch for " + s.id);
    }
    out.push_back(s.image + r);
  }
  return out;
}

struct RunInputs {
  Params snapshot;
  std::vector<Sample> samples;
  std::vector<Tensor3> adversarial;
  EvalReport origin;
};

RunInputs load_run(const fs::path& run) {
  RunInputs in;
  in.snapshot = read_snapshot(run);
  in.samples = load_samples(require_input(in.snapshot, "data"),
                            param<int>(in.snapshot, "max_images"));
  in.adversarial = load_adversarial(run, in.samples);
  std::ifstream rep(run / "report.json");
  if (!rep) throw IoError("cannot open " + (run / "report.json").string());
  try {
    in.origin = report_from_json(Params::parse(rep));
  } catch (const nlohmann::json::exception& e) {
    throw IoError((run / "report.json").string() + ": " + e.what());
  }
  return in;
}

EvalReport attack_and_evaluate(const ToyCenterNet& det,
                               const std::vector<Sample>& samples,
                               const Params& p,
                               std::vector<ImageAttack>* runs_out) {
  const AttackSuiteConfig c = suite_config(p);
  std::vector<ImageAttack> runs = run_attack_suite(det, samples, c);
  EvalReport r = evaluate_attack(det, samples, results_of(runs), c.workers);
  r.attack = attack_kind_name(c.kind);
  r.model = det.config().variant;
  if (deterministic_mode()) strip_wall_time(r);
  if (runs_out) *runs_out = std::move(runs);
  return r;
}

CategoryTargetSets read_target_file(const fs::path& path, double threshold) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CategoryTargetSets sets(threshold);
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Params j = Params::parse(line);
      TargetPixel t;
      t.original_category = j.at("category").get<int>();
      t.coord = {j.at("row").get<int>(), j.at("col").get<int>()};
      t.original_score = j.at("score").get<double>();
      sets.insert(t);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return sets;
}

struct Trend {
  bool pass = true;
  std::string text;
};

Trend monotone(const std::vector<double>& v, bool increasing,
               const std::string& what) {
  Trend t;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (increasing ? v[i] < v[i - 1] : v[i] > v[i - 1]) t.pass = false;
  }
  t.text = what + (increasing ? " non-decreasing in " : " non-increasing in ");
  return t;
}

}  // namespace

int cmd_gen_data(const Params& p, const fs::path& out) {
  SyntheticConfig c;
  c.categories = param<int>(p, "categories");
  c.image_size = param<int>(p, "image_size");
  c.min_objects = param<int>(p, "min_objects");
  c.max_objects = param<int>(p, "max_objects");
  c.noise_sigma = param<double>(p, "noise_sigma");
  c.seed = param<std::uint64_t>(p, "seed");
  c.max_object_size = std::min(c.max_object_size, c.image_size - 1);
  c.count = param<int>(p, "train_count");
  const int test_count = param<int>(p, "test_count");
  if (c.count < 0 || test_count < 0) throw ConfigError("counts must be non-negative");
  const std::vector<Sample> train = generate_synthetic_dataset(c);
  c.first_index = c.count;
  c.count = test_count;
  const std::vector<Sample> test = generate_synthetic_dataset(c);
  make_dir(out);
  write_dataset(out / "train", "manifest.jsonl", train);
  write_dataset(out / "test", "manifest.jsonl", test);
  write_snapshot(out, "gen-data", p);
  std::cout << "wrote " << train.size() << " train and " << test.size()
            << " test images to " << out.string() << '\n';
  return kExitOk;
}

int cmd_train(const Params& p, const fs::path& out) {
  const std::vector<Sample> data = load_samples(require_input(p, "data"), -1);
  ToyDetectorConfig dc;
  dc.variant = param<std::string>(p, "variant");
  dc.seed = param<std::uint64_t>(p, "seed");
  TrainConfig tc;
  tc.epochs = param<int>(p, "epochs");
  tc.batch_size = param<int>(p, "batch_size");
  tc.learning_rate = param<double>(p, "learning_rate");
  tc.seed = dc.seed;
  std::vector<Sample> test;
  if (!param<std::string>(p, "test_data").empty()) {
    test = load_samples(require_input(p, "test_data"), -1);
  }

  make_dir(out);
  write_snapshot(out, "train", p);
  std::ofstream log = open_out(out / "train_log.jsonl");
  tc.on_epoch = [&](const EpochLog& e) {
    const Params j = {{"epoch", e.epoch},
                      {"loss", e.loss},
                      {"heatmap_loss", e.heatmap_loss},
                      {"size_loss", e.size_loss},
                      {"offset_loss", e.offset_loss},
                      {"learning_rate", e.learning_rate}};
    log << j.dump() << '\n';
    std::cerr << "epoch " << e.epoch << " loss " << e.loss << '\n';
  };
  const TrainResult result = train_toy_detector(data, dc, tc);
  result.detector.save(out / "model.ckpt");
  if (test.empty()) return kExitOk;

  const double gate = param<double>(p, "gate");
  const double map = map_score(
      detect_all(result.detector, images_of(test),
                 result.detector.visual_threshold()),
      ground_truth_of(test));
  const bool pass = map >= gate;
  write_json(out / "gate.json", {{"map", map}, {"gate", gate}, {"pass", pass}});
  std::cout << "held-out mAP " << map << (pass ? " >= " : " < ") << "gate "
            << gate << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_attack(const Params& p, const fs::path& out) {
  const ToyCenterNet det = ToyCenterNet::load(require_input(p, "model"));
  const std::vector<Sample> samples =
      load_samples(require_input(p, "data"), param<int>(p, "max_images"));
  suite_config(p);  // validate before creating the run directory

  for (const char* sub : {"adversarial", "perturbation", "visual", "traces", "targets"}) {
    make_dir(out / sub);
  }
  write_snapshot(out, "attack", p);
  std::vector<ImageAttack> runs;
  const EvalReport report = attack_and_evaluate(det, samples, p, &runs);

  const bool wall = !deterministic_mode();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string& id = samples[i].id;
    const AttackResult& r = runs[i].result;
    write_png(out / "adversarial" / (id + ".png"), r.adversarial);
    write_npy(out / "perturbation" / (id + ".npy"), r.perturbation);
    write_png(out / "visual" / (id + ".png"), perturbation_view(r.perturbation));
    {
      std::ofstream trace = open_out(out / "traces" / (id + ".jsonl"));
      write_trace(trace, r.trace, wall);
    }
    {
      std::ofstream targets = open_out(out / "targets" / (id + ".jsonl"));
      write_target_sets(targets, runs[i].initial_sets);
    }
    if (runs[i].mask) {
      make_dir(out / "masks");
      write_png(out / "masks" / (id + ".png"), runs[i].mask->to_image());
    }
  }
  write_report(out, report);
  return kExitOk;
}

int cmd_eval(const Params& p, const fs::path& out) {
  const ToyCenterNet det = ToyCenterNet::load(require_input(p, "model"));
  const int workers = param<int>(p, "workers");
  EvalReport report;
  if (!param<std::string>(p, "run").empty()) {
    const fs::path run = require_input(p, "run");
    const RunInputs in = load_run(run);
    report = evaluate_images(det, in.samples, in.adversarial, workers);
    report.attack = in.origin.attack;
  } else {
    const std::vector<Sample> samples =
        load_samples(require_input(p, "data"), param<int>(p, "max_images"));
    report = evaluate_images(det, samples, images_of(samples), workers);
    report.attack = "none";
  }
  report.model = det.config().variant;
  make_dir(out);
  write_snapshot(out, "eval", p);
  write_report(out, report);
  return kExitOk;
}

int cmd_transfer(const Params& p, const fs::path& out) {
  const RunInputs in = load_run(require_input(p, "run"));
  const ToyCenterNet target = ToyCenterNet::load(require_input(p, "target_model"));
  TransferReport t = transfer_eval(in.samples, in.adversarial, in.origin, target,
                                   target.config().variant,
                                   param<int>(p, "workers"));
  t.target.attack = in.origin.attack;
  make_dir(out);
  write_snapshot(out, "transfer", p);
  write_json(out / "transfer.json", {{"origin_model", t.origin_model},
                                     {"target_model", t.target_model},
                                     {"attack", t.attack},
                                     {"asr_origin", t.asr_origin},
                                     {"asr_target", t.asr_target},
                                     {"atr", t.atr}});
  write_report(out, t.target);
  std::cout << "ATR " << t.origin_model << " -> " << t.target_model << ": "
            << t.atr << '\n';
  return kExitOk;
}

int cmd_jpeg(const Params& p, const fs::path& out) {
  const fs::path run = require_input(p, "run");
  const RunInputs in = load_run(run);
  const std::string target_path = param<std::string>(p, "target_model").empty()
                                      ? param<std::string>(in.snapshot, "model")
                                      : param<std::string>(p, "target_model");
  const ToyCenterNet target = ToyCenterNet::load(target_path);
  const int quality = param<int>(p, "jpeg_quality");
  JpegReport j = jpeg_transfer_eval(in.samples, in.adversarial, quality, target,
                                    param<int>(p, "workers"));
  j.pre.attack = j.post.attack = in.origin.attack;
  j.pre.model = target.config().variant;
  j.post.model = target.config().variant + "-q" + std::to_string(quality);
  make_dir(out);
  write_snapshot(out, "jpeg", p);
  write_json(out / "jpeg.json", {{"quality", quality},
                                 {"pre", report_json(j.pre)},
                                 {"post", report_json(j.post)}});
  {
    std::ofstream rec = open_out(out / "records.jsonl");
    write_records(rec, j.post, false);
  }
  std::ofstream table = open_out(out / "summary.txt");
  write_summary_table(table, {j.pre, j.post});
  write_summary_table(std::cout, {j.pre, j.post});
  return kExitOk;
}

int cmd_sweep(const Params& p, const fs::path& out) {
  const std::string key = param<std::string>(p, "param");
  static const std::vector<std::string> kSweepable = {"epsilon", "t_attack", "r_star",
                                                      "t_s", "max_iter"};
  if (std::find(kSweepable.begin(), kSweepable.end(), key) == kSweepable.end()) {
    throw ConfigError("--param must be one of epsilon, t_attack, r_star, t_s, max_iter");
  }
  const std::vector<double> values = param<std::vector<double>>(p, "values");
  if (values.empty()) throw ConfigError("--values needs at least one value");
  const bool integral = key == "r_star" || key == "max_iter";
  std::vector<Params> points;
  for (double v : values) {
    Params q = p;
    if (integral) {
      if (v != std::floor(v)) throw ConfigError("--" + key + " values must be integers");
      q[key] = int(v);
    } else {
      q[key] = v;
    }
    suite_config(q);
    points.push_back(std::move(q));
  }
  const ToyCenterNet det = ToyCenterNet::load(require_input(p, "model"));
  const std::vector<Sample> samples =
      load_samples(require_input(p, "data"), param<int>(p, "max_images"));
  make_dir(out);
  write_snapshot(out, "sweep", p);

  std::vector<EvalReport> reports;
  for (const Params& q : points) {
    std::cerr << key << " = " << q[key].dump() << '\n';
    reports.push_back(attack_and_evaluate(det, samples, q, nullptr));
  }

  const std::string stem = "sweep_" + key;
  std::vector<double> asr, p_l0, p_l2, time;
  {
    std::ofstream jsonl = open_out(out / (stem + ".jsonl"));
    std::ofstream csv = open_out(out / (stem + ".csv"));
    csv << "param,value";
    for (const std::string& f : summary_fields()) csv << ',' << f;
    csv << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const EvalReport& r = reports[i];
      Params row = {{"param", key}, {"value", values[i]}};
      const Params summary = report_json(r);
      for (const auto& [k, v] : summary.items()) row[k] = v;
      jsonl << row.dump() << '\n';
      std::ostringstream line;
      write_summary_csv_row(line, r);
      csv << key << ',' << values[i] << ',' << line.str();
      asr.push_back(r.asr.value_or(std::nan("")));
      p_l0.push_back(r.p_l0);
      p_l2.push_back(r.p_l2);
      time.push_back(r.mean_attack_time_s);
    }
  }
  {
    std::ofstream svg = open_out(out / (stem + ".svg"));
    std::vector<Series> series = {{"ASR", asr}, {"P_L0", p_l0}, {"P_L2", p_l2}};
    if (!deterministic_mode()) series.push_back({"time (s)", time});
    write_svg_panels(svg, key, values, series);
  }

  std::vector<Trend> trends;
  if (key == "epsilon") trends.push_back(monotone(asr, true, "ASR"));
  if (key == "t_attack") trends.push_back(monotone(asr, false, "ASR"));
  if (key == "r_star") {
    trends.push_back(monotone(p_l0, true, "P_L0"));
    trends.push_back(monotone(p_l2, true, "P_L2"));
  }
  const bool undefined =
      std::any_of(asr.begin(), asr.end(), [](double a) { return std::isnan(a); });
  std::ofstream notes = open_out(out / "trends.txt");
  for (const Trend& t : trends) {
    const bool ok = t.pass && !(undefined && t.text.rfind("ASR", 0) == 0);
    const std::string line = std::string(ok ? "pass: " : "warn: ") + t.text + key;
    notes << line << '\n';
    std::cout << line << '\n';
  }
  write_summary_table(std::cout, reports);
  return kExitOk;
}

int cmd_inspect_mask(const Params& p, const fs::path& out) {
  const AttackKind kind = parse_attack_kind(param<std::string>(p, "variant"));
  if (kind != AttackKind::kDcaL && kind != AttackKind::kDcaS) {
    throw ConfigError("inspect-mask needs --variant dca-l or dca-s");
  }
  const AttackSuiteConfig c = suite_config(p);
  const std::string targets = param<std::string>(p, "targets");
  const bool need_model = kind == AttackKind::kDcaS || targets.empty();

  std::optional<ToyCenterNet> det;
  if (need_model) det = ToyCenterNet::load(require_input(p, "model"));
  Tensor3 x;
  if (need_model) {
    const std::vector<Sample> samples = load_samples(require_input(p, "data"), -1);
    const int index = param<int>(p, "index");
    if (index < 0 || std::size_t(index) >= samples.size()) {
      throw ConfigError("--index out of range");
    }
    x = samples[index].image;
  }
  const CategoryTargetSets sets =
      targets.empty() ? build_target_sets(infer_heatmaps(*det, x), c.dense.threshold)
                      : read_target_file(require_input(p, "targets"), c.dense.threshold);

  make_dir(out);
  write_snapshot(out, "inspect-mask", p);
  {
    std::ofstream t = open_out(out / "targets.jsonl");
    write_target_sets(t, sets);
  }
  AttackMask mask;
  if (kind == AttackKind::kDcaL) {
    const int size = need_model ? det->input_shape().height : param<int>(p, "image_size");
    const int stride = need_model ? det->output_stride() : ToyCenterNet::kOutputStride;
    mask = generate_local_mask(sets, size, size, stride, c.dense.r_star);
  } else {
    const SemanticMask sm =
        generate_semantic_mask(*det, x, sets, det->feature_layers(), c.dense.t_s);
    mask = sm.mask;
    std::ofstream layers = open_out(out / "layers.jsonl");
    for (const LayerSaliency& l : sm.layers) {
      Tensor3 view = l.normalized;
      view *= kPixelMax;
      write_png(out / ("saliency_" + l.layer_id + ".png"), view);
      write_png(out / ("mask_" + l.layer_id + ".png"), l.mask.to_image());
      layers << Params{{"layer", l.layer_id},
                       {"count", l.mask.count()},
                       {"constant", l.constant}}
                    .dump()
             << '\n';
    }
  }
  write_png(out / "mask.png", mask.to_image());
  Params summary = {{"count", mask.count()}, {"coverage", mask.coverage()}};
  int r0 = mask.height(), r1 = -1, c0 = mask.width(), c1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      r0 = std::min(r0, y);
      r1 = std::max(r1, y);
      c0 = std::min(c0, x);
      c1 = std::max(c1, x);
    }
  }
  // Inclusive bounding box; null for an empty mask.
  summary["rows"] = r1 < 0 ? Params(nullptr) : Params::array({r0, r1});
  summary["cols"] = c1 < 0 ? Params(nullptr) : Params::array({c0, c1});
  write_json(out / "mask.json", summary);
  std::cout << "mask covers " << mask.count() << " pixels (" << mask.coverage()
            << ")\n";
  return kExitOk;
}

}  // namespace catattack::cli
