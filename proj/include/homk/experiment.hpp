// Copyright 2026 The homkernel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The end-to-end blob experiment behind the `homk` command line tool:
// generate -> train -> dip -> classify -> report. Every step reads and writes
// plain CSV files in one output directory, so each can be rerun on its own.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "homk/data.hpp"
#include "homk/encoding.hpp"
#include "homk/evaluation.hpp"
#include "homk/interference.hpp"
#include "homk/mmd.hpp"
#include "homk/modes.hpp"
#include "homk/training.hpp"

namespace homk {

struct ExperimentConfig {
  BlobSpec blobs;  ///< blobs.seed is the training-data seed
  std::uint64_t test_seed = 2;
  std::string feature_map = "poly2";
  int mode_order = 3;
  double t_max = 12.0;
  int n_points = 4001;
  TrainConfig train;
  std::int64_t shots = 0;  ///< 0: exact kernels
  std::filesystem::path output = "out";
  double dip_min = -5.0;
  double dip_max = 5.0;
  int dip_steps = 201;

  FeatureMap make_map() const {
    if (feature_map == "poly2") return FeatureMap::polynomial2();
    if (feature_map == "identity") return FeatureMap::identity(2);
    throw DomainError("unknown feature_map '" + feature_map + "' (expected poly2 or identity)");
  }

  ModeBasis make_basis() const { return ModeBasis(mode_order, TimeGrid(t_max, n_points)); }

  std::vector<double> delays() const { return linspace(dip_min, dip_max, dip_steps); }

  void validate() const {
    blobs.validate();
    train.validate();
    if (make_map().output_dim() != mode_order) {
      throw DomainError("mode_order " + std::to_string(mode_order) +
                        " must equal the feature map output dimension " +
                        std::to_string(make_map().output_dim()));
    }
    if (test_seed == blobs.seed) throw DomainError("test_seed must differ from data_seed");
    if (shots < 0) throw DomainError("shots must be >= 0");
  }
};

inline Label label_from_json(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s == "P") return Label::P;
  if (s == "Q") return Label::Q;
  throw ParseError("grouping: unknown label '" + s + "'");
}

/// Flat key-value document; unknown keys are rejected so typos surface.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    ExperimentConfig base = {}) {
  static const std::vector<std::string> known = {
      "data_seed", "test_seed", "seed",       "iterations", "fd_step",     "schedule",
      "init_low",  "init_high", "sigma",      "points_per_blob", "centers", "grouping",
      "feature_map", "mode_order", "t_max",   "n_points",   "shots",       "output",
      "dip_min",   "dip_max",   "dip_steps"};
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  try {
    if (j.contains("data_seed")) base.blobs.seed = j.at("data_seed").get<std::uint64_t>();
    if (j.contains("test_seed")) base.test_seed = j.at("test_seed").get<std::uint64_t>();
    if (j.contains("sigma")) base.blobs.sigma = j.at("sigma").get<double>();
    if (j.contains("points_per_blob")) base.blobs.points_per_blob = j.at("points_per_blob").get<int>();
    if (j.contains("centers")) {
      const auto& c = j.at("centers");
      if (c.size() != 4) throw ParseError("config: centers needs exactly four points");
      for (std::size_t b = 0; b < 4; ++b) {
        if (c[b].size() != 2) throw ParseError("config: each center needs two coordinates");
        base.blobs.centers[b] = {c[b][0].get<double>(), c[b][1].get<double>()};
      }
    }
    if (j.contains("grouping")) {
      const auto& g = j.at("grouping");
      if (g.size() != 4) throw ParseError("config: grouping needs four labels");
      for (std::size_t b = 0; b < 4; ++b) base.blobs.grouping[b] = label_from_json(g[b]);
    }
    if (j.contains("feature_map")) base.feature_map = j.at("feature_map").get<std::string>();
    if (j.contains("mode_order")) base.mode_order = j.at("mode_order").get<int>();
    if (j.contains("t_max")) base.t_max = j.at("t_max").get<double>();
    if (j.contains("n_points")) base.n_points = j.at("n_points").get<int>();
    if (j.contains("shots")) base.shots = j.at("shots").get<std::int64_t>();
    if (j.contains("output")) base.output = j.at("output").get<std::string>();
    if (j.contains("dip_min")) base.dip_min = j.at("dip_min").get<double>();
    if (j.contains("dip_max")) base.dip_max = j.at("dip_max").get<double>();
    if (j.contains("dip_steps")) base.dip_steps = j.at("dip_steps").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  base.train = train_config_from_json(j, base.train);
  return base;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

inline ClassMeans class_means(const Dataset& data, const FeatureMap& map,
                              const WeightVector& weights) {
  const auto p = data.features_of(Label::P);
  const auto q = data.features_of(Label::Q);
  if (p.empty() || q.empty()) throw EmptyClassError("class_means: both classes need points");
  return {mean_embedding(p, map, weights).mean, mean_embedding(q, map, weights).mean};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// generate

inline void cmd_generate(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output);
  const Dataset train = generate_blobs(cfg.blobs);
  const Dataset test = generate_test_set(cfg.blobs, cfg.test_seed);
  write_dataset((cfg.output / "train.csv").string(), train);
  write_dataset((cfg.output / "test.csv").string(), test);
  log << "train.csv: " << train.size() << " rows (" << train.count(Label::P) << " P, "
      << train.count(Label::Q) << " Q)\n"
      << "test.csv: " << test.size() << " rows (" << test.count(Label::P) << " P, "
      << test.count(Label::Q) << " Q)\n";
}

// ---------------------------------------------------------------------------
// train

/// weights.csv: header `which,w_0,...`, rows initial, best, final.
inline std::string weights_csv(const TrainResult& r) {
  std::ostringstream os;
  os << "which";
  for (int k = 0; k < r.best_weights.size(); ++k) os << ",w_" << k;
  os << '\n';
  const std::pair<const char*, const WeightVector*> rows[] = {
      {"initial", &r.initial_weights}, {"best", &r.best_weights}, {"final", &r.final_weights}};
  for (const auto& [name, w] : rows) {
    os << name;
    for (int k = 0; k < w->size(); ++k) os << ',' << format_double((*w)[k]);
    os << '\n';
  }
  return os.str();
}

inline WeightVector load_weights(const std::filesystem::path& path, const std::string& which) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path.string() + " (run `train` first)");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line.rfind("which", 0) != 0) {
    throw ParseError("weights file: missing header", line_no);
  }
  while (std::getline(is, line)) {
    ++line_no;
    const auto fields = split_commas(line);
    if (fields.empty() || fields[0] != which) continue;
    Eigen::VectorXd w(static_cast<Eigen::Index>(fields.size() - 1));
    for (std::size_t k = 1; k < fields.size(); ++k) w[k - 1] = parse_double(fields[k], line_no, "weight");
    return WeightVector(std::move(w));
  }
  throw ParseError("weights file has no '" + which + "' row");
}

inline TrainResult cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Dataset data = read_dataset((cfg.output / "train.csv").string());
  const TrainResult r = train(data, cfg.make_map(), cfg.train);
  std::ostringstream trace;
  write_trace_csv(trace, r.trace);
  write_text_file(cfg.output / "trace.csv", trace.str());
  write_text_file(cfg.output / "weights.csv", weights_csv(r));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "initial MMD %.6f\nfinal MMD %.6f (best weights)\nlast-iterate MMD %.6f\n",
                r.trace.records.front().cost, r.best_cost, r.final_cost);
  log << buf;
  return r;
}

// ---------------------------------------------------------------------------
// dip

enum class DipPair { kMeans, kPointVsMean };

struct DipOptions {
  bool untrained = false;
  DipPair pair = DipPair::kMeans;
  std::size_t row = 0;        ///< test.csv row for kPointVsMean
  Label mean = Label::Q;      ///< class mean for kPointVsMean
};

inline WeightVector experiment_weights(const ExperimentConfig& cfg, bool untrained) {
  if (untrained) return WeightVector::ones(cfg.mode_order);
  WeightVector w = load_weights(cfg.output / "weights.csv", "best");
  if (w.size() != cfg.mode_order) throw ParseError("weights.csv: weight count != mode_order");
  return w;
}

inline std::string dip_file_name(bool untrained) {
  return untrained ? "dip_untrained.csv" : "dip.csv";
}

inline DipCurve cmd_dip(const ExperimentConfig& cfg, const DipOptions& opt, std::ostream& log) {
  cfg.validate();
  const FeatureMap map = cfg.make_map();
  const WeightVector w = experiment_weights(cfg, opt.untrained);
  const Dataset train = read_dataset((cfg.output / "train.csv").string());
  const ClassMeans means = class_means(train, map, w);
  const ModeBasis basis = cfg.make_basis();

  DipCurve curve;
  if (opt.pair == DipPair::kMeans) {
    curve = dip_curve(means.mu_p, means.mu_q, basis, cfg.delays());
  } else {
    const Dataset test = read_dataset((cfg.output / "test.csv").string());
    if (opt.row >= test.size()) throw DomainError("dip: row index past the end of test.csv");
    const EncodedPhoton x = encode(test.rows[opt.row].features, map, w);
    curve = dip_curve(x, opt.mean == Label::P ? means.mu_p : means.mu_q, basis, cfg.delays());
  }
  std::ostringstream os;
  write_dip_csv(os, curve);
  write_text_file(cfg.output / dip_file_name(opt.untrained), os.str());

  double min_cc = 1.0;
  double at = 0.0;
  for (const DipSample& s : curve.samples) {
    if (s.cc < min_cc) {
      min_cc = s.cc;
      at = s.delay;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s: min CC %.6f at dt = %.4f\n",
                dip_file_name(opt.untrained).c_str(), min_cc, at);
  log << buf;
  return curve;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
  bool untrained = false;
  bool single_mean = false;
  std::optional<std::filesystem::path> input;  ///< default: <output>/test.csv
};

inline std::string predictions_file_name(bool untrained) {
  return untrained ? "predictions_untrained.csv" : "predictions.csv";
}

/// Seeds for shot-sampled comparisons of row i: base + 2i (vs mu_Q) and
/// base + 2i + 1 (vs mu_P); the calibration run uses base - 1.
inline std::uint64_t shot_seed_base(const ExperimentConfig& cfg) { return cfg.train.seed + 1000003; }

inline double estimated_kernel(const EncodedPhoton& a, const EncodedPhoton& b, std::int64_t shots,
                               std::uint64_t seed) {
  return 1.0 - sample_coincidences(a, b, shots, seed).estimate;
}

/// Writes `x1,x2,score,label,true_label`; unclassifiable rows get score nan
/// and label NA. Returns the evaluation of the classified rows.
inline std::optional<Evaluation> cmd_classify(const ExperimentConfig& cfg,
                                              const ClassifyOptions& opt, std::ostream& log) {
  cfg.validate();
  const FeatureMap map = cfg.make_map();
  const WeightVector w = experiment_weights(cfg, opt.untrained);
  const Dataset train = read_dataset((cfg.output / "train.csv").string());
  const ClassMeans means = class_means(train, map, w);
  const Dataset input =
      read_dataset(opt.input ? opt.input->string() : (cfg.output / "test.csv").string());

  const std::uint64_t base = shot_seed_base(cfg);
  double calibration = kernel(means.mu_p, means.mu_q);
  if (cfg.shots > 0) calibration = estimated_kernel(means.mu_p, means.mu_q, cfg.shots, base - 1);

  auto classify_row = [&](const FeatureVector& x, std::size_t index) -> Classification {
    const std::uint64_t seed = base + 2 * index;
    const EncodedPhoton photon = encode(x, map, w);
    if (cfg.shots > 0) {
      const double kq = estimated_kernel(photon, means.mu_q, cfg.shots, seed);
      Classification c;
      if (opt.single_mean) {
        c.score = kq - single_mean_threshold(calibration);
        c.degenerate_calibration = calibration >= 1.0;
      } else {
        c.score = kq - estimated_kernel(photon, means.mu_p, cfg.shots, seed + 1);
      }
      c.label = c.score >= 0.0 ? Label::Q : Label::P;
      return c;
    }
    return opt.single_mean ? classify_single_mean(photon, means.mu_q, calibration)
                           : classify(photon, means);
  };

  std::vector<std::optional<Classification>> results;
  results.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    try {
      results.emplace_back(classify_row(input.rows[i].features, i));
    } catch (const DegenerateEncodingError&) {
      results.emplace_back(std::nullopt);
    }
  }

  std::ostringstream os;
  os << "x1,x2,score,label,true_label\n";
  bool warned = false;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const DataRow& row = input.rows[i];
    os << format_double(row.features[0]) << ',' << format_double(row.features[1]) << ',';
    if (const auto& c = results[i]) {
      if (c->degenerate_calibration && !warned) {
        log << "warning: calibration |<mu_P|mu_Q>|^2 = 1, single-mean threshold is 0\n";
        warned = true;
      }
      os << format_double(c->score) << ',' << label_name(c->label);
    } else {
      os << "nan,NA";
    }
    os << ',' << label_name(row.label) << '\n';
  }
  write_text_file(cfg.output / predictions_file_name(opt.untrained), os.str());
  if (input.empty()) {
    log << predictions_file_name(opt.untrained) << ": no rows\n";
    return std::nullopt;
  }
  const Evaluation ev = tally(input, results);
  if (ev.unclassifiable > 0) log << "warning: " << ev.unclassifiable << " unclassifiable rows\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: accuracy %.4f (%s%s)\n",
                predictions_file_name(opt.untrained).c_str(), ev.accuracy,
                opt.single_mean ? "single-mean rule" : "two-mean rule",
                cfg.shots > 0 ? ", shot-sampled" : "");
  log << buf;
  return ev;
}

// ---------------------------------------------------------------------------
// report

/// Rebuilds the evaluation from a predictions file.
inline Evaluation evaluation_from_predictions(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path.string() + " (run `classify` first)");
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(is, line) || line != "x1,x2,score,label,true_label") {
    throw ParseError(path.string() + ": bad header", line_no);
  }
  Evaluation ev;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 5) throw ParseError(path.string() + ": expected 5 fields", line_no);
    const Label truth = parse_label(f[4], line_no);
    if (f[3] == "NA") {
      ++ev.unclassifiable;
      continue;
    }
    const Label pred = parse_label(f[3], line_no);
    ++ev.matrix.at(pred, truth);
    ev.scores.of(truth).push_back(parse_double(f[2], line_no, "score"));
  }
  const auto total = ev.matrix.total();
  ev.accuracy = total == 0 ? 0.0 : static_cast<double>(ev.matrix.correct()) / total;
  return ev;
}

/// Before/after comparison: report/untrained/ and report/trained/.
inline void cmd_report(const ExperimentConfig& cfg, std::ostream& log) {
  const std::pair<const char*, bool> stages[] = {{"untrained", true}, {"trained", false}};
  std::vector<std::pair<std::string, Evaluation>> evals;
  for (const auto& [name, untrained] : stages) {
    evals.emplace_back(name, evaluation_from_predictions(cfg.output / predictions_file_name(untrained)));
  }
  for (const auto& [name, ev] : evals) {
    const std::string table =
        render_report(ev.matrix, ev.scores, ev.accuracy, cfg.output / "report" / name);
    log << "== " << name << " ==\n" << table;
    if (ev.unclassifiable > 0) log << ev.unclassifiable << " unclassifiable rows excluded\n";
  }
}

/// All steps in order, untrained and trained where both apply.
inline void cmd_run(const ExperimentConfig& cfg, bool single_mean, std::ostream& log) {
  cmd_generate(cfg, log);
  cmd_train(cfg, log);
  for (bool untrained : {true, false}) {
    cmd_dip(cfg, DipOptions{.untrained = untrained}, log);
    cmd_classify(cfg, ClassifyOptions{.untrained = untrained, .single_mean = single_mean, .input = std::nullopt}, log);
  }
  cmd_report(cfg, log);
}

}  // namespace homk
