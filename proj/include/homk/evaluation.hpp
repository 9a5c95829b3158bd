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

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "homk/data.hpp"
#include "homk/errors.hpp"
#include "homk/mmd.hpp"

namespace homk {

inline int label_index(Label l) { return l == Label::P ? 0 : 1; }

/// counts[predicted][true], P = 0, Q = 1.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 2>, 2> counts{};

  std::int64_t& at(Label predicted, Label truth) {
    return counts[label_index(predicted)][label_index(truth)];
  }
  std::int64_t at(Label predicted, Label truth) const {
    return counts[label_index(predicted)][label_index(truth)];
  }
  std::int64_t total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  }
  std::int64_t correct() const { return counts[0][0] + counts[1][1]; }
  std::int64_t column_total(Label truth) const {
    return at(Label::P, truth) + at(Label::Q, truth);
  }
  /// Share of true-class `truth` predicted as `predicted`, in percent.
  double percent(Label predicted, Label truth) const {
    const auto col = column_total(truth);
    return col == 0 ? 0.0 : 100.0 * static_cast<double>(at(predicted, truth)) / col;
  }
};

/// Scores keyed by true label.
struct ScoreDistribution {
  std::vector<double> p_scores;
  std::vector<double> q_scores;

  std::vector<double>& of(Label l) { return l == Label::P ? p_scores : q_scores; }
  const std::vector<double>& of(Label l) const { return l == Label::P ? p_scores : q_scores; }
  std::size_t size() const { return p_scores.size() + q_scores.size(); }
};

struct Evaluation {
  ConfusionMatrix matrix;
  ScoreDistribution scores;
  double accuracy = 0.0;
  std::size_t unclassifiable = 0;
};

/// Builds the matrix and score lists from per-row results; nullopt marks an
/// unclassifiable row, which is counted but left out of both.
inline Evaluation tally(const Dataset& dataset,
                        std::span<const std::optional<Classification>> results) {
  if (results.size() != dataset.size()) throw DomainError("tally: result count != row count");
  Evaluation ev;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const Label truth = dataset.rows[i].label;
    if (!results[i]) {
      ++ev.unclassifiable;
      continue;
    }
    ++ev.matrix.at(results[i]->label, truth);
    ev.scores.of(truth).push_back(results[i]->score);
  }
  const auto total = ev.matrix.total();
  ev.accuracy = total == 0 ? 0.0 : static_cast<double>(ev.matrix.correct()) / total;
  return ev;
}

/// Runs `classifier(features) -> Classification` over every row. Rows whose
/// encoding is degenerate (DegenerateEncodingError) are unclassifiable.
template <class Classifier>
Evaluation evaluate(const Dataset& dataset, Classifier&& classifier) {
  if (dataset.empty()) throw DomainError("evaluate: empty dataset");
  std::vector<std::optional<Classification>> results;
  results.reserve(dataset.size());
  for (const DataRow& row : dataset.rows) {
    try {
      results.emplace_back(classifier(row.features));
    } catch (const DegenerateEncodingError&) {
      results.emplace_back(std::nullopt);
    }
  }
  return tally(dataset, results);
}

/// Human-readable table; also writes confusion.csv
/// (`predicted,true,count,percent`, percent normalized per true-label column)
/// and scores.csv (`true_label,score`) into out_dir.
inline std::string render_report(const ConfusionMatrix& matrix, const ScoreDistribution& scores,
                                 double accuracy, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "confusion.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / "confusion.csv").string());
    os << "predicted,true,count,percent\n";
    for (Label pred : {Label::P, Label::Q}) {
      for (Label truth : {Label::P, Label::Q}) {
        os << label_name(pred) << ',' << label_name(truth) << ',' << matrix.at(pred, truth) << ','
           << format_double(matrix.percent(pred, truth)) << '\n';
      }
    }
    if (!os) throw std::runtime_error("write failed: confusion.csv");
  }
  {
    std::ofstream os(out_dir / "scores.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (out_dir / "scores.csv").string());
    os << "true_label,score\n";
    for (Label truth : {Label::P, Label::Q}) {
      for (double s : scores.of(truth)) os << label_name(truth) << ',' << format_double(s) << '\n';
    }
    if (!os) throw std::runtime_error("write failed: scores.csv");
  }

  std::ostringstream text;
  char buf[128];
  text << "                 true P     true Q\n";
  for (Label pred : {Label::P, Label::Q}) {
    std::snprintf(buf, sizeof buf, "predicted %s    %6.2f%%    %6.2f%%\n",
                  std::string(label_name(pred)).c_str(), matrix.percent(pred, Label::P),
                  matrix.percent(pred, Label::Q));
    text << buf;
  }
  std::snprintf(buf, sizeof buf, "accuracy %.4f over %lld points\n", accuracy,
                static_cast<long long>(matrix.total()));
  text << buf;
  return text.str();
}

/// Plain perceptron with bias, trained for a fixed number of epochs over the
/// rows in order; the last iterate is kept. Linear baseline for comparisons
/// with the kernel classifier.
struct Perceptron {
  Eigen::VectorXd w;
  double bias = 0.0;

  Label predict(const FeatureVector& x) const {
    return w.dot(x) + bias >= 0.0 ? Label::Q : Label::P;
  }
};

inline Perceptron train_perceptron(const Dataset& data, int epochs) {
  if (data.empty()) throw DomainError("train_perceptron: empty dataset");
  Perceptron p;
  p.w = Eigen::VectorXd::Zero(data.rows.front().features.size());
  for (int e = 0; e < epochs; ++e) {
    for (const DataRow& r : data.rows) {
      const double target = r.label == Label::Q ? 1.0 : -1.0;
      if (p.predict(r.features) != r.label) {
        p.w += target * r.features;
        p.bias += target;
      }
    }
  }
  return p;
}

inline double accuracy_of(const Perceptron& p, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t ok = 0;
  for (const DataRow& r : data.rows) ok += p.predict(r.features) == r.label;
  return static_cast<double>(ok) / data.size();
}

}  // namespace homk
