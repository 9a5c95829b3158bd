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

// Noisy gradient ascent on the class-mean MMD over the free weights.
//
//   w_{i+1} = w_i + L_i grad MMD(w_i) + eps_i,   eps_i ~ N(0, sigma_i^2) per coordinate
//
// L_i and sigma_i are picked from a cost-bracketed schedule. Gradients are
// central finite differences.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "homk/data.hpp"
#include "homk/encoding.hpp"
#include "homk/errors.hpp"
#include "homk/mmd.hpp"

namespace homk {

struct ScheduleRule {
  double cost_low = 0.0;
  double cost_high = std::numeric_limits<double>::infinity();  ///< exclusive
  double learning_rate = 0.1;
  double noise_sigma = 0.0;
};

/// Cost < 1.8: (0.1, 0.5); 1.8 <= cost < 1.9: (0.01, 0.05); cost >= 1.9: (0.001, 0.05).
inline std::vector<ScheduleRule> default_schedule() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{-inf, 1.8, 0.1, 0.5}, {1.8, 1.9, 0.01, 0.05}, {1.9, inf, 0.001, 0.05}};
}

/// Rules must be contiguous, ascending, and cover [0, 2].
inline void validate_schedule(const std::vector<ScheduleRule>& rules) {
  if (rules.empty()) throw DomainError("schedule: no rules");
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const ScheduleRule& r = rules[i];
    if (!(r.learning_rate > 0.0)) throw DomainError("schedule: learning_rate must be positive");
    if (!(r.noise_sigma >= 0.0)) throw DomainError("schedule: noise_sigma must be >= 0");
    if (!(r.cost_low < r.cost_high)) throw DomainError("schedule: empty cost bracket");
    if (i > 0 && rules[i - 1].cost_high != r.cost_low) {
      throw DomainError("schedule: brackets are not contiguous");
    }
  }
  if (rules.front().cost_low > 0.0 || rules.back().cost_high <= 2.0) {
    throw DomainError("schedule: rules do not cover [0, 2]");
  }
}

struct StepParams {
  double learning_rate;
  double noise_sigma;
};

inline StepParams schedule_lookup(double cost_value, const std::vector<ScheduleRule>& rules) {
  for (const ScheduleRule& r : rules) {
    if (cost_value >= r.cost_low && cost_value < r.cost_high) {
      return {r.learning_rate, r.noise_sigma};
    }
  }
  throw DomainError("schedule_lookup: no rule covers cost " + std::to_string(cost_value));
}

struct TrainConfig {
  int iterations = 1000;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
  std::vector<ScheduleRule> schedule = default_schedule();
  /// Initial weights are drawn uniformly from [init_low, init_high].
  double init_low = 0.5;
  double init_high = 1.5;

  void validate() const {
    if (iterations < 0) throw DomainError("TrainConfig: iterations must be >= 0");
    if (!(fd_step > 0.0)) throw DomainError("TrainConfig: fd_step must be positive");
    if (!(init_low <= init_high)) throw DomainError("TrainConfig: init_low > init_high");
    validate_schedule(schedule);
  }
};

inline double json_number_or_inf(const nlohmann::json& j, double inf_value) {
  if (j.is_null()) return inf_value;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("schedule: bad number '" + s + "'");
  }
  return j.get<double>();
}

/// Reads iterations, fd_step, seed, init_low, init_high and schedule (a list of
/// {cost_low, cost_high, learning_rate, noise_sigma}); missing keys keep
/// their defaults. Other keys are ignored.
inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {}) {
  try {
    if (j.contains("iterations")) base.iterations = j.at("iterations").get<int>();
    if (j.contains("fd_step")) base.fd_step = j.at("fd_step").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("init_low")) base.init_low = j.at("init_low").get<double>();
    if (j.contains("init_high")) base.init_high = j.at("init_high").get<double>();
    if (j.contains("schedule")) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      base.schedule.clear();
      for (const auto& r : j.at("schedule")) {
        ScheduleRule rule;
        rule.cost_low = r.contains("cost_low") ? json_number_or_inf(r.at("cost_low"), -inf) : -inf;
        rule.cost_high = r.contains("cost_high") ? json_number_or_inf(r.at("cost_high"), inf) : inf;
        rule.learning_rate = r.at("learning_rate").get<double>();
        rule.noise_sigma = r.at("noise_sigma").get<double>();
        base.schedule.push_back(rule);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  base.validate();
  return base;
}

/// MMD of the class mean embeddings as a function of the weights. Feature
/// maps are applied once up front; each call only reweights and averages.
class MmdCost {
 public:
  MmdCost(const Dataset& data, const FeatureMap& map) {
    mapped_p_ = mapped_columns(data, map, Label::P);
    mapped_q_ = mapped_columns(data, map, Label::Q);
    if (mapped_p_.cols() == 0 || mapped_q_.cols() == 0) {
      throw EmptyClassError("MmdCost: both classes need at least one point");
    }
  }

  int dimension() const { return static_cast<int>(mapped_p_.rows()); }

  ClassMeans means(const WeightVector& w) const {
    if (w.size() != dimension()) throw DomainError("MmdCost: weight count mismatch");
    return {class_mean(mapped_p_, w.values()), class_mean(mapped_q_, w.values())};
  }

  double operator()(const WeightVector& w) const { return mmd(means(w)); }
  double operator()(const Eigen::VectorXd& w) const { return (*this)(WeightVector(w)); }

 private:
  static Eigen::MatrixXd mapped_columns(const Dataset& data, const FeatureMap& map, Label l) {
    std::vector<FeatureVector> cols;
    for (const DataRow& r : data.rows) {
      if (r.label == l) cols.push_back(map(r.features));
    }
    Eigen::MatrixXd out(map.output_dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = cols[i];
    return out;
  }

  // Same arithmetic as mean_embedding(): normalize each weighted point, skip
  // zero-norm ones, average, renormalize.
  static EncodedPhoton class_mean(const Eigen::MatrixXd& mapped, const Eigen::VectorXd& w) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(mapped.rows());
    Eigen::Index used = 0;
    for (Eigen::Index c = 0; c < mapped.cols(); ++c) {
      const Eigen::VectorXd v = w.cwiseProduct(mapped.col(c));
      const double n = v.norm();
      if (n > 0.0 && std::isfinite(n)) {
        sum += v / n;
        ++used;
      }
    }
    if (used == 0) throw EmptyClassError("MmdCost: every point is a degenerate encoding");
    sum /= static_cast<double>(used);
    return EncodedPhoton::normalized(sum.cast<std::complex<double>>());
  }

  Eigen::MatrixXd mapped_p_;
  Eigen::MatrixXd mapped_q_;
};

inline double cost(const WeightVector& weights, const Dataset& train_data, const FeatureMap& map) {
  return MmdCost(train_data, map)(weights);
}

/// Central differences: (f(w + h e_n) - f(w - h e_n)) / 2h per coordinate.
template <class CostFn>
Eigen::VectorXd numerical_gradient(const Eigen::VectorXd& w, CostFn&& cost_fn, double fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("numerical_gradient: fd_step must be positive");
  Eigen::VectorXd grad(w.size());
  Eigen::VectorXd probe = w;
  for (Eigen::Index n = 0; n < w.size(); ++n) {
    probe[n] = w[n] + fd_step;
    const double up = cost_fn(probe);
    probe[n] = w[n] - fd_step;
    const double down = cost_fn(probe);
    probe[n] = w[n];
    grad[n] = (up - down) / (2.0 * fd_step);
  }
  return grad;
}

/// w + lr * grad + eps. Ascent: the gradient is added. No draws when sigma == 0.
template <class Rng>
Eigen::VectorXd sgd_step(const Eigen::VectorXd& w, const Eigen::VectorXd& grad, double lr,
                         double noise_sigma, Rng& rng) {
  if (w.size() != grad.size()) throw DomainError("sgd_step: weight/gradient size mismatch");
  Eigen::VectorXd next = w + lr * grad;
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Eigen::Index n = 0; n < next.size(); ++n) next[n] += noise(rng);
  }
  return next;
}

struct TraceRecord {
  int iteration;
  double cost;
  Eigen::VectorXd weights;
};

/// One record per iteration, plus the initial state at index 0.
struct TrainTrace {
  std::vector<TraceRecord> records;
};

inline void write_trace_csv(std::ostream& os, const TrainTrace& trace) {
  const Eigen::Index n = trace.records.empty() ? 0 : trace.records.front().weights.size();
  os << "iter,cost";
  for (Eigen::Index k = 0; k < n; ++k) os << ",w_" << k;
  os << '\n';
  for (const TraceRecord& r : trace.records) {
    os << r.iteration << ',' << format_double(r.cost);
    for (Eigen::Index k = 0; k < r.weights.size(); ++k) os << ',' << format_double(r.weights[k]);
    os << '\n';
  }
}

struct TrainResult {
  WeightVector best_weights;
  double best_cost;
  WeightVector initial_weights;
  WeightVector final_weights;
  double final_cost;
  TrainTrace trace;
};

/// Thrown when a cost evaluation fails mid-run; carries the trace so far.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& why, TrainTrace partial)
      : std::runtime_error("training aborted: " + why), trace_(std::move(partial)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

/// Runs config.iterations noisy ascent steps from a seeded random start and
/// returns the best-cost weights seen (the last iterate is kept too).
inline TrainResult train(const Dataset& train_data, const FeatureMap& map,
                         const TrainConfig& config) {
  config.validate();
  const MmdCost cost_fn(train_data, map);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(config.init_low, config.init_high);
  Eigen::VectorXd w(cost_fn.dimension());
  for (Eigen::Index n = 0; n < w.size(); ++n) w[n] = init(rng);

  TrainTrace trace;
  trace.records.reserve(static_cast<std::size_t>(config.iterations) + 1);
  double c = 0.0;
  try {
    c = cost_fn(w);
  } catch (const std::exception& e) {
    throw TrainingAborted(e.what(), trace);
  }
  trace.records.push_back({0, c, w});
  const WeightVector initial(w);
  Eigen::VectorXd best = w;
  double best_cost = c;

  for (int i = 1; i <= config.iterations; ++i) {
    try {
      const StepParams step = schedule_lookup(c, config.schedule);
      const Eigen::VectorXd grad = numerical_gradient(w, cost_fn, config.fd_step);
      w = sgd_step(w, grad, step.learning_rate, step.noise_sigma, rng);
      c = cost_fn(w);
    } catch (const std::exception& e) {
      throw TrainingAborted("iteration " + std::to_string(i) + ": " + e.what(), trace);
    }
    trace.records.push_back({i, c, w});
    if (c > best_cost) {
      best_cost = c;
      best = w;
    }
  }
  return {WeightVector(best), best_cost, initial, WeightVector(w), c, std::move(trace)};
}

/// Independent restarts with the given seeds, run concurrently. Results come
/// back in seed order, so the output does not depend on scheduling.
inline std::vector<TrainResult> train_restarts(const Dataset& train_data, const FeatureMap& map,
                                               const TrainConfig& config,
                                               const std::vector<std::uint64_t>& seeds) {
  std::vector<std::future<TrainResult>> jobs;
  jobs.reserve(seeds.size());
  for (std::uint64_t s : seeds) {
    TrainConfig c = config;
    c.seed = s;
    jobs.push_back(std::async(std::launch::async,
                              [&train_data, &map, c] { return train(train_data, map, c); }));
  }
  std::vector<TrainResult> out;
  out.reserve(seeds.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// Per-iteration average cost across restarts.
inline std::vector<double> mean_cost_curve(const std::vector<TrainResult>& runs) {
  if (runs.empty()) return {};
  const std::size_t len = runs.front().trace.records.size();
  std::vector<double> mean(len, 0.0);
  for (const TrainResult& r : runs) {
    if (r.trace.records.size() != len) throw DomainError("mean_cost_curve: trace lengths differ");
    for (std::size_t i = 0; i < len; ++i) mean[i] += r.trace.records[i].cost;
  }
  for (double& m : mean) m /= static_cast<double>(runs.size());
  return mean;
}

}  // namespace homk
