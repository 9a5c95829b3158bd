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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "homk/homk.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<std::string> output;
  std::optional<std::int64_t> shots;
  bool single_mean = false;
  bool untrained = false;
  std::optional<std::string> input;
  std::string pair = "means";
  std::size_t row = 0;
  std::string mean = "Q";
};

homk::ExperimentConfig resolve(const Flags& f) {
  homk::ExperimentConfig cfg;
  if (!f.config.empty()) cfg = homk::load_experiment_config(f.config);
  if (f.seed) cfg.train.seed = *f.seed;
  if (f.iterations) cfg.train.iterations = *f.iterations;
  if (f.output) cfg.output = *f.output;
  if (f.shots) cfg.shots = *f.shots;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hong-Ou-Mandel kernel classifier: data, training, dips, classification"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "training seed");
  app.add_option("--iterations", f.iterations, "training iterations");
  app.add_option("--output", f.output, "output directory");
  app.add_option("--shots", f.shots, "coincidence shots per comparison (0 = exact)");

  auto* gen = app.add_subcommand("generate", "write train.csv and test.csv");
  auto* train = app.add_subcommand("train", "optimize weights, write trace.csv and weights.csv");
  auto* dip = app.add_subcommand("dip", "coincidence-vs-delay curve");
  auto* cls = app.add_subcommand("classify", "label test points");
  auto* rep = app.add_subcommand("report", "confusion matrices before and after training");
  auto* run = app.add_subcommand("run", "all of the above in order");
  for (auto* s : {gen, train, dip, cls, rep, run}) s->fallthrough();

  dip->add_flag("--untrained", f.untrained, "use unit weights");
  dip->add_option("--pair", f.pair, "means | point")->check(CLI::IsMember({"means", "point"}));
  dip->add_option("--row", f.row, "test.csv row for --pair point");
  dip->add_option("--mean", f.mean, "class mean for --pair point")->check(CLI::IsMember({"P", "Q"}));
  cls->add_flag("--untrained", f.untrained, "use unit weights");
  cls->add_flag("--single-mean", f.single_mean, "compare against mu_Q only");
  cls->add_option("--input", f.input, "dataset to classify (default <output>/test.csv)");
  run->add_flag("--single-mean", f.single_mean, "compare against mu_Q only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const homk::ExperimentConfig cfg = resolve(f);
    std::ostream& log = std::cout;
    if (gen->parsed()) {
      homk::cmd_generate(cfg, log);
    } else if (train->parsed()) {
      homk::cmd_train(cfg, log);
    } else if (dip->parsed()) {
      homk::DipOptions opt;
      opt.untrained = f.untrained;
      opt.pair = f.pair == "point" ? homk::DipPair::kPointVsMean : homk::DipPair::kMeans;
      opt.row = f.row;
      opt.mean = f.mean == "P" ? homk::Label::P : homk::Label::Q;
      homk::cmd_dip(cfg, opt, log);
    } else if (cls->parsed()) {
      homk::ClassifyOptions opt;
      opt.untrained = f.untrained;
      opt.single_mean = f.single_mean;
      if (f.input) opt.input = *f.input;
      homk::cmd_classify(cfg, opt, log);
    } else if (rep->parsed()) {
      homk::cmd_report(cfg, log);
    } else if (run->parsed()) {
      homk::cmd_run(cfg, f.single_mean, log);
    }
  } catch (const homk::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const homk::EmptyClassError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const homk::TrainingAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const homk::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
