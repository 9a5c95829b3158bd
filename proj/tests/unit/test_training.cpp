#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "homk/training.hpp"

namespace homk {
namespace {

const Dataset& blob_data() {
  static const Dataset d = generate_blobs(BlobSpec{});
  return d;
}

TEST(Schedule, TableRows) {
  const auto s = default_schedule();
  auto check = [&](double c, double lr, double sigma) {
    const StepParams p = schedule_lookup(c, s);
    EXPECT_EQ(p.learning_rate, lr) << c;
    EXPECT_EQ(p.noise_sigma, sigma) << c;
  };
  check(1.0, 0.1, 0.5);
  check(1.85, 0.01, 0.05);
  check(1.95, 0.001, 0.05);
  check(0.0, 0.1, 0.5);
  check(1.8, 0.01, 0.05);
  check(1.9, 0.001, 0.05);
  check(2.0, 0.001, 0.05);
}

TEST(Schedule, Validation) {
  EXPECT_NO_THROW(validate_schedule(default_schedule()));
  EXPECT_THROW(validate_schedule({}), DomainError);
  EXPECT_THROW(validate_schedule({{0.0, 1.0, 0.1, 0.0}}), DomainError);
  EXPECT_THROW(validate_schedule({{0.0, 1.0, 0.1, 0.0}, {1.5, 3.0, 0.1, 0.0}}), DomainError);
  EXPECT_THROW(validate_schedule({{0.0, 3.0, 0.0, 0.0}}), DomainError);
  EXPECT_THROW(validate_schedule({{0.0, 3.0, 0.1, -1.0}}), DomainError);
}

TEST(Gradient, ConstantAndQuadratic) {
  Eigen::VectorXd w(2);
  w << 1.0, 2.0;
  const Eigen::VectorXd zero = numerical_gradient(w, [](const Eigen::VectorXd&) { return 3.0; }, 1e-4);
  EXPECT_EQ(zero, Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd g = numerical_gradient(w, [](const Eigen::VectorXd& v) { return v.squaredNorm(); }, 1e-4);
  EXPECT_NEAR(g[0], 2.0, 1e-7);
  EXPECT_NEAR(g[1], 4.0, 1e-7);
  EXPECT_THROW(numerical_gradient(w, [](const Eigen::VectorXd&) { return 0.0; }, 0.0), DomainError);
}

TEST(Gradient, WeightedQuadraticRelative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd c(5), w(5);
    for (int i = 0; i < 5; ++i) {
      c[i] = u(rng);
      w[i] = u(rng);
    }
    const Eigen::VectorXd g =
        numerical_gradient(w, [&c](const Eigen::VectorXd& v) { return c.dot(v.cwiseAbs2()); }, 1e-4);
    const Eigen::VectorXd want = 2.0 * c.cwiseProduct(w);
    EXPECT_LE((g - want).norm(), 1e-6 * want.norm());
  }
}

TEST(Gradient, StepRefinementOnBlobCost) {
  const MmdCost cost_fn(blob_data(), FeatureMap::polynomial2());
  Eigen::VectorXd w(3);
  w << 0.9, 1.2, 1.4;
  const Eigen::VectorXd g1 = numerical_gradient(w, cost_fn, 1e-4);
  const Eigen::VectorXd g2 = numerical_gradient(w, cost_fn, 1e-5);
  EXPECT_LE((g1 - g2).norm(), 1e-4 * g2.norm());
}

TEST(SgdStep, Examples) {
  std::mt19937_64 rng(1);
  Eigen::VectorXd w(3), g(3);
  w << 1, 0, 0;
  g << 0, 1, 0;
  EXPECT_EQ(sgd_step(w, Eigen::VectorXd::Zero(3), 0.1, 0.0, rng), w);
  const Eigen::VectorXd next = sgd_step(w, g, 0.1, 0.0, rng);
  EXPECT_EQ(next, (Eigen::VectorXd(3) << 1, 0.1, 0).finished());
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(sgd_step(w, g, 0.1, 0.5, a), sgd_step(w, g, 0.1, 0.5, b));
  EXPECT_THROW(sgd_step(w, Eigen::VectorXd::Zero(2), 0.1, 0.0, rng), DomainError);
}

TEST(Cost, ExtremesAndEmptyClass) {
  Dataset d;
  d.rows.push_back({(FeatureVector(2) << 1, 0).finished(), Label::P});
  d.rows.push_back({(FeatureVector(2) << 0, 1).finished(), Label::Q});
  EXPECT_NEAR(cost(WeightVector::ones(3), d, FeatureMap::polynomial2()), 2.0, 1e-12);
  Dataset same = d;
  same.rows[1].features = same.rows[0].features;
  EXPECT_NEAR(cost(WeightVector::ones(3), same, FeatureMap::polynomial2()), 0.0, 1e-12);
  Dataset one_class = d;
  one_class.rows.pop_back();
  EXPECT_THROW(MmdCost(one_class, FeatureMap::polynomial2()), EmptyClassError);
}

TEST(Cost, MatchesMeanEmbeddingPath) {
  const Dataset& d = blob_data();
  const FeatureMap m = FeatureMap::polynomial2();
  const WeightVector w((Eigen::VectorXd(3) << 0.7, 1.3, -2.0).finished());
  const auto p = d.features_of(Label::P);
  const auto q = d.features_of(Label::Q);
  const ClassMeans slow{mean_embedding(p, m, w).mean, mean_embedding(q, m, w).mean};
  EXPECT_NEAR(cost(w, d, m), mmd(slow), 1e-12);
}

TEST(Cost, UntrainedBlobsNearlyParallel) {
  EXPECT_LT(cost(WeightVector::ones(3), blob_data(), FeatureMap::polynomial2()), 0.5);
}

TEST(Train, ZeroIterations) {
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainResult r = train(blob_data(), FeatureMap::polynomial2(), cfg);
  EXPECT_EQ(r.trace.records.size(), 1u);
  EXPECT_EQ(r.best_weights, r.initial_weights);
  for (int k = 0; k < 3; ++k) {
    EXPECT_GE(r.initial_weights[k], 0.5);
    EXPECT_LE(r.initial_weights[k], 1.5);
  }
}

TEST(Train, DeterministicAndBounded) {
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.seed = 17;
  const TrainResult a = train(blob_data(), FeatureMap::polynomial2(), cfg);
  const TrainResult b = train(blob_data(), FeatureMap::polynomial2(), cfg);
  ASSERT_EQ(a.trace.records.size(), 201u);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a.trace);
  write_trace_csv(sb, b.trace);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "iter,cost,w_0,w_1,w_2");
  double best = 0.0;
  for (const TraceRecord& r : a.trace.records) {
    EXPECT_GE(r.cost, 0.0);
    EXPECT_LE(r.cost, 2.0 + 1e-10);
    best = std::max(best, r.cost);
  }
  EXPECT_EQ(best, a.best_cost);
  EXPECT_EQ(a.final_cost, a.trace.records.back().cost);
}

TEST(Train, NoiselessAscentIsMonotone) {
  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.schedule = {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.001, 0.0}};
  const TrainResult r = train(blob_data(), FeatureMap::polynomial2(), cfg);
  for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
    EXPECT_GE(r.trace.records[i].cost, r.trace.records[i - 1].cost - 1e-12) << i;
  }
  EXPECT_GT(r.final_cost, r.trace.records.front().cost);
}

TEST(Train, DefaultRunReachesTopBracket) {
  const TrainResult r = train(blob_data(), FeatureMap::polynomial2(), TrainConfig{});
  EXPECT_GE(r.best_cost, 1.9);
}

TEST(Train, RestartsKeepSeedOrder) {
  TrainConfig cfg;
  cfg.iterations = 20;
  const auto runs = train_restarts(blob_data(), FeatureMap::polynomial2(), cfg, {5, 6, 7});
  ASSERT_EQ(runs.size(), 3u);
  cfg.seed = 6;
  EXPECT_EQ(runs[1].best_cost, train(blob_data(), FeatureMap::polynomial2(), cfg).best_cost);
  const auto curve = mean_cost_curve(runs);
  ASSERT_EQ(curve.size(), 21u);
  EXPECT_NEAR(curve[0], (runs[0].trace.records[0].cost + runs[1].trace.records[0].cost +
                         runs[2].trace.records[0].cost) / 3.0, 1e-15);
}

TEST(Train, AbortsWithPartialTrace) {
  Dataset d;
  d.rows.push_back({(FeatureVector(2) << 0, 1).finished(), Label::P});
  d.rows.push_back({(FeatureVector(2) << 1, 0).finished(), Label::Q});
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.init_low = 0.0;
  cfg.init_high = 0.0;
  // All-zero initial weights: the very first cost evaluation fails.
  try {
    train(d, FeatureMap::polynomial2(), cfg);
    FAIL() << "expected TrainingAborted";
  } catch (const TrainingAborted& e) {
    EXPECT_TRUE(e.trace().records.empty());
  }
}

TEST(Config, JsonParsing) {
  const auto j = nlohmann::json::parse(R"({"iterations": 7, "seed": 3, "fd_step": 1e-5,
    "schedule": [{"cost_low": null, "cost_high": 1.0, "learning_rate": 0.2, "noise_sigma": 0.0},
                 {"cost_low": 1.0, "cost_high": "inf", "learning_rate": 0.02, "noise_sigma": 0.1}]})");
  const TrainConfig c = train_config_from_json(j);
  EXPECT_EQ(c.iterations, 7);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.fd_step, 1e-5);
  ASSERT_EQ(c.schedule.size(), 2u);
  EXPECT_EQ(schedule_lookup(1.5, c.schedule).learning_rate, 0.02);
  EXPECT_THROW(train_config_from_json(nlohmann::json::parse(R"({"iterations": "x"})")), ParseError);
  EXPECT_THROW(train_config_from_json(nlohmann::json::parse(R"({"fd_step": -1})")), DomainError);
}

}  // namespace
}  // namespace homk
