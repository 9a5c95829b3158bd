#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "homk/encoding.hpp"

namespace homk {
namespace {

FeatureVector fv(double a, double b) {
  FeatureVector x(2);
  x << a, b;
  return x;
}

WeightVector wv(std::initializer_list<double> v) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) w[i++] = d;
  return WeightVector(w);
}

void expect_amps(const EncodedPhoton& p, std::initializer_list<double> want, double tol = 1e-12) {
  ASSERT_EQ(p.size(), static_cast<int>(want.size()));
  int i = 0;
  for (double v : want) {
    EXPECT_NEAR(p[i].real(), v, tol) << "i=" << i;
    EXPECT_NEAR(p[i].imag(), 0.0, tol);
    ++i;
  }
}

TEST(FeatureMap, PolynomialExamples) {
  const FeatureMap m = FeatureMap::polynomial2();
  EXPECT_EQ(m(fv(1, 2)), (FeatureVector(3) << 1, 4, 2).finished());
  EXPECT_EQ(m(fv(0, 0)), FeatureVector::Zero(3));
  EXPECT_EQ(m(fv(-1, 1)), (FeatureVector(3) << 1, 1, -1).finished());
}

TEST(FeatureMap, Errors) {
  const FeatureMap m = FeatureMap::polynomial2();
  EXPECT_THROW(m(FeatureVector::Ones(3)), DomainError);
  EXPECT_THROW(m(fv(NAN, 1)), DomainError);
  const FeatureMap bad = FeatureMap::custom(2, 2, [](const FeatureVector&) { return FeatureVector::Ones(3); });
  EXPECT_THROW(bad(fv(1, 1)), DomainError);
}

TEST(WeightVector, Invariants) {
  EXPECT_THROW(WeightVector(Eigen::VectorXd::Zero(3)), DomainError);
  EXPECT_THROW(wv({1.0, NAN}), DomainError);
  EXPECT_THROW(WeightVector(Eigen::VectorXd()), DomainError);
  EXPECT_NO_THROW(wv({-1.0, 0.0, 2.0}));
}

TEST(Encode, SpecExamples) {
  const FeatureMap m = FeatureMap::polynomial2();
  expect_amps(encode(fv(1, 0), m, WeightVector::ones(3)), {1, 0, 0});
  const double r3 = 1 / std::sqrt(3.0);
  expect_amps(encode(fv(1, 1), m, WeightVector::ones(3)), {r3, r3, r3});
  const double r6 = 1 / std::sqrt(6.0);
  expect_amps(encode(fv(1, 1), m, wv({2, 1, 1})), {2 * r6, r6, r6});
}

TEST(Encode, DegenerateRejected) {
  const FeatureMap m = FeatureMap::polynomial2();
  EXPECT_THROW(encode(fv(0, 0), m, WeightVector::ones(3)), DegenerateEncodingError);
  // Weight zeroes the only nonzero coordinate.
  EXPECT_THROW(encode(fv(1, 0), m, wv({0, 1, 1})), DegenerateEncodingError);
  EXPECT_THROW(encode(fv(1, 0), m, WeightVector::ones(4)), DomainError);
}

TEST(Encode, UnitNormAndScaleInvariance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const FeatureMap m = FeatureMap::polynomial2();
  for (int trial = 0; trial < 200; ++trial) {
    const FeatureVector x = fv(g(rng), g(rng));
    const WeightVector w = wv({g(rng), g(rng), g(rng)});
    const EncodedPhoton a = encode(x, m, w);
    EXPECT_NEAR(a.amplitudes().squaredNorm(), 1.0, 1e-12);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      const EncodedPhoton b = encode(x, m, WeightVector(c * w.values()));
      EXPECT_LE((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(EncodedPhoton, Constructors) {
  EXPECT_THROW(EncodedPhoton::normalized(Amplitudes::Zero(3)), DegenerateEncodingError);
  EXPECT_THROW(EncodedPhoton::from_unit(Amplitudes::Ones(3)), DomainError);
  const EncodedPhoton e = EncodedPhoton::basis_state(2, 4);
  expect_amps(e, {0, 0, 1, 0});
  EXPECT_THROW(EncodedPhoton::basis_state(4, 4), DomainError);
}

TEST(MeanEmbedding, SpecExamples) {
  const FeatureMap id = FeatureMap::identity(3);
  const std::vector<FeatureVector> two = {(FeatureVector(3) << 1, 0, 0).finished(),
                                          (FeatureVector(3) << 0, 1, 0).finished()};
  const double r2 = 1 / std::sqrt(2.0);
  expect_amps(mean_embedding(two, id, WeightVector::ones(3)).mean, {r2, r2, 0});

  const FeatureMap m = FeatureMap::polynomial2();
  const std::vector<FeatureVector> same = {fv(0.4, -1.3), fv(0.4, -1.3)};
  const EncodedPhoton single = encode(same[0], m, WeightVector::ones(3));
  EXPECT_LE((mean_embedding(same, m, WeightVector::ones(3)).mean.amplitudes() - single.amplitudes())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  const std::vector<FeatureVector> one = {fv(2.0, 0.5)};
  EXPECT_LE((mean_embedding(one, m, wv({1, 2, 3})).mean.amplitudes() -
             encode(one[0], m, wv({1, 2, 3})).amplitudes())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(MeanEmbedding, SkipsDegenerateAndRejectsEmpty) {
  const FeatureMap m = FeatureMap::polynomial2();
  const std::vector<FeatureVector> mixed = {fv(0, 0), fv(1, 0)};
  const MeanEmbedding e = mean_embedding(mixed, m, WeightVector::ones(3));
  EXPECT_EQ(e.skipped, 1u);
  expect_amps(e.mean, {1, 0, 0});

  const std::vector<FeatureVector> none;
  EXPECT_THROW(mean_embedding(none, m, WeightVector::ones(3)), EmptyClassError);
  const std::vector<FeatureVector> zeros = {fv(0, 0), fv(0, 0)};
  EXPECT_THROW(mean_embedding(zeros, m, WeightVector::ones(3)), EmptyClassError);
}

TEST(MeanEmbedding, CancellingPointsAreDegenerate) {
  const FeatureMap id = FeatureMap::identity(2);
  const std::vector<FeatureVector> opposite = {fv(1, 0), fv(-1, 0)};
  EXPECT_THROW(mean_embedding(opposite, id, WeightVector::ones(2)), DegenerateEncodingError);
}

}  // namespace
}  // namespace homk
