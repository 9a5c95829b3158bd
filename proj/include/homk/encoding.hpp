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

// Classical feature vectors -> single-photon temporal-mode amplitudes.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homk/errors.hpp"

namespace homk {

using FeatureVector = Eigen::VectorXd;
using Amplitudes = Eigen::VectorXcd;

inline constexpr double kUnitNormTolerance = 1e-12;

inline void require_finite(const FeatureVector& x, const char* what) {
  if (!x.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

/// Feature map phi. The polynomial map sends (F1, F2) to (F1^2, F2^2, F1 F2).
class FeatureMap {
 public:
  enum class Kind { kPolynomial2, kIdentity, kCustom };

  static FeatureMap polynomial2() { return FeatureMap(Kind::kPolynomial2, 2, 3, {}); }

  static FeatureMap identity(int dim) {
    if (dim < 1) throw DomainError("FeatureMap::identity: dimension must be positive");
    return FeatureMap(Kind::kIdentity, dim, dim, {});
  }

  using Function = std::function<FeatureVector(const FeatureVector&)>;

  static FeatureMap custom(int input_dim, int output_dim, Function f) {
    if (input_dim < 1 || output_dim < 1 || !f) {
      throw DomainError("FeatureMap::custom: invalid dimensions or empty function");
    }
    return FeatureMap(Kind::kCustom, input_dim, output_dim, std::move(f));
  }

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

  FeatureVector operator()(const FeatureVector& x) const {
    if (x.size() != input_dim_) {
      throw DomainError("FeatureMap: expected dimension " + std::to_string(input_dim_) +
                        ", got " + std::to_string(x.size()));
    }
    require_finite(x, "FeatureMap");
    switch (kind_) {
      case Kind::kPolynomial2: {
        FeatureVector out(3);
        out << x[0] * x[0], x[1] * x[1], x[0] * x[1];
        return out;
      }
      case Kind::kIdentity:
        return x;
      case Kind::kCustom: {
        FeatureVector out = fn_(x);
        if (out.size() != output_dim_) throw DomainError("FeatureMap: custom map output size");
        return out;
      }
    }
    return x;
  }

 private:
  FeatureMap(Kind kind, int in, int out, Function f)
      : kind_(kind), input_dim_(in), output_dim_(out), fn_(std::move(f)) {}

  Kind kind_;
  int input_dim_;
  int output_dim_;
  Function fn_;
};

inline FeatureVector apply_feature_map(const FeatureVector& x, const FeatureMap& map) {
  return map(x);
}

/// Free per-mode weights w_n. Finite, not all zero; sign unrestricted.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd w) : w_(std::move(w)) {
    if (w_.size() == 0) throw DomainError("WeightVector: empty");
    if (!w_.allFinite()) throw DomainError("WeightVector: non-finite entry");
    if (w_.isZero(0.0)) throw DomainError("WeightVector: all weights are zero");
  }

  static WeightVector ones(int n) { return WeightVector(Eigen::VectorXd::Ones(n)); }

  int size() const { return static_cast<int>(w_.size()); }
  const Eigen::VectorXd& values() const { return w_; }
  double operator[](int i) const { return w_[i]; }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.w_.size() == b.w_.size() && a.w_ == b.w_;
  }

 private:
  Eigen::VectorXd w_;
};

/// A normalized single-photon state over N temporal modes.
class EncodedPhoton {
 public:
  /// Rescales to unit norm. Throws DegenerateEncodingError on a zero vector.
  static EncodedPhoton normalized(Amplitudes v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DegenerateEncodingError("EncodedPhoton: zero or non-finite amplitude norm");
    }
    v /= norm;
    return EncodedPhoton(std::move(v));
  }

  /// Accepts amplitudes that are already unit norm within 1e-12.
  static EncodedPhoton from_unit(Amplitudes v) {
    if (std::abs(v.squaredNorm() - 1.0) > kUnitNormTolerance) {
      throw DomainError("EncodedPhoton: amplitudes are not unit norm");
    }
    return EncodedPhoton(std::move(v));
  }

  /// Unit vector along mode n.
  static EncodedPhoton basis_state(int n, int order) {
    if (n < 0 || n >= order) throw DomainError("EncodedPhoton::basis_state: index out of range");
    Amplitudes v = Amplitudes::Zero(order);
    v[n] = 1.0;
    return EncodedPhoton(std::move(v));
  }

  int size() const { return static_cast<int>(amps_.size()); }
  const Amplitudes& amplitudes() const { return amps_; }
  std::complex<double> operator[](int i) const { return amps_[i]; }

 private:
  explicit EncodedPhoton(Amplitudes v) : amps_(std::move(v)) {}
  Amplitudes amps_;
};

/// alpha_n = w_n phi_n(x) / ||w . phi(x)||.
inline EncodedPhoton encode_mapped(const FeatureVector& mapped, const WeightVector& weights) {
  if (mapped.size() != weights.size()) {
    throw DomainError("encode: feature map output size " + std::to_string(mapped.size()) +
                      " != weight count " + std::to_string(weights.size()));
  }
  const Eigen::VectorXd weighted = weights.values().cwiseProduct(mapped);
  try {
    return EncodedPhoton::normalized(weighted.cast<std::complex<double>>());
  } catch (const DegenerateEncodingError&) {
    throw DegenerateEncodingError("encode: weighted feature vector has zero norm");
  }
}

inline EncodedPhoton encode(const FeatureVector& x, const FeatureMap& map,
                            const WeightVector& weights) {
  if (map.output_dim() != weights.size()) {
    throw DomainError("encode: map output dimension does not match weight count");
  }
  return encode_mapped(map(x), weights);
}

struct MeanEmbedding {
  EncodedPhoton mean;
  std::size_t skipped = 0;  ///< points rejected as degenerate encodings
};

/// Averages already-mapped points' encodings and renormalizes.
inline MeanEmbedding mean_embedding_mapped(std::span<const FeatureVector> mapped,
                                           const WeightVector& weights) {
  if (mapped.empty()) throw EmptyClassError("mean_embedding: no points");
  Amplitudes sum = Amplitudes::Zero(weights.size());
  std::size_t used = 0;
  std::size_t skipped = 0;
  for (const FeatureVector& m : mapped) {
    try {
      sum += encode_mapped(m, weights).amplitudes();
      ++used;
    } catch (const DegenerateEncodingError&) {
      ++skipped;
    }
  }
  if (used == 0) throw EmptyClassError("mean_embedding: every point is a degenerate encoding");
  sum /= static_cast<double>(used);
  try {
    return {EncodedPhoton::normalized(std::move(sum)), skipped};
  } catch (const DegenerateEncodingError&) {
    throw DegenerateEncodingError("mean_embedding: encoded points cancel to a zero mean");
  }
}

inline MeanEmbedding mean_embedding(std::span<const FeatureVector> points, const FeatureMap& map,
                                    const WeightVector& weights) {
  if (map.output_dim() != weights.size()) {
    throw DomainError("mean_embedding: map output dimension does not match weight count");
  }
  std::vector<FeatureVector> mapped;
  mapped.reserve(points.size());
  for (const FeatureVector& x : points) mapped.push_back(map(x));
  return mean_embedding_mapped(mapped, weights);
}

}  // namespace homk
