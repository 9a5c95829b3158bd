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

#include <string_view>

#include "homk/encoding.hpp"
#include "homk/errors.hpp"
#include "homk/interference.hpp"

namespace homk {

enum class Label { P, Q };

inline std::string_view label_name(Label l) { return l == Label::P ? "P" : "Q"; }

inline Label other(Label l) { return l == Label::P ? Label::Q : Label::P; }

/// Mean-embedded class states |mu_P>, |mu_Q>.
struct ClassMeans {
  EncodedPhoton mu_p;
  EncodedPhoton mu_q;
};

/// MMD(P, Q) = 2 CC(P, Q) = 2 (1 - |<mu_P|mu_Q>|^2), in [0, 2].
inline double mmd(const ClassMeans& means) {
  return clamp_probability(2.0 * (1.0 - kernel(means.mu_p, means.mu_q)), "mmd", 0.0, 2.0);
}

struct Classification {
  double score = 0.0;
  Label label = Label::Q;
  /// Set by the single-mean rule when the calibration is 1 (threshold 0):
  /// every point is then labelled Q.
  bool degenerate_calibration = false;
};

/// score = |<x|mu_Q>|^2 - |<x|mu_P>|^2; Q when score >= 0 (ties go to Q).
inline Classification classify(const EncodedPhoton& x, const ClassMeans& means) {
  Classification c;
  c.score = kernel(x, means.mu_q) - kernel(x, means.mu_p);
  c.label = c.score >= 0.0 ? Label::Q : Label::P;
  return c;
}

/// Throws DegenerateEncodingError for unencodable x.
inline Classification classify(const FeatureVector& x, const ClassMeans& means,
                               const FeatureMap& map, const WeightVector& weights) {
  return classify(encode(x, map, weights), means);
}

inline double single_mean_threshold(double calibration) { return 0.5 - 0.5 * calibration; }

/// Compares against mu_Q only. `calibration` is |<mu_P|mu_Q>|^2 measured once
/// in advance; Q iff |<x|mu_Q>|^2 >= 1/2 - calibration/2.
inline Classification classify_single_mean(const EncodedPhoton& x, const EncodedPhoton& mu_q,
                                           double calibration) {
  calibration = clamp_probability(calibration, "classify_single_mean: calibration");
  Classification c;
  c.score = kernel(x, mu_q) - single_mean_threshold(calibration);
  c.label = c.score >= 0.0 ? Label::Q : Label::P;
  c.degenerate_calibration = calibration >= 1.0;
  return c;
}

inline Classification classify_single_mean(const FeatureVector& x, const EncodedPhoton& mu_q,
                                           double calibration, const FeatureMap& map,
                                           const WeightVector& weights) {
  return classify_single_mean(encode(x, map, weights), mu_q, calibration);
}

}  // namespace homk
