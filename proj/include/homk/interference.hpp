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

// Two-photon Hong-Ou-Mandel interference of encoded photons.
//
// "CC" is always the coincidence probability normalized to the
// distinguishable-photon baseline, CC = 1 - |<a|b>|^2. The raw beamsplitter
// probability p_11 is half of it and is exposed only through
// beamsplitter_oracle().

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "homk/encoding.hpp"
#include "homk/errors.hpp"
#include "homk/modes.hpp"

namespace homk {

inline constexpr double kProbabilityClampTolerance = 1e-10;

/// Clamps values within 1e-10 of [lo, hi]; anything further out is a bug.
inline double clamp_probability(double p, const char* what, double lo = 0.0, double hi = 1.0) {
  if (!(p >= lo - kProbabilityClampTolerance && p <= hi + kProbabilityClampTolerance)) {
    throw DomainError(std::string(what) + ": value " + std::to_string(p) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp(p, lo, hi);
}

inline void require_same_size(const EncodedPhoton& a, const EncodedPhoton& b, const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(what) + ": photon sizes differ (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
}

/// |sum_n a_n^* b_n|^2
inline double kernel(const EncodedPhoton& a, const EncodedPhoton& b) {
  require_same_size(a, b, "kernel");
  return clamp_probability(std::norm(a.amplitudes().dot(b.amplitudes())), "kernel");
}

/// Normalized CC with a precomputed overlap matrix.
inline double coincidence(const EncodedPhoton& a, const EncodedPhoton& b,
                          const OverlapMatrix& overlap) {
  require_same_size(a, b, "coincidence");
  if (overlap.entries.rows() != a.size()) {
    throw DomainError("coincidence: photon size does not match mode basis order");
  }
  const std::complex<double> amp =
      a.amplitudes().dot(overlap.entries.cast<std::complex<double>>() * b.amplitudes());
  return clamp_probability(1.0 - std::norm(amp), "coincidence");
}

/// 1 - |sum_nm a_n^* b_m O_nm(delay)|^2; equals 1 - kernel(a, b) at zero delay.
inline double coincidence(const EncodedPhoton& a, const EncodedPhoton& b, const ModeBasis& basis,
                          double delay) {
  require_same_size(a, b, "coincidence");
  if (a.size() != basis.order()) {
    throw DomainError("coincidence: photon size does not match mode basis order");
  }
  return coincidence(a, b, overlap_matrix(basis, delay));
}

struct DipSample {
  double delay;
  double cc;
};

struct DipCurve {
  std::vector<DipSample> samples;
};

/// Evenly spaced delays, inclusive of both ends.
inline std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 2) throw DomainError("linspace: need at least two steps");
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i) out[i] = lo + (hi - lo) * i / (steps - 1);
  return out;
}

inline std::vector<double> default_delays() { return linspace(-5.0, 5.0, 201); }

inline DipCurve dip_curve(const EncodedPhoton& a, const EncodedPhoton& b, const ModeBasis& basis,
                          const std::vector<double>& delays) {
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (!(delays[i] > delays[i - 1])) {
      throw DomainError("dip_curve: delays must be strictly increasing");
    }
  }
  for (double d : delays) check_delay_in_domain(basis, d);
  DipCurve curve;
  curve.samples.reserve(delays.size());
  for (double d : delays) curve.samples.push_back({d, coincidence(a, b, basis, d)});
  return curve;
}

/// CSV with header `dt,cc`.
inline void write_dip_csv(std::ostream& os, const DipCurve& curve) {
  os << "dt,cc\n";
  char buf[64];
  for (const DipSample& s : curve.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.delay, s.cc);
    os << buf;
  }
}

/// Raw output probabilities of a 50:50 beamsplitter: both photons in port c,
/// both in port d, or one in each.
struct TwoPhotonOutcome {
  double p_20 = 0.0;
  double p_02 = 0.0;
  double p_11 = 0.0;
};

/// Brute-force two-photon calculation in the 2N-mode Fock space (two paths x N
/// temporal modes).
///
/// The input a^dag(port 1) b^dag(port 2)|0> is stored as a coefficient matrix
/// C with state = sum_ij C_ij c_i^dag c_j^dag |0>. Each creation operator maps
/// through the beamsplitter unitary U (c_i^dag -> sum_k U_ki c_k^dag), so
/// C -> U C U^T. The probability of the unordered output pair {i, j} is then
/// |C_ij + C_ji|^2 for i != j and 2|C_ii|^2 for i == j. Nothing here uses the
/// closed-form overlap, which is what makes it an independent check on the
/// 1 - |<a|b>|^2 coincidence formula.
inline TwoPhotonOutcome beamsplitter_oracle(const EncodedPhoton& a, const EncodedPhoton& b) {
  require_same_size(a, b, "beamsplitter_oracle");
  const int n = a.size();
  const int dim = 2 * n;  // index = port * n + temporal mode

  Eigen::MatrixXcd coeff = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) coeff(i, n + j) = a[i] * b[j];
  }

  const double r = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd unitary = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < n; ++m) {
    // input port 1 -> (c + d)/sqrt2, input port 2 -> (c - d)/sqrt2
    unitary(m, m) = r;
    unitary(n + m, m) = r;
    unitary(m, n + m) = r;
    unitary(n + m, n + m) = -r;
  }
  const Eigen::MatrixXcd out = unitary * coeff * unitary.transpose();

  TwoPhotonOutcome result;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const double p = (i == j) ? 2.0 * std::norm(out(i, i)) : std::norm(out(i, j) + out(j, i));
      const bool i_in_c = i < n;
      const bool j_in_c = j < n;
      if (i_in_c && j_in_c) {
        result.p_20 += p;
      } else if (!i_in_c && !j_in_c) {
        result.p_02 += p;
      } else {
        result.p_11 += p;
      }
    }
  }
  return result;
}

struct ShotRecord {
  std::int64_t n_shots = 0;
  std::int64_t n_coincidences = 0;
  double estimate = 0.0;  ///< 2 * n_coincidences / n_shots, clamped to [0, 1]
};

/// Simulates n_shots ideal detections: each shot lands in (2,0), (0,2) or
/// (1,1) with the oracle's probabilities; only coincidences are counted.
inline ShotRecord sample_coincidences(const EncodedPhoton& a, const EncodedPhoton& b,
                                      std::int64_t n_shots, std::uint64_t seed) {
  if (n_shots < 1) throw DomainError("sample_coincidences: n_shots must be positive");
  const TwoPhotonOutcome p = beamsplitter_oracle(a, b);
  const double total = p.p_20 + p.p_02 + p.p_11;
  const double cut_20 = p.p_20 / total;
  const double cut_02 = cut_20 + p.p_02 / total;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ShotRecord rec;
  rec.n_shots = n_shots;
  for (std::int64_t s = 0; s < n_shots; ++s) {
    const double u = uniform(rng);
    if (u >= cut_02) ++rec.n_coincidences;
  }
  rec.estimate = std::clamp(2.0 * static_cast<double>(rec.n_coincidences) / n_shots, 0.0, 1.0);
  return rec;
}

}  // namespace homk
