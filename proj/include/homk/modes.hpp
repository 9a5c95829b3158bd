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

// Hermite-Gaussian temporal modes sampled on a uniform time grid, and the
// (possibly delayed) overlap integrals between them.
//
// Time is dimensionless throughout. Integrals use the composite trapezoidal
// rule; for Gaussian-decaying integrands on a grid whose ends are deep in the
// tails this converges spectrally, so the default 4001-point grid reproduces
// orthonormality to ~1e-14.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "homk/errors.hpp"

namespace homk {

/// Highest Hermite degree supported. Normalization is done in log space, so the
/// cap only guards the polynomial itself against overflow.
inline constexpr int kMaxHermiteOrder = 64;

/// Modes must fall below this magnitude at the grid ends.
inline constexpr double kGridTailTolerance = 1e-12;

/// Physicists' Hermite polynomial H_n(t), by the three-term recurrence.
inline double hermite_polynomial(int n, double t) {
  if (n < 0 || n > kMaxHermiteOrder) {
    throw DomainError("hermite_polynomial: order " + std::to_string(n) + " outside [0, " +
                      std::to_string(kMaxHermiteOrder) + "]");
  }
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * t;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * t * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// u_n(t) = exp(-t^2/2) H_n(t) / (pi^{1/4} sqrt(2^n n!)).
inline double hg_mode(int n, double t) {
  const double h = hermite_polynomial(n, t);
  // Past |t| = 38 every mode up to order 64 is below 1e-190; returning zero
  // avoids inf * 0 once H_n overflows for huge arguments.
  if (std::abs(t) > 38.0) return 0.0;
  const double log_norm =
      -0.25 * std::log(std::numbers::pi) - 0.5 * (n * std::numbers::ln2 + std::lgamma(n + 1.0));
  return h * std::exp(log_norm - 0.5 * t * t);
}

/// Uniform grid on [-t_max, t_max].
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(12.0, 4001) {}

  TimeGrid(double t_max, int n_points) : t_max_(t_max), n_points_(n_points) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
      throw DomainError("TimeGrid: t_max must be positive and finite");
    }
    if (n_points < 3) throw DomainError("TimeGrid: need at least 3 points");
  }

  double t_min() const { return -t_max_; }
  double t_max() const { return t_max_; }
  int n_points() const { return n_points_; }
  double step() const { return 2.0 * t_max_ / (n_points_ - 1); }
  double at(int i) const { return -t_max_ + step() * i; }

  /// Trapezoid weights; dot them with samples to integrate.
  Eigen::VectorXd quadrature_weights() const {
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n_points_, step());
    w[0] *= 0.5;
    w[n_points_ - 1] *= 0.5;
    return w;
  }

 private:
  double t_max_;
  int n_points_;
};

/// The first `order` Hermite-Gaussian modes u_0..u_{order-1}, sampled on a grid.
class ModeBasis {
 public:
  ModeBasis(int order, TimeGrid grid) : order_(order), grid_(grid) {
    if (order < 1 || order > kMaxHermiteOrder + 1) {
      throw DomainError("ModeBasis: order " + std::to_string(order) + " unsupported");
    }
    for (int n = 0; n < order_; ++n) {
      if (std::abs(hg_mode(n, grid_.t_max())) >= kGridTailTolerance) {
        throw DomainError("ModeBasis: grid half-width " + std::to_string(grid_.t_max()) +
                          " too narrow for mode " + std::to_string(n));
      }
    }
    samples_ = sample_modes(0.0);
  }

  explicit ModeBasis(int order) : ModeBasis(order, TimeGrid{}) {}

  int order() const { return order_; }
  const TimeGrid& grid() const { return grid_; }

  /// Row n holds u_n at the grid points.
  const Eigen::MatrixXd& samples() const { return samples_; }

  /// Row n holds u_n(t_i - delay).
  Eigen::MatrixXd sample_modes(double delay) const {
    Eigen::MatrixXd out(order_, grid_.n_points());
    for (int i = 0; i < grid_.n_points(); ++i) {
      const double t = grid_.at(i) - delay;
      for (int n = 0; n < order_; ++n) out(n, i) = hg_mode(n, t);
    }
    return out;
  }

 private:
  int order_;
  TimeGrid grid_;
  Eigen::MatrixXd samples_;
};

/// O_nm(delay) = integral of u_n(t) u_m(t - delay) dt.
struct OverlapMatrix {
  double delay = 0.0;
  Eigen::MatrixXd entries;
};

/// Throws DomainError when the delayed integrand is not negligible at the grid
/// ends, or when the shifted mode centre leaves the grid.
inline void check_delay_in_domain(const ModeBasis& basis, double delay) {
  const TimeGrid& grid = basis.grid();
  if (!std::isfinite(delay) || std::abs(delay) > grid.t_max()) {
    throw DomainError("delay " + std::to_string(delay) + " outside grid half-width " +
                      std::to_string(grid.t_max()));
  }
  for (double edge : {grid.t_min(), grid.t_max()}) {
    double max_here = 0.0;
    double max_shifted = 0.0;
    for (int n = 0; n < basis.order(); ++n) {
      max_here = std::max(max_here, std::abs(hg_mode(n, edge)));
      max_shifted = std::max(max_shifted, std::abs(hg_mode(n, edge - delay)));
    }
    if (max_here * max_shifted > kGridTailTolerance) {
      throw DomainError("delay " + std::to_string(delay) + " pushes modes off the grid");
    }
  }
}

inline OverlapMatrix overlap_matrix(const ModeBasis& basis, double delay) {
  check_delay_in_domain(basis, delay);
  const Eigen::VectorXd w = basis.grid().quadrature_weights();
  OverlapMatrix out;
  out.delay = delay;
  if (delay == 0.0) {
    out.entries = basis.samples() * w.asDiagonal() * basis.samples().transpose();
  } else {
    const Eigen::MatrixXd shifted = basis.sample_modes(delay);
    out.entries = basis.samples() * w.asDiagonal() * shifted.transpose();
  }
  return out;
}

}  // namespace homk
