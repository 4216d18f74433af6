#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "plapfd/grid.hpp"

namespace plapfd {

/// Exponent p of the p-Laplacian, p >= 2.
class Exponent {
 public:
  explicit Exponent(double p);
  double value() const noexcept { return p_; }

 private:
  double p_;
};

/// The scalar nonlinearity J_p(xi) = |xi|^(p-2) xi.
///
/// p = 2, 3, 4 are evaluated by plain multiplication; other exponents go
/// through sign(xi) exp((p-1) ln|xi|), with |xi|^(p-1) < 1e-300 flushed to 0.
class PowerMap {
 public:
  explicit PowerMap(Exponent p);

  double exponent() const noexcept { return p_; }

  double operator()(double xi) const noexcept {
    switch (kind_) {
      case Kind::Identity:
        return xi;
      case Kind::Square:
        return std::abs(xi) * xi;
      case Kind::Cube:
        return xi * xi * xi;
      case Kind::General:
        break;
    }
    return general(xi);
  }

 private:
  enum class Kind { Identity, Square, Cube, General };
  double general(double xi) const noexcept;

  double p_;
  Kind kind_;
};

/// J_p(xi); throws DomainError for p < 2 or non-finite xi.
double jp(double xi, double p);

struct StencilEntry {
  MultiIndex offset;
  double weight;
};

/// Nonnegative symmetric weights omega_beta of a discrete p-Laplacian
///
///   D_p^h u(x) = sum_beta J_p(u(x + h beta) - u(x)) omega_beta,
///
/// supported in |h beta| <= r with sum_beta omega_beta <= M r^-p.
/// Entries are kept in lexicographic order of their offsets; every evaluation
/// sums in that order.
class Stencil {
 public:
  Stencil(int dim, double spacing, double radius, double p, double m_bound, std::vector<StencilEntry> entries);

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return spacing_; }
  double radius() const noexcept { return radius_; }
  double exponent() const noexcept { return power_.exponent(); }
  /// The constant M of the weight-sum bound.
  double m_bound() const noexcept { return m_bound_; }
  const std::vector<StencilEntry>& entries() const noexcept { return entries_; }
  double weight_sum() const noexcept { return weight_sum_; }
  /// max_i |beta_i| over all offsets.
  int reach() const noexcept { return reach_; }
  const PowerMap& power() const noexcept { return power_; }

 private:
  int dim_;
  double spacing_;
  double radius_;
  double m_bound_;
  PowerMap power_;
  std::vector<StencilEntry> entries_;
  double weight_sum_ = 0.0;
  int reach_ = 0;
};

/// Three-point stencil in one dimension: r = h, omega_{+-1} = h^-p, M = 2.
Stencil stencil_1d(double h, double p);

/// Lebesgue measure of the unit ball in R^d.
double unit_ball_volume(int d);

/// D_{d,p} = (d / (2(d+p))) * average over the unit sphere of |y_1|^p,
/// evaluated through its closed gamma-function form.
double dpd_constant(int d, double p);

/// Uniform-weight ball stencil in d >= 2 dimensions:
/// omega_beta = h^d / (D_{d,p} |B_1| r^(p+d)) for 0 < |h beta| < r, M = 2^d / D_{d,p}.
/// Requires h <= r / sqrt(d).
Stencil stencil_ball(double r, double h, double p, int d);

/// h = c r^gamma with gamma = p/(p-1) on (2, 3] and 3/2 otherwise, clamped to r/sqrt(d).
double couple_h_to_r(double r, double p, int d, double c);

/// D_p^h u at node alpha.
double apply_dp(const Stencil& stencil, const GridField& field, std::span<const int> alpha);

/// D_p^h u at every node, in storage order. Results do not depend on `threads`
/// (0 picks the runtime default).
std::vector<double> apply_dp(const Stencil& stencil, const GridField& field, int threads = 1);

}  // namespace plapfd
