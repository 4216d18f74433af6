#pragma once

#include <span>
#include <vector>

#include "plapfd/grid.hpp"

namespace plapfd {

struct BarenblattConstants {
  double alpha;
  double beta;
  double K;
};

/// alpha = d/(d(p-2)+p), beta = 1/(d(p-2)+p), K = ((p-2)/p beta^(1/(p-1)))^((p-1)/(p-2)); p > 2.
BarenblattConstants barenblatt_constants(int d, double p);

/// Self-similar compactly supported solution of u_t = Delta_p u, evaluated at
/// t + t_shift:
///
///   B(x, s) = K s^-alpha (1 - (|x| / s^beta)^(p/(p-1)))_+^((p-1)/(p-2)).
class BarenblattSolution {
 public:
  BarenblattSolution(int d, double p, double t_shift = 1.0);

  int dim() const noexcept { return d_; }
  double exponent() const noexcept { return p_; }
  double t_shift() const noexcept { return t_shift_; }
  const BarenblattConstants& constants() const noexcept { return c_; }

  double operator()(std::span<const double> x, double t) const;
  /// Radius of the support at time t, (t + t_shift)^beta.
  double support_radius(double t) const;
  /// sup_x B(x, t) = K (t + t_shift)^-alpha.
  double peak(double t) const;
  /// Values at every node of `grid` at time t.
  std::vector<double> sample(const Grid& grid, double t) const;

 private:
  double profile(double radius, double s) const;

  int d_;
  double p_;
  double t_shift_;
  BarenblattConstants c_;
};

/// Convenience wrapper over BarenblattSolution::operator().
double barenblatt_eval(const BarenblattSolution& sol, std::span<const double> x, double t);

/// Lipschitz bound K p/(p-2) of the one-dimensional profile at unit time.
double barenblatt_lipschitz(double p, int d = 1);

/// Delta_p |x|^2 = 2^(p-1) (d+p-2) |x|^(p-2).
double plap_quadratic_oracle(std::span<const double> x, double p, int d);

}  // namespace plapfd
