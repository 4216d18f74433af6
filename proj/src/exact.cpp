#include "plapfd/exact.hpp"

#include <cmath>

#include "plapfd/errors.hpp"
#include "plapfd/operators.hpp"

namespace plapfd {

namespace {

void require_barenblatt_exponent(double p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw DomainError("Barenblatt solution requires p > 2");
}

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

BarenblattConstants barenblatt_constants(int d, double p) {
  if (d < 1) throw DomainError("dimension must be positive");
  require_barenblatt_exponent(p);
  const double denom = d * (p - 2.0) + p;
  const double beta = 1.0 / denom;
  const double K = std::pow((p - 2.0) / p * std::pow(beta, 1.0 / (p - 1.0)), (p - 1.0) / (p - 2.0));
  return {d / denom, beta, K};
}

BarenblattSolution::BarenblattSolution(int d, double p, double t_shift)
    : d_(d), p_(p), t_shift_(t_shift), c_(barenblatt_constants(d, p)) {
  if (!(t_shift >= 0.0) || !std::isfinite(t_shift)) throw DomainError("t_shift must be nonnegative");
}

double BarenblattSolution::profile(double radius, double s) const {
  // radius is |x|, s = t + t_shift > 0.
  const double z = radius / std::pow(s, c_.beta);
  if (z >= 1.0) return 0.0;
  const double base = 1.0 - std::pow(z, p_ / (p_ - 1.0));
  if (!(base > 0.0)) return 0.0;
  return c_.K * std::pow(s, -c_.alpha) * std::exp((p_ - 1.0) / (p_ - 2.0) * std::log(base));
}

double BarenblattSolution::operator()(std::span<const double> x, double t) const {
  if (static_cast<int>(x.size()) != d_) throw ConfigError("point dimension does not match solution");
  const double s = t + t_shift_;
  if (!(s > 0.0)) throw DomainError("Barenblatt evaluation needs t + t_shift > 0");
  return profile(euclidean_norm(x), s);
}

double BarenblattSolution::support_radius(double t) const {
  const double s = t + t_shift_;
  if (!(s > 0.0)) throw DomainError("Barenblatt evaluation needs t + t_shift > 0");
  return std::pow(s, c_.beta);
}

double BarenblattSolution::peak(double t) const {
  const double s = t + t_shift_;
  if (!(s > 0.0)) throw DomainError("Barenblatt evaluation needs t + t_shift > 0");
  return c_.K * std::pow(s, -c_.alpha);
}

std::vector<double> BarenblattSolution::sample(const Grid& grid, double t) const {
  if (grid.dim() != d_) throw ConfigError("grid dimension does not match solution");
  const double s = t + t_shift_;
  if (!(s > 0.0)) throw DomainError("Barenblatt evaluation needs t + t_shift > 0");
  // Per-level factors hoisted out of the node loop; same arithmetic as profile().
  const double scale = std::pow(s, c_.beta);
  const double amplitude = c_.K * std::pow(s, -c_.alpha);
  const double q = p_ / (p_ - 1.0);
  const double m = (p_ - 1.0) / (p_ - 2.0);
  std::vector<double> out(grid.size());
  std::vector<double> x(d_);
  for (std::size_t k = 0; k < out.size(); ++k) {
    grid.point(k, x);
    const double z = euclidean_norm(x) / scale;
    double v = 0.0;
    if (z < 1.0) {
      const double base = 1.0 - std::pow(z, q);
      if (base > 0.0) v = amplitude * std::exp(m * std::log(base));
    }
    out[k] = v;
  }
  return out;
}

double barenblatt_eval(const BarenblattSolution& sol, std::span<const double> x, double t) { return sol(x, t); }

double barenblatt_lipschitz(double p, int d) {
  if (d != 1) throw UnsupportedError("Lipschitz estimate is available for the one-dimensional profile only");
  require_barenblatt_exponent(p);
  return barenblatt_constants(1, p).K * p / (p - 2.0);
}

double plap_quadratic_oracle(std::span<const double> x, double p, int d) {
  static_cast<void>(Exponent(p));
  if (static_cast<int>(x.size()) != d) throw ConfigError("point dimension does not match d");
  return std::pow(2.0, p - 1.0) * (d + p - 2.0) * std::pow(euclidean_norm(x), p - 2.0);
}

}  // namespace plapfd
