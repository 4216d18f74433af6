#include "plapfd/data.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "plapfd/errors.hpp"

namespace plapfd {

namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

ScalarField zero_field() {
  return [](std::span<const double>) { return 0.0; };
}

struct Table {
  std::vector<double> x;
  std::vector<double> y;

  double operator()(double at) const {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - w) * y[k - 1] + w * y[k];
  }

  double max_slope() const {
    double s = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) s = std::max(s, std::abs(y[k] - y[k - 1]) / (x[k] - x[k - 1]));
    return s;
  }

  double sup() const {
    double s = 0.0;
    for (double v : y) s = std::max(s, std::abs(v));
    return s;
  }
};

}  // namespace

DataSet barenblatt_data(const BarenblattSolution& sol) {
  const auto c = sol.constants();
  const double p = sol.exponent();
  const double s = sol.t_shift();
  if (!(s > 0.0)) throw DomainError("Barenblatt initial data needs t_shift > 0");
  DataSet out;
  out.name = "barenblatt";
  out.exact = sol;
  out.data.u0 = [sol](std::span<const double> x) { return sol(x, 0.0); };
  out.data.f = zero_field();
  out.data.a = 1.0;
  out.data.L_u0 = c.K * p / (p - 2.0) * std::pow(s, -(c.alpha + c.beta));
  out.data.sup_u0 = sol.peak(0.0);
  return out;
}

DataSet constant_data(double value, double source) {
  if (!std::isfinite(value) || !std::isfinite(source)) throw DomainError("constant data must be finite");
  DataSet out;
  out.name = "constant";
  out.extension = Extension::BoundaryTrace;
  out.data.u0 = [value](std::span<const double>) { return value; };
  out.data.f = [source](std::span<const double>) { return source; };
  out.data.sup_u0 = std::abs(value);
  out.data.sup_f = std::abs(source);
  return out;
}

DataSet hat_data() {
  DataSet out;
  out.name = "hat";
  out.data.u0 = [](std::span<const double> x) { return std::max(0.0, 1.0 - norm(x)); };
  out.data.f = zero_field();
  out.data.L_u0 = 1.0;
  out.data.sup_u0 = 1.0;
  return out;
}

DataSet cusp_data(double a, double source_scale) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hoelder exponent a must lie in (0, 1]");
  if (!std::isfinite(source_scale)) throw DomainError("source scale must be finite");
  DataSet out;
  out.name = "cusp";
  const auto bump = [a](std::span<const double> x) { return std::max(0.0, 1.0 - std::pow(norm(x), a)); };
  out.data.u0 = bump;
  out.data.f = [bump, source_scale](std::span<const double> x) { return source_scale * bump(x); };
  out.data.a = a;
  out.data.L_u0 = 1.0;
  out.data.L_f = std::abs(source_scale);
  out.data.sup_u0 = 1.0;
  out.data.sup_f = std::abs(source_scale);
  return out;
}

DataSet oscillatory_data(double h) {
  if (!(h > 0.0)) throw DomainError("h must be positive");
  DataSet out;
  out.name = "oscillatory";
  out.data.u0 = [h](std::span<const double> x) {
    return std::cos(std::numbers::pi * x[0] / h) * std::max(0.0, 1.0 - norm(x));
  };
  out.data.f = zero_field();
  out.data.L_u0 = std::numbers::pi / h + 1.0;
  out.data.sup_u0 = 1.0;
  return out;
}

DataSet tabulated_data(std::vector<double> x, std::vector<double> u, std::vector<double> f) {
  if (x.size() < 2 || u.size() != x.size()) throw ConfigError("tabulated data needs matching x and u with at least two points");
  if (!f.empty() && f.size() != x.size()) throw ConfigError("tabulated f must match x");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (!(x[k] > x[k - 1])) throw ConfigError("tabulated x must be strictly increasing");
  }
  for (double v : u) {
    if (!std::isfinite(v)) throw DomainError("tabulated values must be finite");
  }
  for (double v : f) {
    if (!std::isfinite(v)) throw DomainError("tabulated values must be finite");
  }
  if (f.empty()) f.assign(x.size(), 0.0);
  const auto u_table = std::make_shared<const Table>(Table{x, std::move(u)});
  const auto f_table = std::make_shared<const Table>(Table{std::move(x), std::move(f)});
  DataSet out;
  out.name = "tabulated";
  out.extension = Extension::BoundaryTrace;
  out.data.u0 = [u_table](std::span<const double> at) { return (*u_table)(at[0]); };
  out.data.f = [f_table](std::span<const double> at) { return (*f_table)(at[0]); };
  out.data.L_u0 = u_table->max_slope();
  out.data.L_f = f_table->max_slope();
  out.data.sup_u0 = u_table->sup();
  out.data.sup_f = f_table->sup();
  return out;
}

HolderData scaled_data(const HolderData& base, double factor) {
  if (!std::isfinite(factor)) throw DomainError("scale factor must be finite");
  HolderData out = base;
  out.u0 = [u0 = base.u0, factor](std::span<const double> x) { return factor * u0(x); };
  out.f = [f = base.f, factor](std::span<const double> x) { return factor * f(x); };
  const double m = std::abs(factor);
  out.L_u0 *= m;
  out.L_f *= m;
  out.sup_u0 *= m;
  out.sup_f *= m;
  return out;
}

}  // namespace plapfd
