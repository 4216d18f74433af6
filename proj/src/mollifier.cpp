#include "plapfd/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "plapfd/errors.hpp"
#include "plapfd/operators.hpp"

namespace plapfd {

namespace {

// The integrands vanish with all derivatives at r = 1; past this point they
// are below the smallest double.
constexpr double kUpper = 1.0 - 1e-12;
constexpr double kTolerance = 1e-8;

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Integral integrate(F f, double a, double b) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  Integral out;
  out.value = Quad::integrate(f, a, b, 15, 1e-14, &out.error);
  return out;
}

Integral operator+(Integral x, Integral y) { return {x.value + y.value, x.error + y.error}; }

// |tau'(r)|/r, written without the division so that r = 0 is regular.
double tau_d1_over_r(double r) {
  const double s = 1.0 - r * r;
  return 2.0 * profile_tau(r) / (s * s);
}

}  // namespace

double profile_tau(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double profile_tau_d1(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  return -2.0 * r / (s * s) * profile_tau(r);
}

double profile_tau_d2(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  const double s2 = s * s;
  return (6.0 * r * r * r * r - 2.0) / (s2 * s2) * profile_tau(r);
}

MollifierConstants mollifier_constants(int d) {
  if (d < 1 || d > 3) throw DomainError("mollifier constants are tabulated for d in {1, 2, 3}");
  const auto weight = [d](double r) { return d == 1 ? 1.0 : (d == 2 ? r : r * r); };

  const Integral i0 = integrate([&](double r) { return profile_tau(r) * weight(r); }, 0.0, kUpper);
  const Integral i1 = integrate([&](double r) { return -profile_tau_d1(r) * weight(r); }, 0.0, kUpper);
  // tau'' changes sign at r^4 = 1/3; split there so each piece is smooth.
  const double kink = std::pow(1.0 / 3.0, 0.25);
  const auto k2_integrand = [&](double r) {
    return (tau_d1_over_r(r) + std::abs(profile_tau_d2(r))) * weight(r);
  };
  const Integral i2 = integrate(k2_integrand, 0.0, kink) + integrate(k2_integrand, kink, kUpper);

  const double M = 1.0 / i0.value;
  const double err_m = M * M * i0.error;
  const double err_k1 = i1.value * err_m + M * i1.error;
  const double err_k2 = i2.value * err_m + M * i2.error;
  const double estimate = std::max({err_m, err_k1, err_k2});
  if (!(estimate <= kTolerance)) {
    throw NumericalError("mollifier quadrature did not converge for d = " + std::to_string(d), estimate);
  }
  return {d, M, M * i1.value, M * i2.value, estimate};
}

bool check_jp_taylor_bound(double a, double b, double p) {
  const PowerMap power{Exponent(p)};
  const double ja = power(a);
  const double jab = power(a + b);
  const double lhs = std::abs(jab - ja);
  const double rhs = (p - 1.0) * std::pow(std::max(std::abs(a), std::abs(a + b)), p - 2.0) * std::abs(b);
  return lhs <= rhs + 1e-12 * (rhs + std::abs(ja) + std::abs(jab));
}

}  // namespace plapfd
