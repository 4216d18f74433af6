#include "plapfd/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "plapfd/errors.hpp"
#include "plapfd/mollifier.hpp"

namespace plapfd {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

double tau_exponent(double a, double p) { return 2.0 + (1.0 - a) * (p - 2.0); }

long steps_for(double T, double tau_max) {
  const double ratio = T / tau_max;
  return std::max(1L, static_cast<long>(std::ceil(ratio - 1e-9 * ratio)));
}

}  // namespace

const char* to_string(CflMode mode) {
  switch (mode) {
    case CflMode::Theoretical:
      return "theoretical";
    case CflMode::Practical:
      return "practical";
    case CflMode::Manual:
      return "manual";
  }
  return "unknown";
}

void HolderData::validate() const {
  if (!u0 || !f) throw ConfigError("initial datum and source term must be set");
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hoelder exponent a must lie in (0, 1]");
  if (!finite_nonneg(L_u0) || !finite_nonneg(L_f)) throw DomainError("Hoelder constants must be finite and nonnegative");
  if (!finite_nonneg(sup_u0) || !finite_nonneg(sup_f)) throw DomainError("sup norms must be finite and nonnegative");
}

void SchemeConfig::validate() const {
  static_cast<void>(Exponent(p));
  if (d < 1 || d > kMaxDim) throw DomainError("dimension out of range");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("h must be positive");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("r must be positive");
  if (!(half_width >= h)) throw DomainError("half width must be at least h");
  if (!(tau > 0.0) || N < 1) throw ConfigError("time step not set; call finalize_config");
  if (std::abs(tau * static_cast<double>(N) - T) > 1e-12 * T) throw ConfigError("N * tau must equal T");
  if (cfl_mode == CflMode::Practical && !(c_practical > 0.0)) throw DomainError("c_practical must be positive");
}

double ktilde(double a, double p, double L_u0, double K1, double K2, double M) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hoelder exponent a must lie in (0, 1]");
  static_cast<void>(Exponent(p));
  if (!finite_nonneg(L_u0) || !finite_nonneg(K1) || !finite_nonneg(K2) || !finite_nonneg(M)) {
    throw DomainError("ktilde constants must be finite and nonnegative");
  }
  const double q = tau_exponent(a, p);
  return std::pow(4.0, (1.0 + (1.0 - a) * (p - 1.0)) / q) * std::pow(L_u0, p / q) *
         std::pow((p - 1.0) * std::pow(K1, p - 2.0) * K2 * M, a / q);
}

double cfl_constant(double p, double L_u0, double L_f, double T, double Ktilde, double M) {
  const double denom = M * (p - 1.0) * std::pow(L_u0 + T * L_f + 3.0 * Ktilde + 1.0, p - 2.0);
  return std::min(1.0, 1.0 / denom);
}

double cfl_tau_max(double r, double a, double p, double L_u0, double L_f, double T, double Ktilde, double M) {
  if (!(r > 0.0)) throw DomainError("r must be positive");
  return cfl_constant(p, L_u0, L_f, T, Ktilde, M) * std::pow(r, tau_exponent(a, p));
}

Stencil build_stencil(const SchemeConfig& config) {
  if (config.d == 1) return stencil_1d(config.h, config.p);
  return stencil_ball(config.r, config.h, config.p, config.d);
}

CflSummary theoretical_cfl(const SchemeConfig& config, const HolderData& data) {
  if (!(config.K1 > 0.0 && config.K2 > 0.0)) {
    throw UnsupportedError("theoretical CFL needs mollifier constants for d = " + std::to_string(config.d));
  }
  const double m = build_stencil(config).m_bound();
  CflSummary out{};
  out.m_bound = m;
  out.ktilde = ktilde(data.a, config.p, data.L_u0, config.K1, config.K2, m);
  out.constant = cfl_constant(config.p, data.L_u0, data.L_f, config.T, out.ktilde, m);
  out.tau_max = out.constant * std::pow(config.r, tau_exponent(data.a, config.p));
  return out;
}

SchemeConfig finalize_config(SchemeConfig config, const HolderData& data) {
  data.validate();
  if (config.d == 1) config.r = config.h;
  if (config.d <= 3 && !(config.K1 > 0.0)) {
    const MollifierConstants mc = mollifier_constants(config.d);
    config.K1 = mc.K1;
    config.K2 = mc.K2;
    config.M_moll = mc.M_moll;
  }
  double tau_max = 0.0;
  switch (config.cfl_mode) {
    case CflMode::Theoretical:
      tau_max = theoretical_cfl(config, data).tau_max;
      break;
    case CflMode::Practical:
      tau_max = config.c_practical * std::pow(config.r, tau_exponent(data.a, config.p));
      break;
    case CflMode::Manual:
      tau_max = config.tau;
      break;
  }
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw ConfigError("time step must be positive");
  config.N = steps_for(config.T, tau_max);
  config.tau = config.T / static_cast<double>(config.N);
  config.validate();
  return config;
}

GridField explicit_step(const GridField& field, const Stencil& stencil, const GridField& f_values, double tau,
                        long step, int threads) {
  if (!(field.grid() == f_values.grid())) throw ConfigError("source term grid differs from solution grid");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be nonnegative");
  std::vector<double> next = apply_dp(stencil, field, threads);
  const auto u = field.values();
  const auto f = f_values.values();
  for (std::size_t k = 0; k < next.size(); ++k) next[k] = u[k] + tau * (next[k] + f[k]);
  for (std::size_t k = 0; k < next.size(); ++k) {
    if (!std::isfinite(next[k])) {
      std::ostringstream msg;
      msg << "non-finite value at node " << k;
      const auto idx = field.grid().unflatten(k);
      msg << " (index";
      for (int i : idx) msg << ' ' << i;
      msg << ")";
      if (step >= 0) msg << " in step " << step;
      throw BlowUpError(msg.str(), k, step);
    }
  }
  return GridField(field.grid(), std::move(next), field.extension());
}

void march(const SchemeConfig& config, const HolderData& data, const LevelObserver& observer) {
  config.validate();
  data.validate();
  if (config.d == 1 && config.r != config.h) throw ConfigError("in one dimension the stencil radius equals h");
  if (config.cfl_mode == CflMode::Theoretical) {
    const CflSummary cfl = theoretical_cfl(config, data);
    if (config.tau > cfl.tau_max * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "CFL violated: tau = " << config.tau << " exceeds tau_max = " << cfl.tau_max;
      throw ConfigError(msg.str());
    }
  }
  const Grid grid(config.d, config.h, config.half_width);
  if (config.extension == Extension::Zero && config.support_radius) {
    if (grid.half_width() - *config.support_radius < config.r) {
      std::ostringstream msg;
      msg << "support radius " << *config.support_radius << " leaves less than r = " << config.r
          << " of margin inside half width " << grid.half_width();
      throw ConfigError(msg.str());
    }
  }
  const Stencil stencil = build_stencil(config);
  const GridField f_values = GridField::sample(grid, data.f, config.extension);
  GridField level = GridField::sample(grid, data.u0, config.extension);
  observer(0, 0.0, level);
  for (long j = 1; j <= config.N; ++j) {
    level = explicit_step(level, stencil, f_values, config.tau, j, config.threads);
    observer(j, static_cast<double>(j) * config.tau, level);
  }
}

Trajectory solve(const SchemeConfig& config, const HolderData& data) {
  Trajectory traj;
  traj.config = config;
  traj.levels.reserve(static_cast<std::size_t>(config.N) + 1);
  march(config, data, [&](long, double t, const GridField& level) {
    traj.levels.push_back(level);
    traj.times.push_back(t);
  });
  return traj;
}

double time_interpolate(const Trajectory& traj, std::size_t node, double t) {
  const double T = traj.times.back();
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-14))) throw DomainError("interpolation time outside [0, T]");
  const double tau = traj.config.tau;
  const long n = traj.steps();
  if (node >= traj.levels.front().size()) throw DomainError("node outside grid");
  long j = std::clamp(static_cast<long>(std::floor(t / tau)), 0L, std::max(0L, n - 1));
  if (t == traj.times[j] || n == 0) return traj.levels[j][node];
  if (t == traj.times[j + 1]) return traj.levels[j + 1][node];
  const double tj = traj.times[j];
  const double tj1 = traj.times[j + 1];
  return (tj1 - t) / tau * traj.levels[j][node] + (t - tj) / tau * traj.levels[j + 1][node];
}

double time_interpolate(const Trajectory& traj, std::span<const int> alpha, double t) {
  return time_interpolate(traj, traj.levels.front().grid().flatten(alpha), t);
}

}  // namespace plapfd
