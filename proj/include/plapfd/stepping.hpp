#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "plapfd/grid.hpp"
#include "plapfd/operators.hpp"

namespace plapfd {

/// Initial datum, source term and their a-Hoelder moduli:
/// |u0(x)-u0(y)| <= L_u0 |x-y|^a, |f(x)-f(y)| <= L_f |x-y|^a.
struct HolderData {
  ScalarField u0;
  ScalarField f;
  double a = 1.0;
  double L_u0 = 0.0;
  double L_f = 0.0;
  double sup_u0 = 0.0;
  double sup_f = 0.0;

  void validate() const;
};

enum class CflMode {
  Theoretical,  ///< tau from the nonlinear CFL bound; enforced by solve()
  Practical,    ///< tau = c_practical r^(2+(1-a)(p-2))
  Manual,       ///< tau as given, unchecked
};

const char* to_string(CflMode mode);

struct SchemeConfig {
  double p = 4.0;
  int d = 1;
  double T = 1.0;
  /// Stencil radius; forced to h when d = 1.
  double r = 0.0;
  double h = 0.01;
  double tau = 0.0;
  long N = 0;
  double half_width = 2.0;
  CflMode cfl_mode = CflMode::Practical;
  double c_practical = 0.2;
  Extension extension = Extension::Zero;
  /// Mollifier constants of the running dimension (filled by finalize_config for d <= 3).
  double K1 = 0.0;
  double K2 = 0.0;
  double M_moll = 0.0;
  /// Radius of the exact solution's support at time T; with zero extension the
  /// solver requires half_width - support_radius >= r.
  std::optional<double> support_radius;
  int threads = 1;

  void validate() const;
};

/// Time-equicontinuity constant
///   4^((1+(1-a)(p-1))/q) L^(p/q) ((p-1) K1^(p-2) K2 M)^(a/q),  q = 2+(1-a)(p-2).
double ktilde(double a, double p, double L_u0, double K1, double K2, double M);

/// C = min{1, 1/(M (p-1) (L_u0 + T L_f + 3 Ktilde + 1)^(p-2))}.
double cfl_constant(double p, double L_u0, double L_f, double T, double Ktilde, double M);

/// C r^(2+(1-a)(p-2)).
double cfl_tau_max(double r, double a, double p, double L_u0, double L_f, double T, double Ktilde, double M);

struct CflSummary {
  double ktilde;
  double constant;
  double tau_max;
  double m_bound;
};

Stencil build_stencil(const SchemeConfig& config);

/// Theoretical CFL quantities for `config`, with M taken from its stencil.
CflSummary theoretical_cfl(const SchemeConfig& config, const HolderData& data);

/// Fills r (d = 1), the mollifier constants, and (tau, N) according to cfl_mode
/// so that N tau = T. In Manual mode tau must already be positive.
SchemeConfig finalize_config(SchemeConfig config, const HolderData& data);

/// U'(alpha) = U(alpha) + tau (D_p^h U(alpha) + f(alpha)); throws BlowUpError on
/// the first non-finite node.
GridField explicit_step(const GridField& field, const Stencil& stencil, const GridField& f_values, double tau,
                        long step = -1, int threads = 1);

/// Receives every time level in order, starting with level 0.
using LevelObserver = std::function<void(long j, double t, const GridField& level)>;

/// Runs the scheme without storing levels.
void march(const SchemeConfig& config, const HolderData& data, const LevelObserver& observer);

struct Trajectory {
  std::vector<GridField> levels;
  std::vector<double> times;
  SchemeConfig config;

  long steps() const noexcept { return static_cast<long>(levels.size()) - 1; }
};

/// Runs the scheme and keeps all N+1 levels.
Trajectory solve(const SchemeConfig& config, const HolderData& data);

/// Piecewise-linear interpolation in time at one node; exact at the time levels.
double time_interpolate(const Trajectory& traj, std::size_t node, double t);
double time_interpolate(const Trajectory& traj, std::span<const int> alpha, double t);

}  // namespace plapfd
