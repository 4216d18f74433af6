#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plapfd/data.hpp"
#include "plapfd/exact.hpp"
#include "plapfd/stepping.hpp"

namespace plapfd {

struct ErrorRow {
  double h;
  double r;
  double tau;
  double sup_error;
  double runtime_seconds;
};

/// Reference solution u(x, t).
using ExactFunction = std::function<double(std::span<const double> x, double t)>;

/// Throws ConfigError unless the box reaches at least r beyond the support of
/// `exact` at time T.
void check_support_margin(const Grid& grid, double r, const BarenblattSolution& exact, double T);

/// Running max over nodes and levels of |U^j_alpha - u(x_alpha, t_j)|.
class ErrorAccumulator {
 public:
  explicit ErrorAccumulator(BarenblattSolution exact);
  explicit ErrorAccumulator(ExactFunction exact);

  void observe(long j, double t, const GridField& level);
  double sup_error() const noexcept { return sup_error_; }
  /// Level and node of the largest deviation seen so far.
  long worst_level() const noexcept { return worst_level_; }
  std::size_t worst_node() const noexcept { return worst_node_; }

 private:
  std::vector<double> reference(const GridField& level, double t) const;

  std::optional<BarenblattSolution> barenblatt_;
  ExactFunction exact_;
  double sup_error_ = 0.0;
  long worst_level_ = 0;
  std::size_t worst_node_ = 0;
};

/// Max over every node and level; checks the support margin first.
double sup_error(const Trajectory& traj, const BarenblattSolution& exact);
double sup_error(const Trajectory& traj, const ExactFunction& exact);

/// Least-squares slope of log(sup_error) against log(h).
double observed_order(std::span<const ErrorRow> rows);

/// One finalized run against the Barenblatt solution, streamed.
ErrorRow barenblatt_error_row(const SchemeConfig& config, const DataSet& data);

/// Runs `base` once per level: h for d = 1, r for d >= 2 (with h coupled to r
/// through `coupling_c`), T and the time-step rule taken from `base`.
std::vector<ErrorRow> convergence_study(const SchemeConfig& base, const DataSet& data, std::span<const double> levels,
                                        double coupling_c);

struct ConsistencyRow {
  double r;
  double h;
  /// max |D_p^h psi - Delta_p psi| over nodes with |x|_inf <= window.
  double max_error;
  /// The same maximum restricted to nodes with |x| >= h.
  double max_error_off_origin;
  std::size_t nodes;
};

/// Consistency error for psi(x) = |x|^2 with the stencil of (d, p, r, h).
ConsistencyRow consistency_error(int d, double p, double r, double h, double window, int threads = 1);

/// consistency_error over radii; d = 1 uses h = r, d >= 2 couple_h_to_r(r, p, d, c).
std::vector<ConsistencyRow> consistency_sweep(int d, double p, std::span<const double> radii, double coupling_c,
                                              double window, int threads = 1);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  long evaluated = 0;
  /// min over evaluations of bound + slack - lhs.
  double worst_margin = 0.0;
  double worst_lhs = 0.0;
  double worst_bound = 0.0;
  /// max over evaluations of max(0, lhs - bound).
  double slack_used = 0.0;
  std::string worst_location;
};

struct PropertyReport {
  std::uint64_t seed = 0;
  long samples = 0;
  SchemeConfig config;
  CflSummary cfl{};
  double perturbation = 0.0;
  std::vector<PropertyCheck> checks;
  /// Message of a BlowUpError raised by the run, empty otherwise.
  std::string blow_up;

  bool passed() const;
  std::string to_json() const;
};

struct PropertySuiteOptions {
  long samples = 1000;
  std::uint64_t seed = 20240917;
  /// Continuous dependence compares against (perturbation * u0, perturbation * f).
  double perturbation = 0.9;
};

/// Checks modulus preservation, stability, continuous dependence, time
/// equicontinuity and space-time equicontinuity of the interpolant, each with
/// slack 1e-9 (1 + bound). Requires theoretical or manual CFL mode and a
/// finalized config.
PropertyReport run_property_suite(const SchemeConfig& config, const HolderData& data,
                                  const PropertySuiteOptions& options = {});

}  // namespace plapfd
