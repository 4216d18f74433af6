#include "plapfd/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "plapfd/errors.hpp"

namespace plapfd {

namespace {

double slack(double bound) { return 1e-9 * (1.0 + std::abs(bound)); }

double distance(const Grid& grid, std::size_t a, std::size_t b) {
  const auto xa = grid.point(a);
  const auto xb = grid.point(b);
  double s = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) s += (xa[i] - xb[i]) * (xa[i] - xb[i]);
  return std::sqrt(s);
}

std::string node_label(const Grid& grid, std::size_t flat) {
  std::ostringstream out;
  out << '(';
  const auto idx = grid.unflatten(flat);
  for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
  out << ')';
  return out.str();
}

class CheckRecorder {
 public:
  explicit CheckRecorder(std::string name) { check_.name = std::move(name); }

  template <class Where>
  void record(double lhs, double bound, Where&& where) {
    const double margin = bound + slack(bound) - lhs;
    if (check_.evaluated == 0 || margin < check_.worst_margin) {
      check_.worst_margin = margin;
      check_.worst_lhs = lhs;
      check_.worst_bound = bound;
      check_.worst_location = where();
    }
    check_.slack_used = std::max(check_.slack_used, lhs - bound);
    if (margin < 0.0) check_.passed = false;
    ++check_.evaluated;
  }

  void fail(std::string why) {
    check_.passed = false;
    check_.worst_location = std::move(why);
  }

  PropertyCheck take() { return std::move(check_); }

 private:
  PropertyCheck check_;
};

// Picks a second node distinct from `first`: half the time within three nodes
// per axis of it, otherwise anywhere.
std::size_t partner_node(const Grid& grid, std::size_t first, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> any(0, grid.size() - 1);
  std::uniform_int_distribution<int> step(-3, 3);
  const int n = grid.half_nodes();
  const bool near = coin(rng) == 1;
  for (;;) {
    std::size_t other = 0;
    if (near) {
      auto idx = grid.unflatten(first);
      for (int& i : idx) i = std::clamp(i + step(rng), -n, n);
      other = grid.flatten(idx);
    } else {
      other = any(rng);
    }
    if (other != first || grid.size() == 1) return other;
  }
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

void check_support_margin(const Grid& grid, double r, const BarenblattSolution& exact, double T) {
  const double radius = exact.support_radius(T);
  if (grid.half_width() - radius < r) {
    std::ostringstream msg;
    msg << "support radius " << radius << " at T = " << T << " leaves less than r = " << r
        << " of margin inside half width " << grid.half_width();
    throw ConfigError(msg.str());
  }
}

ErrorAccumulator::ErrorAccumulator(BarenblattSolution exact) : barenblatt_(std::move(exact)) {}

ErrorAccumulator::ErrorAccumulator(ExactFunction exact) : exact_(std::move(exact)) {
  if (!exact_) throw ConfigError("exact solution must be set");
}

std::vector<double> ErrorAccumulator::reference(const GridField& level, double t) const {
  if (barenblatt_) return barenblatt_->sample(level.grid(), t);
  const Grid& grid = level.grid();
  std::vector<double> out(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t k = 0; k < out.size(); ++k) {
    grid.point(k, x);
    out[k] = exact_(x, t);
  }
  return out;
}

void ErrorAccumulator::observe(long j, double t, const GridField& level) {
  const std::vector<double> ref = reference(level, t);
  const auto u = level.values();
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const double e = std::abs(u[k] - ref[k]);
    if (e > sup_error_) {
      sup_error_ = e;
      worst_level_ = j;
      worst_node_ = k;
    }
  }
}

double sup_error(const Trajectory& traj, const BarenblattSolution& exact) {
  if (traj.levels.empty()) throw ConfigError("empty trajectory");
  check_support_margin(traj.levels.front().grid(), traj.config.r, exact, traj.times.back());
  ErrorAccumulator acc(exact);
  for (std::size_t j = 0; j < traj.levels.size(); ++j) acc.observe(static_cast<long>(j), traj.times[j], traj.levels[j]);
  return acc.sup_error();
}

double sup_error(const Trajectory& traj, const ExactFunction& exact) {
  if (traj.levels.empty()) throw ConfigError("empty trajectory");
  ErrorAccumulator acc(exact);
  for (std::size_t j = 0; j < traj.levels.size(); ++j) acc.observe(static_cast<long>(j), traj.times[j], traj.levels[j]);
  return acc.sup_error();
}

double observed_order(std::span<const ErrorRow> rows) {
  if (rows.size() < 3) throw DomainError("observed order needs at least three rows");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& row : rows) {
    if (!(row.sup_error > 0.0) || !(row.h > 0.0)) throw DomainError("observed order needs positive h and errors");
    sx += std::log(row.h);
    sy += std::log(row.sup_error);
  }
  const double n = static_cast<double>(rows.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& row : rows) {
    const double dx = std::log(row.h) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(row.sup_error) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("observed order needs distinct h");
  return sxy / sxx;
}

ErrorRow barenblatt_error_row(const SchemeConfig& config, const DataSet& data) {
  if (!data.exact) throw ConfigError("error measurement needs Barenblatt data");
  check_support_margin(Grid(config.d, config.h, config.half_width), config.r, *data.exact, config.T);
  ErrorAccumulator acc(*data.exact);
  const auto start = std::chrono::steady_clock::now();
  march(config, data.data, [&](long j, double t, const GridField& level) { acc.observe(j, t, level); });
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return {config.h, config.r, config.tau, acc.sup_error(), elapsed.count()};
}

std::vector<ErrorRow> convergence_study(const SchemeConfig& base, const DataSet& data, std::span<const double> levels,
                                        double coupling_c) {
  if (levels.size() < 3) throw DomainError("a convergence study needs at least three levels");
  if (!data.exact) throw ConfigError("convergence study needs Barenblatt data");
  std::vector<ErrorRow> rows;
  for (double level : levels) {
    SchemeConfig cfg = base;
    if (cfg.d == 1) {
      cfg.h = level;
      cfg.r = level;
    } else {
      cfg.r = level;
      cfg.h = couple_h_to_r(level, cfg.p, cfg.d, coupling_c);
    }
    cfg.extension = data.extension;
    cfg.support_radius = data.exact->support_radius(cfg.T);
    rows.push_back(barenblatt_error_row(finalize_config(cfg, data.data), data));
  }
  return rows;
}

ConsistencyRow consistency_error(int d, double p, double r, double h, double window, int threads) {
  if (!(window > 0.0)) throw DomainError("window must be positive");
  const Stencil stencil = d == 1 ? stencil_1d(h, p) : stencil_ball(r, h, p, d);
  const Grid grid(d, h, window + stencil.reach() * h + h);
  const GridField psi = GridField::sample(grid, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  });
  const std::vector<double> discrete = apply_dp(stencil, psi, threads);
  const int limit = static_cast<int>(std::floor(window / h * (1.0 + 1e-12)));
  ConsistencyRow row{r, h, 0.0, 0.0, 0};
  std::vector<int> idx(d);
  std::vector<double> x(d);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.unflatten(k, idx);
    if (std::any_of(idx.begin(), idx.end(), [limit](int i) { return std::abs(i) > limit; })) continue;
    grid.point(k, x);
    const double e = std::abs(discrete[k] - plap_quadratic_oracle(x, p, d));
    long n2 = 0;
    for (int i : idx) n2 += static_cast<long>(i) * i;
    row.max_error = std::max(row.max_error, e);
    if (n2 >= 1) row.max_error_off_origin = std::max(row.max_error_off_origin, e);
    ++row.nodes;
  }
  return row;
}

std::vector<ConsistencyRow> consistency_sweep(int d, double p, std::span<const double> radii, double coupling_c,
                                              double window, int threads) {
  std::vector<ConsistencyRow> rows;
  for (double r : radii) {
    const double h = d == 1 ? r : couple_h_to_r(r, p, d, coupling_c);
    rows.push_back(consistency_error(d, p, r, h, window, threads));
  }
  return rows;
}

bool PropertyReport::passed() const {
  return blow_up.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string PropertyReport::to_json() const {
  nlohmann::ordered_json out;
  out["passed"] = passed();
  out["seed"] = seed;
  out["samples"] = samples;
  out["perturbation"] = perturbation;
  out["config"] = {{"p", config.p},     {"d", config.d},   {"T", config.T},
                   {"h", config.h},     {"r", config.r},   {"tau", config.tau},
                   {"N", config.N},     {"half_width", config.half_width},
                   {"cfl_mode", to_string(config.cfl_mode)}};
  out["cfl"] = {{"ktilde", cfl.ktilde}, {"C", cfl.constant}, {"tau_max", cfl.tau_max}, {"M_bound", cfl.m_bound}};
  if (!blow_up.empty()) out["blow_up"] = blow_up;
  auto& list = out["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"evaluated", c.evaluated},
                    {"worst_margin", c.worst_margin},
                    {"worst_lhs", c.worst_lhs},
                    {"worst_bound", c.worst_bound},
                    {"slack_used", c.slack_used},
                    {"worst_location", c.worst_location}});
  }
  return out.dump(2);
}

PropertyReport run_property_suite(const SchemeConfig& config, const HolderData& data,
                                  const PropertySuiteOptions& options) {
  if (config.cfl_mode == CflMode::Practical) {
    throw ConfigError("the property suite needs theoretical or manual CFL mode");
  }
  if (options.samples < 1) throw DomainError("samples must be positive");
  config.validate();
  data.validate();

  PropertyReport report;
  report.seed = options.seed;
  report.samples = options.samples;
  report.config = config;
  report.perturbation = options.perturbation;
  report.cfl = theoretical_cfl(config, data);

  const std::vector<std::string> names = {"modulus_preservation", "stability", "continuous_dependence",
                                          "time_equicontinuity", "space_time_equicontinuity"};
  Trajectory traj;
  try {
    traj = solve(config, data);
  } catch (const BlowUpError& e) {
    report.blow_up = e.what();
    for (const auto& name : names) {
      CheckRecorder rec(name);
      rec.fail(name == "stability" ? std::string("blow-up: ") + e.what() : "not evaluated after blow-up");
      report.checks.push_back(rec.take());
    }
    return report;
  }

  const Grid& grid = traj.levels.front().grid();
  const long n_steps = traj.steps();
  const double a = data.a;
  const double q = 2.0 + (1.0 - a) * (config.p - 2.0);
  const double T = config.T;
  const GridField f_values = GridField::sample(grid, data.f, config.extension);
  const double sup_u0 = traj.levels.front().sup_norm();
  const double sup_f = f_values.sup_norm();
  const double kt = report.cfl.ktilde;
  const auto time_modulus = [&](double s) { return kt * std::pow(s, a / q) + sup_f * s; };

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<long> any_level(0, n_steps);
  std::uniform_int_distribution<std::size_t> any_node(0, grid.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  {
    CheckRecorder rec(names[0]);
    for (long s = 0; s < options.samples; ++s) {
      const long j = any_level(rng);
      const std::size_t alpha = any_node(rng);
      const std::size_t gamma = partner_node(grid, alpha, rng);
      const double delta_a = std::pow(distance(grid, alpha, gamma), a);
      const double lhs = std::abs(traj.levels[j][alpha] - traj.levels[j][gamma]);
      const double bound = data.L_u0 * delta_a + traj.times[j] * data.L_f * delta_a;
      rec.record(lhs, bound, [&] {
        return "level " + std::to_string(j) + " nodes " + node_label(grid, alpha) + " " + node_label(grid, gamma);
      });
    }
    report.checks.push_back(rec.take());
  }

  {
    CheckRecorder rec(names[1]);
    for (long j = 0; j <= n_steps; ++j) {
      const double bound = sup_u0 + traj.times[j] * sup_f;
      rec.record(traj.levels[j].sup_norm(), bound, [&] { return "level " + std::to_string(j); });
    }
    report.checks.push_back(rec.take());
  }

  {
    CheckRecorder rec(names[2]);
    const HolderData perturbed = scaled_data(data, options.perturbation);
    const GridField f_perturbed = GridField::sample(grid, perturbed.f, config.extension);
    const double df = max_abs_difference(f_values.values(), f_perturbed.values());
    double du0 = 0.0;
    try {
      march(config, perturbed, [&](long j, double t, const GridField& level) {
        if (j == 0) du0 = max_abs_difference(traj.levels[0].values(), level.values());
        const double lhs = max_abs_difference(traj.levels[j].values(), level.values());
        rec.record(lhs, du0 + t * df, [&] { return "level " + std::to_string(j); });
      });
    } catch (const BlowUpError& e) {
      rec.fail(std::string("perturbed run blew up: ") + e.what());
    }
    report.checks.push_back(rec.take());
  }

  {
    CheckRecorder rec(names[3]);
    if (n_steps >= 1) {
      std::uniform_int_distribution<long> short_gap(1, std::min<long>(10, n_steps));
      for (long s = 0; s < options.samples; ++s) {
        long k = 0;
        if (s % 2 == 0) {
          k = short_gap(rng);
        } else {
          const double logk = unit(rng) * std::log(static_cast<double>(n_steps));
          k = std::clamp(static_cast<long>(std::exp(logk)), 1L, n_steps);
        }
        std::uniform_int_distribution<long> start(0, n_steps - k);
        const long j = start(rng);
        const double lhs = max_abs_difference(traj.levels[j + k].values(), traj.levels[j].values());
        const double bound = time_modulus(static_cast<double>(k) * config.tau);
        rec.record(lhs, bound, [&] { return "levels " + std::to_string(j) + " and " + std::to_string(j + k); });
      }
    }
    report.checks.push_back(rec.take());
  }

  {
    CheckRecorder rec(names[4]);
    for (long s = 0; s < options.samples; ++s) {
      const std::size_t alpha = any_node(rng);
      const std::size_t gamma = partner_node(grid, alpha, rng);
      const double t1 = T * unit(rng);
      double t2 = T * unit(rng);
      if (s % 2 == 0) t2 = std::clamp(t1 + (unit(rng) - 0.5) * 4.0 * config.tau, 0.0, T);
      const double lhs = std::abs(time_interpolate(traj, alpha, t1) - time_interpolate(traj, gamma, t2));
      const double delta_a = std::pow(distance(grid, alpha, gamma), a);
      const double bound = data.L_u0 * delta_a + T * data.L_f * delta_a + 3.0 * time_modulus(std::abs(t2 - t1));
      rec.record(lhs, bound, [&] {
        std::ostringstream where;
        where.precision(17);
        where << "nodes " << node_label(grid, alpha) << " " << node_label(grid, gamma) << " times " << t1 << " " << t2;
        return where.str();
      });
    }
    report.checks.push_back(rec.take());
  }

  return report;
}

}  // namespace plapfd
