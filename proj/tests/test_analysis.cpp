#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "plapfd/analysis.hpp"
#include "plapfd/data.hpp"
#include "plapfd/errors.hpp"

using namespace plapfd;

namespace {

SchemeConfig config_1d(double p, double h, double T, CflMode mode) {
  SchemeConfig c;
  c.p = p;
  c.h = h;
  c.T = T;
  c.half_width = 2.0;
  c.cfl_mode = mode;
  return c;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("sup_error vanishes on a trajectory built from the reference") {
    const BarenblattSolution sol(1, 4.0);
    SchemeConfig cfg = finalize_config(config_1d(4.0, 0.1, 0.2, CflMode::Practical), barenblatt_data(sol).data);
    Trajectory traj;
    traj.config = cfg;
    const Grid grid(1, cfg.h, cfg.half_width);
    for (long j = 0; j <= cfg.N; ++j) {
      const double t = static_cast<double>(j) * cfg.tau;
      traj.times.push_back(t);
      traj.levels.emplace_back(grid, sol.sample(grid, t));
    }
    CHECK(sup_error(traj, sol) == 0.0);

    cfg.extension = Extension::BoundaryTrace;
    const Trajectory unit = solve(cfg, constant_data(0.0, 1.0).data);
    const ExactFunction linear = [](std::span<const double>, double t) { return t; };
    CHECK(sup_error(unit, linear) <= 1e-12 * static_cast<double>(cfg.N));
  }

  TEST_CASE("accumulator reports the worst level and node") {
    const Grid grid(1, 1.0, 2.0);
    ErrorAccumulator acc(ExactFunction([](std::span<const double>, double) { return 0.0; }));
    acc.observe(0, 0.0, GridField(grid, {0, 0, 0.5, 0, 0}));
    acc.observe(1, 0.1, GridField(grid, {0, -2, 0, 0, 0}));
    acc.observe(2, 0.2, GridField(grid, {0, 0, 0, 1, 0}));
    CHECK(acc.sup_error() == 2.0);
    CHECK(acc.worst_level() == 1);
    CHECK(acc.worst_node() == 1);
  }

  TEST_CASE("refinement reduces the Barenblatt error") {
    const DataSet ds = barenblatt_data(BarenblattSolution(1, 4.0));
    const SchemeConfig base = config_1d(4.0, 0.1, 0.3, CflMode::Practical);
    const std::vector<double> levels = {0.1, 0.05, 0.025};
    const auto rows = convergence_study(base, ds, levels, 0.315);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].sup_error < rows[0].sup_error);
    CHECK(rows[2].sup_error < rows[1].sup_error);
    for (const auto& row : rows) {
      CHECK(row.r == row.h);
      CHECK(row.runtime_seconds >= 0.0);
    }
    const std::vector<double> two = {0.1, 0.05};
    CHECK_THROWS_AS(convergence_study(base, ds, two, 0.315), DomainError);
    CHECK_THROWS_AS(convergence_study(base, hat_data(), levels, 0.315), ConfigError);
  }

  TEST_CASE("support margin is enforced") {
    const BarenblattSolution sol(1, 3.0);
    const Grid tight(1, 0.1, 1.2);
    CHECK_THROWS_AS(check_support_margin(tight, 0.1, sol, 1.0), ConfigError);
    const Grid wide(1, 0.1, 2.0);
    CHECK_NOTHROW(check_support_margin(wide, 0.1, sol, 1.0));
  }

  TEST_CASE("observed_order") {
    std::vector<ErrorRow> rows;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) rows.push_back({h, h, 0.0, 3.0 * std::pow(h, 1.5), 0.0});
    CHECK(observed_order(rows) == doctest::Approx(1.5).epsilon(1e-12));
    std::vector<ErrorRow> scaled = rows;
    for (auto& row : scaled) row.sup_error *= 1e-4;
    CHECK(observed_order(scaled) == doctest::Approx(observed_order(rows)).epsilon(1e-12));
    for (auto& row : scaled) row.h *= 7.0;
    CHECK(observed_order(scaled) == doctest::Approx(1.5).epsilon(1e-12));

    CHECK_THROWS_AS(observed_order(std::span<const ErrorRow>(rows.data(), 2)), DomainError);
    std::vector<ErrorRow> bad = rows;
    bad[1].sup_error = 0.0;
    CHECK_THROWS_AS(observed_order(bad), DomainError);
    bad = rows;
    bad[2].h = bad[1].h;
    bad[3].h = bad[1].h;
    bad[0].h = bad[1].h;
    CHECK_THROWS_AS(observed_order(bad), DomainError);
  }

  TEST_CASE("consistency for |x|^2 in one dimension is exact away from the origin") {
    for (double r : {0.25, 0.125}) {
      const ConsistencyRow row = consistency_error(1, 3.0, r, r, 1.0);
      CHECK(row.max_error_off_origin == 0.0);
      CHECK(row.nodes == static_cast<std::size_t>(2 * std::lround(1.0 / r) + 1));
    }
    // For p = 4 the error is 2 h^2 at every node off the origin.
    const ConsistencyRow p4 = consistency_error(1, 4.0, 0.125, 0.125, 1.0);
    CHECK(p4.max_error_off_origin == doctest::Approx(2.0 * 0.125 * 0.125).epsilon(1e-12));
    const ConsistencyRow p2 = consistency_error(1, 2.0, 0.125, 0.125, 1.0);
    CHECK(p2.max_error == 0.0);
  }

  TEST_CASE("two-dimensional consistency shrinks under refinement") {
    const std::vector<double> radii = {0.4, 0.2, 0.1};
    const auto rows = consistency_sweep(2, 4.0, radii, 0.315, 0.5);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].h == doctest::Approx(couple_h_to_r(radii[i], 4.0, 2, 0.315)).epsilon(1e-15));
      if (i > 0) CHECK(rows[i].max_error < rows[i - 1].max_error);
    }
  }

  TEST_CASE("property suite on constant data uses no slack") {
    DataSet ds = constant_data(0.7);
    SchemeConfig cfg = config_1d(3.0, 0.2, 0.3, CflMode::Theoretical);
    cfg.extension = ds.extension;
    cfg = finalize_config(cfg, ds.data);
    const PropertyReport report = run_property_suite(cfg, ds.data, {200, 5, 0.9});
    CHECK(report.passed());
    REQUIRE(report.checks.size() == 5);
    for (const auto& check : report.checks) {
      CAPTURE(check.name);
      CHECK(check.passed);
      CHECK(check.evaluated > 0);
      // The time interpolant of a constant can be off by rounding.
      CHECK(check.slack_used <= (check.name == "space_time_equicontinuity" ? 1e-14 : 0.0));
    }
  }

  TEST_CASE("property suite passes for Barenblatt p = 3 and is reproducible") {
    const DataSet ds = barenblatt_data(BarenblattSolution(1, 3.0));
    SchemeConfig cfg = config_1d(3.0, 0.1, 0.5, CflMode::Theoretical);
    cfg = finalize_config(cfg, ds.data);
    const PropertySuiteOptions options{300, 11, 0.9};
    const PropertyReport a = run_property_suite(cfg, ds.data, options);
    const PropertyReport b = run_property_suite(cfg, ds.data, options);
    CHECK(a.passed());
    CHECK(a.to_json() == b.to_json());
    const auto json = nlohmann::json::parse(a.to_json());
    CHECK(json["seed"] == 11);
    CHECK(json["checks"].size() == 5);
  }

  TEST_CASE("property suite detects a step far beyond the CFL bound") {
    const DataSet ds = oscillatory_data(0.1);
    SchemeConfig cfg = finalize_config(config_1d(2.0, 0.1, 1.0, CflMode::Theoretical), ds.data);
    cfg.cfl_mode = CflMode::Manual;
    cfg.tau *= 1000.0;
    cfg.T = 10.0 * cfg.tau;
    cfg.N = 10;
    const PropertyReport report = run_property_suite(cfg, ds.data, {100, 3, 0.9});
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.checks[1].passed);
    CHECK(report.checks[1].worst_margin < 0.0);
  }

  TEST_CASE("property suite refuses practical mode") {
    const DataSet ds = hat_data();
    const SchemeConfig cfg = finalize_config(config_1d(3.0, 0.1, 0.1, CflMode::Practical), ds.data);
    CHECK_THROWS_AS(run_property_suite(cfg, ds.data), ConfigError);
  }
}
