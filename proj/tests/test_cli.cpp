#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "plapfd/cli.hpp"

using namespace plapfd;
using plapfd::cli::Json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "plapfd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("plapfd_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(res.ec == std::errc());
  REQUIRE(res.ptr == s.data() + s.size());
  return v;
}

void check_numeric_csv(const fs::path& path, std::size_t columns) {
  const auto rows = read_csv(path);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0].size() == columns);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == columns);
    for (const auto& f : rows[i]) CHECK(std::isfinite(parse_double(f)));
  }
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults and merging") {
    const Json d = cli::default_config();
    CHECK(d["p"] == 4.0);
    CHECK(d["cfl_mode"] == "practical");
    CHECK(d["data"]["kind"] == "barenblatt");
    const Json merged = cli::merge_config(Json{{"p", 3.0}, {"data", {{"kind", "hat"}}}});
    CHECK(merged["p"] == 3.0);
    CHECK(merged["data"]["kind"] == "hat");
    CHECK(merged["data"]["t_shift"] == 1.0);
    CHECK_THROWS_AS(cli::merge_config(Json{{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(cli::merge_config(Json{{"data", {{"bogus", 1}}}}), ConfigError);
    CHECK_NOTHROW(cli::merge_config(Json{{"run", {{"h", 0.1}}}}));
  }

  TEST_CASE("dotted overrides") {
    Json c = cli::default_config();
    cli::apply_override(c, "data.kind", "cusp");
    cli::apply_override(c, "data.a", "0.25");
    cli::apply_override(c, "levels", "[0.1,0.05,0.025]");
    cli::apply_override(c, "cfl_mode", "theoretical");
    CHECK(c["data"]["kind"] == "cusp");
    CHECK(c["data"]["a"] == 0.25);
    CHECK(c["levels"].size() == 3);
    CHECK(c["cfl_mode"] == "theoretical");
  }

  TEST_CASE("format_number round-trips") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
      const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
      CHECK(parse_double(cli::format_number(v)) == v);
    }
    CHECK(cli::format_number(0.5) == "0.5");
  }

  TEST_CASE("resolve_experiment fills h, r and tau") {
    const auto ex1 = cli::resolve_experiment(cli::default_config());
    CHECK(ex1.scheme.h == 0.01);
    CHECK(ex1.scheme.r == 0.01);
    CHECK(ex1.scheme.tau * static_cast<double>(ex1.scheme.N) == doctest::Approx(ex1.scheme.T).epsilon(1e-14));
    Json c = cli::default_config();
    c["d"] = 2;
    c["r"] = 0.4;
    c["T"] = 0.1;
    const auto ex2 = cli::resolve_experiment(c);
    CHECK(ex2.scheme.h == doctest::Approx(couple_h_to_r(0.4, 4.0, 2, 0.315)).epsilon(1e-15));
    c["cfl_mode"] = "manual";
    CHECK_THROWS_AS(cli::resolve_experiment(c), ConfigError);
  }

  TEST_CASE("exit codes for validation errors") {
    const fs::path dir = fresh_dir("validation");
    const std::string out = "--output_dir=" + dir.string();
    auto r = run_cli({"solve", out, "--p=1.5"});
    CHECK(r.code == cli::kValidation);
    CHECK(r.err.find("p must be") != std::string::npos);
    CHECK(run_cli({"solve", out, "--nonsense=1"}).code == cli::kValidation);
    CHECK(run_cli({"convergence", out, "--levels=[0.1]"}).code == cli::kValidation);
    CHECK(run_cli({"properties", out, "--cfl_mode=practical"}).code == cli::kValidation);
    CHECK(run_cli({"solve", out, "--config", (dir / "missing.json").string()}).code == cli::kIo);
    CHECK(run_cli({}).code == cli::kValidation);
  }

  TEST_CASE("missing output directory is an I/O error") {
    const fs::path dir = fresh_dir("io") / "does" / "not" / "exist";
    CHECK(run_cli({"solve", "--output_dir=" + dir.string(), "--h=0.1", "--T=0.01"}).code == cli::kIo);
  }

  TEST_CASE("blow-up exit code") {
    const fs::path dir = fresh_dir("blowup");
    const auto r = run_cli({"solve", "--output_dir=" + dir.string(), "--p=4", "--h=0.1", "--data.kind=oscillatory",
                            "--cfl_mode=manual", "--tau=10", "--T=2000"});
    CHECK(r.code == cli::kBlowUp);
    CHECK(r.err.find("non-finite") != std::string::npos);
  }

  TEST_CASE("property failure exit code") {
    const fs::path dir = fresh_dir("propfail");
    const auto r = run_cli({"properties", "--output_dir=" + dir.string(), "--p=2", "--h=0.1",
                            "--data.kind=oscillatory", "--cfl_mode=manual", "--tau=5", "--T=50", "--samples=50"});
    CHECK(r.code == cli::kPropertyFailure);
    CHECK(r.out.find("FAIL stability") != std::string::npos);
    CHECK(fs::exists(dir / "properties.json"));
  }

  TEST_CASE("constants subcommand") {
    const auto r = run_cli({"constants"});
    CHECK(r.code == cli::kSuccess);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "d,M,K1,K2,quad_error_estimate");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("solve metadata reproduces the snapshots byte for byte") {
    const fs::path first = fresh_dir("solve_a");
    const auto r = run_cli({"solve", "--output_dir=" + first.string(), "--p=3", "--h=0.05", "--T=0.1",
                            "--snapshot_times=[0,0.03,0.1]"});
    REQUIRE(r.code == cli::kSuccess);
    for (int i = 0; i < 3; ++i) check_numeric_csv(first / ("snapshot_" + std::to_string(i) + ".csv"), 3);
    CHECK(read_csv(first / "snapshot_0.csv")[0] == std::vector<std::string>{"x", "u", "exact"});

    const Json meta = Json::parse(slurp(first / "metadata.json"));
    CHECK(meta.contains("run"));
    CHECK(meta["run"]["N"].get<long>() >= 1);
    const fs::path second = fresh_dir("solve_b");
    Json replay = meta;
    replay["output_dir"] = second.string();
    {
      std::ofstream cfg(second / "replay.json");
      cfg << replay.dump(2);
    }
    REQUIRE(run_cli({"solve", "--config", (second / "replay.json").string()}).code == cli::kSuccess);
    for (int i = 0; i < 3; ++i) {
      const std::string name = "snapshot_" + std::to_string(i) + ".csv";
      CHECK(slurp(first / name) == slurp(second / name));
    }
  }

  TEST_CASE("two-dimensional snapshot header") {
    const fs::path dir = fresh_dir("solve_2d");
    REQUIRE(run_cli({"solve", "--output_dir=" + dir.string(), "--d=2", "--p=3", "--r=0.4", "--T=0.01",
                     "--half_width=2"})
                .code == cli::kSuccess);
    CHECK(read_csv(dir / "snapshot_0.csv")[0] == std::vector<std::string>{"x1", "x2", "u", "exact"});
    check_numeric_csv(dir / "snapshot_1.csv", 4);
  }

  TEST_CASE("convergence outputs") {
    const fs::path dir = fresh_dir("convergence");
    const auto r = run_cli({"convergence", "--output_dir=" + dir.string(), "--p=3", "--T=0.2",
                            "--levels=[0.1,0.05,0.025]"});
    REQUIRE(r.code == cli::kSuccess);
    CHECK(r.out.find("observed order") != std::string::npos);
    check_numeric_csv(dir / "errors.csv", 5);
    CHECK(read_csv(dir / "errors.csv")[0] ==
          std::vector<std::string>{"h", "r", "tau", "sup_error", "runtime_seconds"});
    const std::string dat = slurp(dir / "errors.dat");
    CHECK(dat.rfind("#", 0) == 0);
    CHECK(fs::exists(dir / "metadata.json"));
  }

  TEST_CASE("consistency outputs") {
    const fs::path dir = fresh_dir("consistency");
    REQUIRE(run_cli({"consistency", "--output_dir=" + dir.string(), "--p=3"}).code == cli::kSuccess);
    check_numeric_csv(dir / "consistency.csv", 5);
    const auto rows = read_csv(dir / "consistency.csv");
    CHECK(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(parse_double(rows[i][3]) == 0.0);
  }

  TEST_CASE("properties pass on hat data") {
    const fs::path dir = fresh_dir("properties");
    const auto r = run_cli({"properties", "--output_dir=" + dir.string(), "--p=2", "--h=0.1", "--data.kind=hat",
                            "--cfl_mode=theoretical", "--samples=100"});
    CHECK(r.code == cli::kSuccess);
    const Json report = Json::parse(slurp(dir / "properties.json"));
    CHECK(report["data"] == "hat");
    CHECK(report["checks"].size() == 5);
  }
}
