#include "plapfd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "plapfd/analysis.hpp"
#include "plapfd/exact.hpp"
#include "plapfd/mollifier.hpp"

namespace plapfd::cli {

namespace fs = std::filesystem;

namespace {

const Json& field(const Json& config, const char* key) {
  const auto it = config.find(key);
  if (it == config.end()) throw ConfigError(std::string("missing key: ") + key);
  return *it;
}

double number(const Json& config, const char* key) {
  const Json& v = field(config, key);
  if (!v.is_number()) throw ConfigError(std::string("key ") + key + " must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const Json& config, const char* key) {
  const Json& v = field(config, key);
  if (v.is_null()) return std::nullopt;
  return number(config, key);
}

long integer(const Json& config, const char* key) {
  const Json& v = field(config, key);
  if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>())) {
    throw ConfigError(std::string("key ") + key + " must be an integer");
  }
  return v.get<long>();
}

std::string text(const Json& config, const char* key) {
  const Json& v = field(config, key);
  if (!v.is_string()) throw ConfigError(std::string("key ") + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& config, const char* key) {
  const Json& v = field(config, key);
  if (!v.is_array()) throw ConfigError(std::string("key ") + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("key ") + key + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::optional<std::vector<double>> optional_numbers(const Json& config, const char* key) {
  if (field(config, key).is_null()) return std::nullopt;
  return numbers(config, key);
}

CflMode parse_cfl_mode(const std::string& s) {
  if (s == "theoretical") return CflMode::Theoretical;
  if (s == "practical") return CflMode::Practical;
  if (s == "manual") return CflMode::Manual;
  throw ConfigError("cfl_mode must be theoretical, practical or manual");
}

Extension parse_extension(const std::string& s) {
  if (s == "zero") return Extension::Zero;
  if (s == "boundary") return Extension::BoundaryTrace;
  throw ConfigError("extension must be zero or boundary");
}

int dimension(const Json& config) {
  const long d = integer(config, "d");
  if (d < 1 || d > kMaxDim) throw DomainError("d must lie in [1, " + std::to_string(kMaxDim) + "]");
  return static_cast<int>(d);
}

fs::path output_dir(const Json& config) {
  const fs::path dir = text(config, "output_dir");
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const Json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish_output(out, path);
}

int resolve_threads(std::optional<int> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PLAPFD_THREADS")) {
    int value = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || value < 0) {
      throw ConfigError("PLAPFD_THREADS must be a nonnegative integer");
    }
    return value;
  }
  return 1;
}

std::vector<double> default_levels(int d) {
  if (d == 1) return {0.04, 0.02, 0.01, 0.005};
  return {0.4, 0.2, 0.1, 0.05};
}

std::vector<double> default_radii(int d) {
  if (d == 1) return {0.25, 0.125, 0.0625, 0.03125};
  return {0.4, 0.2, 0.1, 0.05};
}

Json scheme_summary(const Experiment& ex, int threads) {
  const SchemeConfig& s = ex.scheme;
  Json run = {{"h", s.h},     {"r", s.r},         {"tau", s.tau},          {"N", s.N},
              {"K1", s.K1},   {"K2", s.K2},       {"M_moll", s.M_moll},    {"threads", threads},
              {"cfl_mode", to_string(s.cfl_mode)}, {"extension", to_string(s.extension)}};
  run["M_bound"] = build_stencil(s).m_bound();
  if (s.K1 > 0.0) {
    const CflSummary cfl = theoretical_cfl(s, ex.data.data);
    run["ktilde"] = cfl.ktilde;
    run["C"] = cfl.constant;
    run["tau_max_theoretical"] = cfl.tau_max;
  }
  return run;
}

Json with_run(const Json& config, Json run) {
  Json doc = config;
  doc["run"] = std::move(run);
  return doc;
}

void write_csv_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_number(values[i]);
  out << '\n';
}

void write_snapshot(const fs::path& path, const GridField& level, double t, const std::optional<BarenblattSolution>& exact) {
  auto out = open_output(path);
  const Grid& grid = level.grid();
  const int d = grid.dim();
  if (d == 1) {
    out << 'x';
  } else {
    for (int i = 0; i < d; ++i) out << (i ? "," : "") << 'x' << (i + 1);
  }
  out << ",u" << (exact ? ",exact" : "") << '\n';
  std::vector<double> row(d + 2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.point(k, std::span<double>(row.data(), d));
    row[d] = level[k];
    std::size_t n = d + 1;
    if (exact) row[n++] = (*exact)(std::span<const double>(row.data(), d), t);
    write_csv_row(out, std::span<const double>(row.data(), n));
  }
  finish_output(out, path);
}

int cmd_solve(const Json& config, int threads, std::ostream& out) {
  Experiment ex = resolve_experiment(config);
  ex.scheme.threads = threads;
  const fs::path dir = output_dir(config);
  std::vector<double> times = optional_numbers(config, "snapshot_times").value_or(std::vector<double>{0.0, ex.scheme.T});
  for (double t : times) {
    if (!(t >= 0.0 && t <= ex.scheme.T)) throw DomainError("snapshot times must lie in [0, T]");
  }

  Json snapshots = Json::array();
  std::vector<bool> written(times.size(), false);
  std::optional<GridField> previous;
  const double tau = ex.scheme.tau;
  const long n_steps = ex.scheme.N;
  march(ex.scheme, ex.data.data, [&](long j, double t_j, const GridField& level) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (written[i]) continue;
      const double t = times[i];
      if (t > t_j && j < n_steps) continue;
      const fs::path path = dir / ("snapshot_" + std::to_string(i) + ".csv");
      if (t == t_j || !previous) {
        write_snapshot(path, level, t, ex.data.exact);
      } else {
        const double t_prev = static_cast<double>(j - 1) * tau;
        std::vector<double> mix(level.size());
        for (std::size_t k = 0; k < mix.size(); ++k) {
          mix[k] = (t_j - t) / tau * (*previous)[k] + (t - t_prev) / tau * level[k];
        }
        write_snapshot(path, GridField(level.grid(), std::move(mix), level.extension()), t, ex.data.exact);
      }
      written[i] = true;
      snapshots.push_back({{"t", t}, {"file", path.filename().string()}});
    }
    previous.emplace(level);
  });

  Json run = scheme_summary(ex, threads);
  run["command"] = "solve";
  run["data"] = ex.data.name;
  run["snapshots"] = snapshots;
  write_json(dir / "metadata.json", with_run(config, run));
  out << "solved " << n_steps << " steps with tau = " << format_number(tau) << "; wrote " << times.size()
      << " snapshots to " << dir.string() << '\n';
  return kSuccess;
}

int cmd_convergence(const Json& config, int threads, std::ostream& out) {
  const int d = dimension(config);
  const std::vector<double> levels = optional_numbers(config, "levels").value_or(default_levels(d));
  if (levels.size() < 3) throw ConfigError("convergence needs at least three levels");
  Experiment ex = resolve_experiment(config);
  if (!ex.data.exact) throw ConfigError("convergence needs Barenblatt data");
  const fs::path dir = output_dir(config);
  ex.scheme.threads = threads;
  const std::vector<ErrorRow> rows = convergence_study(ex.scheme, ex.data, levels, number(config, "coupling_c"));
  const double order = observed_order(rows);

  const fs::path csv_path = dir / "errors.csv";
  auto csv = open_output(csv_path);
  csv << "h,r,tau,sup_error,runtime_seconds\n";
  for (const auto& row : rows) {
    const double v[] = {row.h, row.r, row.tau, row.sup_error, row.runtime_seconds};
    write_csv_row(csv, v);
  }
  finish_output(csv, csv_path);

  const fs::path dat_path = dir / "errors.dat";
  auto dat = open_output(dat_path);
  dat << "# log10(h) log10(sup_error)\n";
  for (const auto& row : rows) dat << format_number(std::log10(row.h)) << ' ' << format_number(std::log10(row.sup_error)) << '\n';
  finish_output(dat, dat_path);

  Json run = {{"command", "convergence"}, {"observed_order", order}, {"levels", levels}, {"threads", threads}};
  write_json(dir / "metadata.json", with_run(config, run));

  out << std::setw(12) << "h" << std::setw(12) << "r" << std::setw(14) << "tau" << std::setw(16) << "sup_error"
      << std::setw(12) << "seconds" << '\n';
  for (const auto& row : rows) {
    out << std::setw(12) << row.h << std::setw(12) << row.r << std::setw(14) << row.tau << std::setw(16)
        << row.sup_error << std::setw(12) << std::fixed << std::setprecision(2) << row.runtime_seconds
        << std::defaultfloat << std::setprecision(6) << '\n';
  }
  out << "observed order: " << format_number(order) << '\n';
  return kSuccess;
}

int cmd_consistency(const Json& config, int threads, std::ostream& out) {
  const int d = dimension(config);
  const double p = number(config, "p");
  static_cast<void>(Exponent(p));
  const std::vector<double> radii = optional_numbers(config, "radii").value_or(default_radii(d));
  const fs::path dir = output_dir(config);
  const auto rows = consistency_sweep(d, p, radii, number(config, "coupling_c"), number(config, "window"), threads);

  const fs::path path = dir / "consistency.csv";
  auto csv = open_output(path);
  csv << "r,h,max_error,max_error_off_origin,nodes\n";
  for (const auto& row : rows) {
    csv << format_number(row.r) << ',' << format_number(row.h) << ',' << format_number(row.max_error) << ','
        << format_number(row.max_error_off_origin) << ',' << row.nodes << '\n';
  }
  finish_output(csv, path);

  out << std::setw(12) << "r" << std::setw(14) << "h" << std::setw(16) << "max_error" << std::setw(16)
      << "off_origin" << '\n';
  for (const auto& row : rows) {
    out << std::setw(12) << row.r << std::setw(14) << row.h << std::setw(16) << row.max_error << std::setw(16)
        << row.max_error_off_origin << '\n';
  }
  return kSuccess;
}

int cmd_properties(const Json& config, int threads, std::ostream& out) {
  Experiment ex = resolve_experiment(config);
  if (ex.scheme.cfl_mode == CflMode::Practical) throw ConfigError("properties needs cfl_mode theoretical or manual");
  ex.scheme.threads = threads;
  const fs::path dir = output_dir(config);
  PropertySuiteOptions options;
  options.samples = integer(config, "samples");
  options.seed = static_cast<std::uint64_t>(integer(config, "seed"));
  options.perturbation = number(config, "perturbation");
  const PropertyReport report = run_property_suite(ex.scheme, ex.data.data, options);
  const fs::path path = dir / "properties.json";
  Json doc = Json::parse(report.to_json());
  doc["data"] = ex.data.name;
  write_json(path, doc);
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.evaluated << " evaluations, worst margin "
        << format_number(c.worst_margin) << ")";
    if (!c.passed) out << " at " << c.worst_location;
    out << '\n';
  }
  return report.passed() ? kSuccess : kPropertyFailure;
}

int cmd_constants(std::ostream& out) {
  out << "d,M,K1,K2,quad_error_estimate\n";
  for (int d = 1; d <= 3; ++d) {
    const MollifierConstants c = mollifier_constants(d);
    out << d;
    for (double v : {c.M_moll, c.K1, c.K2, c.quad_error_estimate}) out << ',' << format_number(v);
    out << '\n';
  }
  return kSuccess;
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

void apply_extras(Json& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() < 3) throw ConfigError("unexpected argument: " + arg);
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      apply_override(config, std::string_view(arg).substr(2, eq - 2), std::string_view(arg).substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("missing value for " + arg);
      apply_override(config, std::string_view(arg).substr(2), extras[++i]);
    }
  }
}

}  // namespace

Json default_config() {
  Json data = {{"kind", "barenblatt"}, {"t_shift", 1.0}, {"value", 0.0},   {"source", 0.0},
               {"a", 0.5},             {"source_scale", 0.0}, {"x", Json::array()}, {"u", Json::array()},
               {"f", Json::array()}};
  return Json{{"p", 4.0},
              {"d", 1},
              {"T", 1.0},
              {"h", nullptr},
              {"r", nullptr},
              {"tau", nullptr},
              {"half_width", 2.0},
              {"cfl_mode", "practical"},
              {"c_practical", 0.2},
              {"coupling_c", 0.315},
              {"extension", nullptr},
              {"data", data},
              {"levels", nullptr},
              {"radii", nullptr},
              {"window", 1.0},
              {"snapshot_times", nullptr},
              {"output_dir", "."},
              {"samples", 1000},
              {"seed", 20240917},
              {"perturbation", 0.9}};
}

Json merge_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  Json config = default_config();
  for (const auto& [key, value] : user.items()) {
    if (key == "run") continue;
    if (!config.contains(key)) throw ConfigError("unknown key: " + key);
    if (key == "data") {
      if (!value.is_object()) throw ConfigError("key data must be an object");
      for (const auto& [sub, v] : value.items()) {
        if (!config["data"].contains(sub)) throw ConfigError("unknown key: data." + sub);
        config["data"][sub] = v;
      }
    } else {
      config[key] = value;
    }
  }
  return config;
}

void apply_override(Json& config, std::string_view key, std::string_view value) {
  if (key.empty()) throw ConfigError("empty override key");
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const Json::parse_error&) {
    parsed = std::string(value);
  }
  Json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part(key.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (part.empty()) throw ConfigError("malformed override key: " + std::string(key));
    if (!node->is_object()) throw ConfigError("override key does not name an object: " + std::string(key));
    if (dot == std::string_view::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

DataSet make_data(const Json& config, double h) {
  const Json& data = field(config, "data");
  const std::string kind = text(data, "kind");
  const int d = dimension(config);
  if (kind == "barenblatt") {
    return barenblatt_data(BarenblattSolution(d, number(config, "p"), number(data, "t_shift")));
  }
  if (kind == "constant") return constant_data(number(data, "value"), number(data, "source"));
  if (kind == "hat") return hat_data();
  if (kind == "cusp") return cusp_data(number(data, "a"), number(data, "source_scale"));
  if (kind == "oscillatory") return oscillatory_data(h);
  if (kind == "tabulated") {
    if (d != 1) throw ConfigError("tabulated data is one-dimensional");
    return tabulated_data(numbers(data, "x"), numbers(data, "u"), numbers(data, "f"));
  }
  throw ConfigError("data.kind must be barenblatt, constant, hat, cusp, oscillatory or tabulated");
}

Experiment resolve_experiment(const Json& config) {
  SchemeConfig s;
  s.p = number(config, "p");
  static_cast<void>(Exponent(s.p));
  s.d = dimension(config);
  s.T = number(config, "T");
  s.half_width = number(config, "half_width");
  s.cfl_mode = parse_cfl_mode(text(config, "cfl_mode"));
  s.c_practical = number(config, "c_practical");
  const double coupling = number(config, "coupling_c");
  const auto h = optional_number(config, "h");
  const auto r = optional_number(config, "r");
  if (s.d == 1) {
    s.h = h.value_or(0.01);
    s.r = s.h;
  } else {
    s.r = r.value_or(0.2);
    s.h = h ? *h : couple_h_to_r(s.r, s.p, s.d, coupling);
  }
  if (s.cfl_mode == CflMode::Manual) {
    const auto tau = optional_number(config, "tau");
    if (!tau) throw ConfigError("cfl_mode manual needs tau");
    s.tau = *tau;
  }
  DataSet data = make_data(config, s.h);
  const Json& ext = field(config, "extension");
  s.extension = ext.is_null() ? data.extension : parse_extension(text(config, "extension"));
  if (data.exact) s.support_radius = data.exact->support_radius(s.T);
  s = finalize_config(s, data.data);
  return {s, std::move(data)};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explicit finite-difference solver for the parabolic p-Laplacian"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<int> threads;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "run the scheme and write snapshots"},
      {"convergence", "sup errors against the Barenblatt solution over refinement levels"},
      {"consistency", "operator error on |x|^2 over stencil radii"},
      {"properties", "check the structural bounds on a theoretical-CFL run"},
      {"constants", "print the mollifier constants for d = 1, 2, 3"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name != "constants") {
      sub->add_option("--config", config_path, "JSON config file");
      sub->add_option("--threads", threads, "worker threads (0 = all); falls back to PLAPFD_THREADS");
      sub->allow_extras();
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidation;
  }

  try {
    CLI::App* chosen = *std::find_if(subs.begin(), subs.end(), [](CLI::App* s) { return s->parsed(); });
    const std::string name = chosen->get_name();
    if (name == "constants") return cmd_constants(out);
    Json user = load_config(config_path);
    apply_extras(user, chosen->remaining());
    const Json config = merge_config(user);
    const int nthreads = resolve_threads(threads);
    if (name == "solve") return cmd_solve(config, nthreads, out);
    if (name == "convergence") return cmd_convergence(config, nthreads, out);
    if (name == "consistency") return cmd_consistency(config, nthreads, out);
    return cmd_properties(config, nthreads, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << " (estimate " << e.estimate() << ")\n";
    return kBlowUp;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace plapfd::cli
