#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plapfd/data.hpp"
#include "plapfd/errors.hpp"
#include "plapfd/stepping.hpp"

namespace plapfd::cli {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kValidation = 2,
  kIo = 3,
  kBlowUp = 4,
  kPropertyFailure = 5,
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

using Json = nlohmann::ordered_json;

/// Every recognised key with its default. Null entries are resolved from
/// other keys (see resolve_scheme).
Json default_config();

/// Overlays `user` on the defaults; unknown keys raise ConfigError. A
/// top-level "run" object (written into metadata) is accepted and dropped.
Json merge_config(const Json& user);

/// Sets a possibly dotted key ("data.kind") from text; the value is parsed as
/// JSON and falls back to a plain string.
void apply_override(Json& config, std::string_view key, std::string_view value);

/// Human-facing form of a number: 17 significant digits, shortest exact.
std::string format_number(double value);

struct Experiment {
  /// Scheme parameters with tau and N resolved.
  SchemeConfig scheme;
  DataSet data;
};

/// Builds the data set selected by config["data"] for the given spacing.
DataSet make_data(const Json& config, double h);

/// Resolves h, r and the data set and finalizes the time step.
Experiment resolve_experiment(const Json& config);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plapfd::cli
