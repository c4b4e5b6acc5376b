#pragma once

// Run configurations, their JSON form, and dispatch to the library.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "leanreg/bootstrap.hpp"
#include "leanreg/error.hpp"
#include "leanreg/simlab.hpp"
#include "leanreg/testing.hpp"
#include "leanreg/variance.hpp"

namespace leanreg::cli {

enum class Command { fit, test, bootstrap, simulate, check };

std::string_view to_string(Command c) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

struct RunConfig {
  Command command = Command::fit;
  std::string data;  // CSV path for fit, test, bootstrap
  std::string response;
  bool add_intercept = false;
  std::optional<DgpKind> dgp;  // simulate, check
  std::size_t n = 500;
  std::size_t reps = 1000;
  VarianceMethod variance = VarianceMethod::sandwich_hc0;
  WeightDist weights = WeightDist::gaussian;
  std::size_t b = 1000;
  std::size_t m = 0;  // > 0 selects the m-of-n resampling bootstrap
  double alpha = 0.05;
  Reference reference = Reference::std_normal;
  std::optional<std::string> coord;  // test: column name or index; absent means max-|t|
  std::vector<double> null;          // test: hypothesized value(s); empty means zero
  std::optional<std::uint64_t> seed;

  // Execution knobs. They never change results and are not echoed.
  unsigned threads = 1;
};

/// Commands that draw random numbers and therefore need a seed.
bool is_stochastic(const RunConfig& config);

std::optional<Reference> reference_from_string(std::string_view s);  // normal | t | bootstrap
std::optional<VarianceMethod> variance_from_string(std::string_view s);  // classical | hc0 | hc1
std::optional<WeightDist> weights_from_string(std::string_view s);

/// Exit status: 0 ok, 2 usage/config, 3 data, 4 numerical.
int exit_code_for(ErrorCode code) noexcept;

/// Throws invalid_argument when the invariants fail (seed missing for a
/// stochastic command, alpha outside (0, 1), missing inputs).
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
/// Accepts either a config object or a whole report carrying "config".
RunConfig config_from_json(const nlohmann::json& j);

struct Report {
  Command command = Command::fit;
  nlohmann::json config;
  nlohmann::json results;
  std::vector<std::string> warnings;
  std::optional<Error> error;
  std::string coverage_csv;  // simulate only

  int exit_code() const noexcept { return error ? exit_code_for(error->code()) : 0; }
  nlohmann::json to_json() const;
  /// Two-space indented JSON followed by a newline.
  std::string dump() const;
};

/// Never throws a library Error: failures come back in Report::error.
Report run_command(const RunConfig& config);

}  // namespace leanreg::cli
