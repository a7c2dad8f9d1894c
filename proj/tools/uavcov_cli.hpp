#ifndef UAVCOV_CLI_HPP
#define UAVCOV_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uavcov/channel.hpp"

namespace uavcov::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitBadConfig = 2,
  kExitNumericFailure = 3,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Everything a run needs, in user units (dB, km^-2, meters). Converted to
// library units only by to_scenario().
struct RunConfig {
  double terrain_a = 4.6;
  double terrain_b = 0.0075;
  double terrain_c = 12.6;
  double d0_m = 100.0;

  double density_per_km2 = 1.0;
  double height_m = 100.0;
  double theta_db = 0.0;
  double snr_db = 40.0;  // +inf drops the noise term
  std::optional<double> ple = 4.0;
  bool sui = false;  // n(z) from the terrain law instead of ple

  std::string fading = "rayleigh";  // rayleigh | nakagami | rician
  double nakagami_m = 1.0;
  double rician_k_db = 10.0;

  std::string axis = "theta_db";  // theta_db | snr_db | z | ple | lambda
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> step;
  std::vector<std::string> methods{"exact-quadrature"};

  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double confidence = 0.95;
  unsigned workers = 0;
  std::optional<double> region_radius_m;

  std::string target = "height";  // optimize: height | density
  std::string out;                 // empty writes CSV to stdout

  // Test hook for validate: multiplies rho in the quadrature route.
  double perturb_rho = 1.0;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
// Unknown keys and wrong types raise ConfigError.
RunConfig from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// Checks field ranges and the sui/ple choice. Throws ConfigError.
void validate(const RunConfig& config);

Scenario to_scenario(const RunConfig& config);

// Config with the swept field set to value.
RunConfig at_axis(const RunConfig& config, double value);

// Inclusive grid from..to in step increments.
std::vector<double> axis_values(double from, double to, double step);

// Shortest text that round-trips within 17 significant digits.
std::string format_number(double value);

int cmd_sweep(const RunConfig& config, std::ostream& csv, std::ostream& log);
int cmd_optimize(const RunConfig& config, std::ostream& csv, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& report);

// Parses argv, runs the subcommand and returns the process exit code.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uavcov::cli

#endif  // UAVCOV_CLI_HPP
