#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rwn/spectral.hpp"

namespace rwn::cli {

// Raised for schema or value problems in the run configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LogGridSpec {
  double x_min = 1e-6;
  double x_max = 20.0;
  int n = 100;
};

struct EigenscanGrid {
  int n = 101;                 // default_lambda_grid
  std::vector<double> values;  // explicit lambdas (map units); overrides n
};

struct WeylGrid {
  std::vector<int> n{4, 16, 64, 256};
  double lambda = 0.0;
};

struct MfuncGrid {
  int n = 21;               // on [-5 b, 5 b], b = Z alpha_s / r_star
  double im_scale = 1e-3;   // Im z = im_scale * b
};

struct RunConfig {
  int Z = 1;
  std::optional<double> A = 2.0e18;  // empty means extremal
  int k = -1;
  double fa = 0.0;
  double theta = 0.0;
  Rescale rescale = Rescale::ByInnerRadius;
  ConstantsLedger constants;
  LogGridSpec coords;
  LogGridSpec coeffs;
  EigenscanGrid eigenscan;
  WeylGrid weyldemo;
  MfuncGrid mfunc;

  [[nodiscard]] Spacetime spacetime() const;
  [[nodiscard]] RadialMode mode() const;
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;  // without the status column
  std::vector<std::vector<Cell>> rows;
  std::vector<bool> ok;              // per row
  nlohmann::json summary = nlohmann::json::object();

  [[nodiscard]] bool all_ok() const;
};

inline const std::vector<std::string> kCommands{"classify", "coords",   "coeffs", "endpoints", "threshold",
                                                "eigenscan", "weyldemo", "mfunc",  "candidate"};

// Rows are produced in grid order whatever the number of jobs.
// Throws ConfigError when the configuration does not suit the command.
Table run_command(const std::string& command, const RunConfig& config, int jobs);

std::string to_csv(const Table& t);
nlohmann::json envelope(const std::string& command, const RunConfig& config, const Table& t, int jobs,
                        bool include_rows);

}  // namespace rwn::cli
