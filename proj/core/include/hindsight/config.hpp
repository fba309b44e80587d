#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/bootstrap.hpp"
#include "hindsight/harness.hpp"

namespace hindsight {

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  bool set() const { return count > 0; }
  std::vector<double> points() const;
};

// Parsed union of everything the subcommands need. A single key=value file
// plus flag overrides; flags win. Unknown keys are rejected at parse time.
struct RunConfig {
  std::vector<DesignCell> designs{{10, 100}};
  double beta0 = 1.0;
  double phi0 = 0.0;
  std::vector<double> phi0_values;  // coverage/power cells; defaults to {phi0}
  double gamma0 = 1.0 / 3.0;
  double rho = 0.01;
  double tau = 0.01;

  std::vector<Method> methods{Method::modified};
  double level = 0.95;
  int bootstrap_draws = 500;
  double epsilon_floor = 0.001;
  double eta = 1e-16;
  bool ignore_regret = false;
  bool redraw_per_theta = false;
  double negligibility_threshold = 0.05;

  int replications = 500;
  int workers = 0;
  std::optional<std::uint64_t> seed;

  GridSpec beta_grid{0.0, 2.0, 21};
  GridSpec phi_grid{-1.0, 1.0, 21};
  GridSpec phi_axis{-1.0, 1.0, 21};

  std::string out_dir = "out";

  // mcdiarmid-check scenario
  int check_n = 100;
  long check_draws = 1000000;
  std::vector<double> check_rho{0.1, 0.01};
  double check_coeff = 1.0;

  std::vector<std::string> provided_keys;  // keys set explicitly (file order)

  bool has(const std::string& key) const;
  void require(const std::string& key) const;  // ConfigError naming the key
  std::uint64_t seed_or_env() const;  // flag/file, else HINDSIGHT_SEED, else error
  ExperimentSpec experiment() const;
  std::string manifest(const std::string& command) const;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig load_config_file(const std::string& path);

}  // namespace hindsight
