#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hindsight/bootstrap.hpp"
#include "hindsight/game.hpp"
#include "hindsight/moments.hpp"

namespace hindsight {

struct DesignCell {
  int num_groups = 10;
  int group_size = 100;
};

struct ExperimentSpec {
  std::vector<DesignCell> designs;
  std::vector<double> phi0_values;
  std::vector<Method> methods;
  double beta0 = 1.0;
  double gamma0 = 1.0 / 3.0;
  double rho = 0.01;
  double tau = 0.01;
  double nominal_level = 0.95;
  // Desk-scale defaults; the reference study used 1000/1000.
  int replications = 500;
  int bootstrap_draws = 500;
  double epsilon_floor = 0.001;
  double eta = 1e-16;
  bool ignore_regret = false;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency

  // Nuisance grid for subvector (recycling) inference.
  std::vector<double> beta_grid;

  void validate() const;
  double alpha() const { return 1.0 - nominal_level; }
};

struct CoverageCell {
  int num_groups = 0;
  int group_size = 0;
  double phi0 = 0.0;
  Method method = Method::benchmark;
  double level = 0.0;
  double phi_hypothesis = 0.0;  // equals phi0 for coverage tables
  double coverage = 0.0;
  double se = 0.0;
  double runtime_s = 0.0;
  bool is_curve_point = false;
};

struct CoverageReport {
  std::vector<CoverageCell> cells;
  std::uint64_t seed = 0;

  // Everything except runtimes, for determinism comparisons.
  std::string canonical_bytes() const;
};

// Coverage of the simulated truth across replications, one cell per
// (design, phi0, method).
CoverageReport run_coverage(const ExperimentSpec& spec);

// False-coverage frequencies of hypothesized phi values under the true
// phi0, using subvector inference over spec.beta_grid.
CoverageReport run_power_curve(const ExperimentSpec& spec,
                               const std::vector<double>& phi_axis);

int resolve_workers(int requested);

// Deterministic worker pool over [0, count).
void parallel_for(int count, int workers, const std::function<void(int)>& body);

}  // namespace hindsight
