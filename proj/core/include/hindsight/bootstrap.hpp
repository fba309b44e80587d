#pragma once

#include <cstdint>
#include <vector>

#include "hindsight/game.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/moments.hpp"

namespace hindsight {

enum class Method {
  benchmark,      // theta-independent multiplier statistic
  modified,       // residual-based multiplier statistic per theta
  ignore_regret,  // modified statistic with the regret machinery zeroed
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct BootstrapConfig {
  int B = 1000;
  double alpha = 0.05;
  double epsilon_floor = 0.001;
  Method method = Method::benchmark;
  std::uint64_t seed = 0;
  bool redraw_per_theta = false;  // redraw benchmark multipliers per grid point
};

// External standard-normal multipliers, one row per player, drawn from
// per-player substreams so the matrix is independent of evaluation order.
class MultiplierDraws {
 public:
  MultiplierDraws(int num_players, int num_draws, std::uint64_t seed,
                  std::uint64_t salt = 0);
  int num_players() const { return static_cast<int>(eps_.rows()); }
  int num_draws() const { return static_cast<int>(eps_.cols()); }
  std::span<const double> row(int i) const {
    return eps_.row(static_cast<std::size_t>(i));
  }

 private:
  RowMatrix eps_;
};

// T*_b = || (1/sqrt N) sum_i Zhat_i eps_{i,b} ||^2 with Zhat the grand-mean
// centered action-instrument rows; does not depend on theta.
std::vector<double> benchmark_stats(const OutcomeData& data,
                                    const InstrumentSet& instruments,
                                    const MultiplierDraws& draws);

// Multinomial variant over stacked action indicators.
std::vector<double> benchmark_stats_multinomial(const OutcomeData& data,
                                                const InstrumentSet& instruments,
                                                const MultiplierDraws& draws);

// T^mod_b = N || [lU*_b]_+ + [lL*_b]_- ||^2 from per-player moment rows.
std::vector<double> modified_stats(const RowMatrix& rows_upper,
                                   const RowMatrix& rows_lower,
                                   const MultiplierDraws& draws);

// Convenience: build the moment rows from a binary moment system.
std::vector<double> modified_stats(const OutcomeData& data,
                                   const MomentSystem& system,
                                   const InstrumentSet& instruments,
                                   const MultiplierDraws& draws);

// ceil((1 - alpha + tau_theta) * B)-th order statistic.
double critical_value(std::vector<double> stats, double alpha, double tau_theta);

struct ThetaPoint {
  double beta = 0.0;
  double phi = 0.0;
};

struct InferenceRow {
  ThetaPoint theta;
  double statistic = 0.0;
  double critical = 0.0;
  bool accept = false;
  double tau_adjust = 0.0;
  std::vector<double> negligibility;
};

struct InferenceResult {
  std::vector<InferenceRow> rows;
  Method method = Method::benchmark;
  double alpha = 0.05;
  double epsilon_floor = 0.001;
  int num_players = 0;
  int benchmark_draw_count = 0;  // how many times the theta-free stats were built
  double max_negligibility = 0.0;
};

// Test inversion over a grid of structural parameter points.
InferenceResult confidence_set(const OutcomeData& data,
                               const std::vector<ThetaPoint>& theta_grid,
                               const InstrumentSet& instruments,
                               const BootstrapConfig& config,
                               const MomentOptions& options);

// Subvector inference for phi: statistic and critical value are separate
// infima over the nuisance (beta) grid.
InferenceResult subvector_cs(const OutcomeData& data,
                             const std::vector<double>& phi_grid,
                             const std::vector<double>& beta_grid,
                             const InstrumentSet& instruments,
                             const BootstrapConfig& config,
                             const MomentOptions& options);

}  // namespace hindsight
