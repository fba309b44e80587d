#pragma once

#include <cstdint>
#include <vector>

namespace hindsight {

// Structural parameters plus the two tail levels used throughout inference.
struct ThetaParams {
  double beta = 1.0;   // covariate payoff coefficient
  double phi = 0.0;    // social-interaction coefficient
  double gamma = 1.0 / 3.0;  // public-signal loading in the covariate
  double rho = 0.01;   // regret tail level
  double tau = 0.01;   // slack tail level
};

struct GameDesign {
  std::vector<int> group_sizes;  // every entry >= 2
  std::uint64_t seed = 0;

  int num_groups() const { return static_cast<int>(group_sizes.size()); }
  int num_players() const;
  void validate() const;
};

enum class RootSelection { smallest, largest, index };

struct FixedPointOptions {
  int scan_points = 1024;        // sign-change scan over {0, 1/n, ..., 1}
  double tol = 1e-12;            // residual |p - map(p)| at the returned root
  double phi_limit = 2.0;        // precondition bound on |phi|
  RootSelection selection = RootSelection::smallest;
  int selection_index = 0;       // used when selection == index
};

// Distributional knobs of the data-generating process. The defaults are the
// simulation design used for all shipped presets.
struct GameConfig {
  double x_shift = -0.2;  // constant offset in the covariate equation
  double z_sd = 1.0;      // idiosyncratic covariate component
  double eta_sd = 1.0;    // payoff shock
  double c_sd = 1.0;      // group public signal
  FixedPointOptions fixed_point;
};

// One realized game. The latent_* fields exist only for simulated data and
// validation tests; inference operations never read them.
struct OutcomeData {
  int num_alternatives = 2;
  std::vector<int> actions;      // 0/1 in the binary case, else 0..K-1
  std::vector<double> covariates;
  std::vector<double> signals;   // one per group
  std::vector<int> group_of;     // player -> group index
  std::vector<int> group_sizes;

  std::vector<double> latent_z;
  std::vector<double> latent_eta;
  std::vector<double> latent_group_prob;  // equilibrium p_s(C_s) per group

  int num_players() const { return static_cast<int>(actions.size()); }
  int num_groups() const { return static_cast<int>(group_sizes.size()); }
  void validate() const;

  // Per-group member lists in player order.
  std::vector<std::vector<int>> group_members() const;
  // Per-group sums of 1{action == 1} (binary convenience).
  std::vector<double> group_action_sums() const;
};

// Equilibrium choice probability p solving
//   p = G(((gamma*c + x_shift)*beta + phi*p) / sqrt(beta^2 z_sd^2 + eta_sd^2))
// with G the standard normal CDF. Returns the root picked by opts.selection.
double solve_group_choice_prob(const ThetaParams& theta, double c,
                               const GameConfig& config = {});

// All fixed points found by the sign-change scan + bisection, ascending.
std::vector<double> find_choice_prob_roots(const ThetaParams& theta, double c,
                                           const GameConfig& config = {});

// Draw one game: group signals, covariates, equilibrium probabilities and
// binary actions. Deterministic given (theta, design, config).
OutcomeData simulate_game(const ThetaParams& theta, const GameDesign& design,
                          const GameConfig& config = {});

}  // namespace hindsight
