#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hindsight/game.hpp"

namespace hindsight {

using ScalarFn = std::function<double(double)>;

enum class PayoffKind {
  binary_linear_in_mean,
  multinomial_logit,
  overlapping_groups,
};

// Payoff primitives shared by the regret and moment machinery.
//
// binary_linear_in_mean: payoff differential v1(X_i) + v2(X_i) * mean of the
// other group members' actions, plus an additive shock with CDF noise_cdf
// (symmetric quasiconcave density; standard normal by default).
//
// multinomial_logit: per-alternative intercepts/slopes v1_alt[k], v2_alt[k]
// for k = 0..K-1 with alternative 0 the normalized base (both identically 0
// there by convention), type-1 extreme value shocks.
//
// overlapping_groups: binary actions, slope theta_abs shared across players;
// memberships[i] lists the (possibly several) groups player i belongs to.
struct PayoffSpec {
  PayoffKind kind = PayoffKind::binary_linear_in_mean;

  ScalarFn v1;
  ScalarFn v2;
  ScalarFn noise_cdf;  // defaults to the standard normal CDF when empty

  std::vector<ScalarFn> v1_alt;
  std::vector<ScalarFn> v2_alt;

  std::vector<std::vector<int>> memberships;

  // Optional per-player interaction weights over the player's group
  // co-members (in group member order). Defaults to equal weights
  // 1/(N_s - 1).
  std::optional<std::vector<std::vector<double>>> weights;

  double cdf(double x) const;

  static PayoffSpec binary(ScalarFn v1, ScalarFn v2);
  // v1(x) = x * beta, v2 = phi; the payoff used by all shipped presets.
  static PayoffSpec linear_binary(double beta, double phi);
};

// Per-player compensations that make the observed action robust, with
// probability at least 1 - rho, to revealing everyone else's type.
struct RegretProfile {
  // One entry per player: length 1 (binary) or K-1 (multinomial).
  std::vector<std::vector<double>> lambda;
  // rho * 1{any player has strictly positive strategic relevance}; shared
  // across players (sample-max convention).
  double rho_ind = 0.0;

  double scalar(int i) const { return lambda[static_cast<std::size_t>(i)][0]; }
  static RegretProfile zero(int num_players, int components = 1);
};

RegretProfile binary_regret(const PayoffSpec& spec, const OutcomeData& data,
                            double rho);

// Vector regrets from the regularized Gram matrix of strategic-relevance
// vectors; component k corresponds to alternative k+1 (base excluded).
RegretProfile multinomial_regret(const PayoffSpec& spec, const OutcomeData& data,
                                 double rho, double eta);

RegretProfile overlapping_regret(const PayoffSpec& spec, const OutcomeData& data,
                                 double theta_abs, double rho);

}  // namespace hindsight
