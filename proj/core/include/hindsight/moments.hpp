#pragma once

#include <string>
#include <vector>

#include "hindsight/game.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/regret.hpp"

namespace hindsight {

// Nonnegative instrument functions of the scalar covariate.
struct InstrumentSet {
  std::vector<ScalarFn> g;
  std::vector<std::string> names;

  std::size_t size() const { return g.size(); }

  // 1, |x|, 1{x>=0}, |x|+1{x>=0}.
  static InstrumentSet standard();

  // N x L matrix of g_l(X_i); validates nonnegativity.
  RowMatrix evaluate(const OutcomeData& data) const;
};

struct PiBounds {
  std::vector<double> upper;  // P{action incentive-compatible up to +lambda}
  std::vector<double> lower;
};

// Simulable choice-probability bounds for the binary payoff:
//   upper_i = G(v1_i + v2_i * ybar_{-i} + lambda_i)
//   lower_i = 1 - G(v1_i + v2_i * ybar_{-i} - lambda_i)
PiBounds pi_bounds(const PayoffSpec& spec, const OutcomeData& data,
                   const RegretProfile& regrets);

// Shifted-logit bounds per non-base alternative (K >= 3), using the
// leave-one-out vector of alternative shares.
std::vector<PiBounds> logit_pi_bounds(const PayoffSpec& spec,
                                      const OutcomeData& data,
                                      const RegretProfile& regrets);

struct VariationArrays {
  RowMatrix lower;  // N x L (or N x L(K-1)); row j = how much player j can
  RowMatrix upper;  // move the averaged probability bounds
};

// Per-player maximal variations of the binary probability bounds, using the
// closed-form argmax for symmetric quasiconcave noise densities.
VariationArrays maximal_variations(const PayoffSpec& spec,
                                   const OutcomeData& data,
                                   const RegretProfile& regrets,
                                   const InstrumentSet& instruments);

// Unordered-logit analogue: grid scan over the co-member share for each
// non-base alternative; columns stacked alternative-major.
VariationArrays logit_maximal_variations(const PayoffSpec& spec,
                                         const OutcomeData& data,
                                         const RegretProfile& regrets,
                                         const InstrumentSet& instruments);

struct SlackVectors {
  std::vector<double> w_lower, w_upper;
  double delta_lower = 0.0, delta_upper = 0.0;
  NonNegMatrix gram_lower{1}, gram_upper{1};  // regularized Gram matrices
};

// Gram matrices of the variation rows, their dominant eigenpairs, and the
// concentration slack added to each moment inequality.
SlackVectors slack_vectors(const VariationArrays& variations, double tau,
                           double eta);

struct MomentStats {
  std::vector<double> l_upper, l_lower;      // length L (or L(K-1))
  std::vector<double> resid_upper, resid_lower;  // per player (binary path)
};

MomentStats moment_stats(const OutcomeData& data, const PiBounds& bounds,
                         double rho_ind, const InstrumentSet& instruments);

// Stacked statistic for K >= 3: residual blocks per non-base alternative,
// instrument index fastest within a block. Also returns the per-player
// stacked moment rows (r_i kron g_i) used by the modified bootstrap.
struct MultinomialMomentStats {
  std::vector<double> l_upper, l_lower;  // length L(K-1)
  RowMatrix rows_upper, rows_lower;      // N x L(K-1)
};

MultinomialMomentStats multinomial_moment_stats(
    const OutcomeData& data, const std::vector<PiBounds>& bounds,
    double rho_ind, const InstrumentSet& instruments);

double test_statistic(const std::vector<double>& l_upper,
                      const std::vector<double>& l_lower,
                      const std::vector<double>& w_upper,
                      const std::vector<double>& w_lower, int num_players);

// tau/2 per active slack side, evaluated at the observed-data Gram matrices.
double tau_theta(double delta_upper, double delta_lower, double tau);

// Everything the tests and diagnostics need for one hypothesized parameter.
struct MomentOptions {
  double rho = 0.01;
  double tau = 0.01;
  double eta = 1e-16;
  bool ignore_regret = false;  // zero lambda, rho_ind and slack entirely
};

struct MomentSystem {
  std::vector<double> regret;               // per player
  double rho_ind = 0.0;
  PiBounds bounds;
  MomentStats stats;
  VariationArrays variations;
  SlackVectors slacks;
  double statistic = 0.0;
  double tau_adjust = 0.0;
  std::vector<double> negligibility;        // per instrument: sum_j d_j^2 (both sides)
};

MomentSystem build_moment_system(const PayoffSpec& spec, const OutcomeData& data,
                                 const InstrumentSet& instruments,
                                 const MomentOptions& options);

// Condition sums per column: sum_j (d_lower^2 + d_upper^2).
std::vector<double> negligibility_sums(const VariationArrays& variations);

}  // namespace hindsight
