#include "hindsight/regret.hpp"

#include <cmath>
#include <string>

#include "hindsight/errors.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

double PayoffSpec::cdf(double x) const {
  return noise_cdf ? noise_cdf(x) : std_normal_cdf(x);
}

PayoffSpec PayoffSpec::binary(ScalarFn v1_fn, ScalarFn v2_fn) {
  PayoffSpec spec;
  spec.kind = PayoffKind::binary_linear_in_mean;
  spec.v1 = std::move(v1_fn);
  spec.v2 = std::move(v2_fn);
  return spec;
}

PayoffSpec PayoffSpec::linear_binary(double beta, double phi) {
  return binary([beta](double x) { return x * beta; },
                [phi](double) { return phi; });
}

RegretProfile RegretProfile::zero(int num_players, int components) {
  RegretProfile profile;
  profile.lambda.assign(static_cast<std::size_t>(num_players),
                        std::vector<double>(static_cast<std::size_t>(components), 0.0));
  profile.rho_ind = 0.0;
  return profile;
}

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw ConfigError("regret: rho must lie in (0,1)");
  }
}

void check_group_sizes(const OutcomeData& data) {
  for (int s : data.group_sizes) {
    if (s < 2) {
      throw ConfigError("regret: group sizes below 2 leave no opponents");
    }
  }
}

}  // namespace

RegretProfile binary_regret(const PayoffSpec& spec, const OutcomeData& data,
                            double rho) {
  check_rho(rho);
  check_group_sizes(data);
  const int n = data.num_players();
  const double tail = std::sqrt(-0.5 * std::log(rho));

  RegretProfile profile;
  profile.lambda.resize(static_cast<std::size_t>(n));
  bool any_positive = false;
  for (int i = 0; i < n; ++i) {
    const double v2 = std::abs(spec.v2(data.covariates[i]));
    double weight_norm;
    if (spec.weights) {
      const auto& w = (*spec.weights)[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (double wj : w) acc += wj * wj;
      weight_norm = std::sqrt(acc);
    } else {
      const int ns = data.group_sizes[data.group_of[i]];
      weight_norm = 1.0 / std::sqrt(static_cast<double>(ns - 1));
    }
    const double lam = v2 * tail * weight_norm;
    if (lam > 0.0) any_positive = true;
    profile.lambda[static_cast<std::size_t>(i)] = {lam};
  }
  profile.rho_ind = any_positive ? rho : 0.0;
  return profile;
}

RegretProfile multinomial_regret(const PayoffSpec& spec, const OutcomeData& data,
                                 double rho, double eta) {
  check_rho(rho);
  check_group_sizes(data);
  const int num_alts = data.num_alternatives;
  if (num_alts < 2) {
    throw ConfigError("multinomial regret: need at least two alternatives");
  }
  if (spec.v2_alt.size() != static_cast<std::size_t>(num_alts)) {
    throw ConfigError("multinomial regret: v2_alt must have one entry per alternative");
  }
  const int dim = num_alts - 1;
  const int n = data.num_players();

  RegretProfile profile;
  profile.lambda.resize(static_cast<std::size_t>(n));
  bool any_positive = false;

  for (int i = 0; i < n; ++i) {
    const int ns = data.group_sizes[data.group_of[i]];
    const double x = data.covariates[i];
    const int chosen = data.actions[i];

    // Strategic-relevance vector toward the non-chosen alternatives, in
    // increasing alternative order; identical for every opponent j under
    // equal weights.
    std::vector<double> delta(static_cast<std::size_t>(dim));
    int c = 0;
    for (int k = 0; k < num_alts; ++k) {
      if (k == chosen) continue;
      const double slope = std::abs(spec.v2_alt[static_cast<std::size_t>(k)](x));
      if (slope > 0.0) any_positive = true;
      delta[static_cast<std::size_t>(c++)] =
          slope / static_cast<double>(ns - 1);
    }

    NonNegMatrix gram(static_cast<std::size_t>(dim));
    for (int j = 0; j < ns - 1; ++j) gram.add_outer(delta);

    const NonNegMatrix reg = regularize(gram, eta);
    const PFEigenpair pf = perron_frobenius(reg);
    const double scale = std::sqrt(-std::log(rho) / (2.0 * pf.value));
    std::vector<double> lam = reg.multiply(pf.vector);
    for (double& v : lam) v *= scale;
    profile.lambda[static_cast<std::size_t>(i)] = std::move(lam);
  }
  profile.rho_ind = any_positive ? rho : 0.0;
  return profile;
}

RegretProfile overlapping_regret(const PayoffSpec& spec, const OutcomeData& data,
                                 double theta_abs, double rho) {
  check_rho(rho);
  const int n = data.num_players();
  if (spec.memberships.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("overlapping regret: memberships must cover every player");
  }

  // Reference groups come from the membership lists, not from the disjoint
  // partition in the data; a player may sit in several of them.
  int num_groups = 0;
  for (const auto& groups : spec.memberships) {
    for (int s : groups) {
      if (s < 0) throw ConfigError("overlapping regret: bad group index");
      num_groups = std::max(num_groups, s + 1);
    }
  }
  std::vector<std::vector<int>> members(static_cast<std::size_t>(num_groups));
  for (int i = 0; i < n; ++i) {
    for (int s : spec.memberships[static_cast<std::size_t>(i)]) {
      members[static_cast<std::size_t>(s)].push_back(i);
    }
  }
  for (const auto& m : members) {
    if (m.size() == 1) {
      throw ConfigError("overlapping regret: a referenced group has a single member");
    }
  }

  RegretProfile profile;
  profile.lambda.resize(static_cast<std::size_t>(n));
  const double theta = std::abs(theta_abs);

  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::vector<int> touched;
  touched.reserve(64);

  for (int i = 0; i < n; ++i) {
    const auto& groups = spec.memberships[static_cast<std::size_t>(i)];
    if (groups.empty()) {
      throw ConfigError("overlapping regret: player " + std::to_string(i) +
                        " belongs to no group");
    }
    touched.clear();
    const double inv_count = 1.0 / static_cast<double>(groups.size());
    for (int s : groups) {
      const auto& group_members = members[static_cast<std::size_t>(s)];
      const double w =
          inv_count / static_cast<double>(group_members.size() - 1);
      for (int j : group_members) {
        if (j == i) continue;
        if (acc[static_cast<std::size_t>(j)] == 0.0) touched.push_back(j);
        acc[static_cast<std::size_t>(j)] += w;
      }
    }
    double sum_sq = 0.0;
    for (int j : touched) {
      sum_sq += sq(acc[static_cast<std::size_t>(j)]);
      acc[static_cast<std::size_t>(j)] = 0.0;
    }
    profile.lambda[static_cast<std::size_t>(i)] = {
        theta * std::sqrt(-std::log(rho) * 0.5 * sum_sq)};
  }
  profile.rho_ind = theta > 0.0 ? rho : 0.0;
  return profile;
}

}  // namespace hindsight
