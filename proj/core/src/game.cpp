#include "hindsight/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hindsight/errors.hpp"
#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

int GameDesign::num_players() const {
  int n = 0;
  for (int s : group_sizes) n += s;
  return n;
}

void GameDesign::validate() const {
  if (group_sizes.empty()) {
    throw ConfigError("game design: needs at least one group");
  }
  for (int s : group_sizes) {
    if (s < 2) {
      throw ConfigError("game design: every group size must be >= 2, got " +
                        std::to_string(s));
    }
  }
}

void OutcomeData::validate() const {
  const std::size_t n = actions.size();
  if (covariates.size() != n || group_of.size() != n) {
    throw DataError("outcome data: inconsistent per-player array lengths");
  }
  if (signals.size() != group_sizes.size()) {
    throw DataError("outcome data: signal count does not match group count");
  }
  std::vector<int> counts(group_sizes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int g = group_of[i];
    if (g < 0 || g >= num_groups()) {
      throw DataError("outcome data: player " + std::to_string(i) +
                      " has out-of-range group " + std::to_string(g));
    }
    ++counts[g];
    if (actions[i] < 0 || actions[i] >= num_alternatives) {
      throw DataError("outcome data: player " + std::to_string(i) +
                      " action outside the declared action set");
    }
  }
  for (int s = 0; s < num_groups(); ++s) {
    if (counts[s] != group_sizes[s]) {
      throw DataError("outcome data: group " + std::to_string(s) +
                      " size mismatch");
    }
  }
}

std::vector<std::vector<int>> OutcomeData::group_members() const {
  std::vector<std::vector<int>> members(group_sizes.size());
  for (int s = 0; s < num_groups(); ++s) {
    members[s].reserve(static_cast<std::size_t>(group_sizes[s]));
  }
  for (int i = 0; i < num_players(); ++i) members[group_of[i]].push_back(i);
  return members;
}

std::vector<double> OutcomeData::group_action_sums() const {
  std::vector<double> sums(group_sizes.size(), 0.0);
  for (int i = 0; i < num_players(); ++i) {
    if (actions[i] == 1) sums[group_of[i]] += 1.0;
  }
  return sums;
}

namespace {

struct FixedPointMap {
  double intercept;  // ((gamma*c + x_shift)*beta) / sigma
  double slope;      // phi / sigma

  double operator()(double p) const {
    return std_normal_cdf(intercept + slope * p);
  }
};

FixedPointMap make_map(const ThetaParams& theta, double c,
                       const GameConfig& config) {
  const double sigma = std::sqrt(sq(theta.beta * config.z_sd) + sq(config.eta_sd));
  const double base = (theta.gamma * c + config.x_shift) * theta.beta;
  return {base / sigma, theta.phi / sigma};
}

double bisect_root(const FixedPointMap& map, double lo, double hi, double tol) {
  // h(p) = p - map(p) has opposite signs at lo and hi.
  double flo = lo - map(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = mid - map(mid);
    if (std::abs(fmid) <= tol || hi - lo <= 1e-16) return mid;
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> find_choice_prob_roots(const ThetaParams& theta, double c,
                                           const GameConfig& config) {
  const FixedPointOptions& opts = config.fixed_point;
  if (std::abs(theta.phi) > opts.phi_limit) {
    throw ConfigError("solve_group_choice_prob: |phi| exceeds configured limit " +
                      std::to_string(opts.phi_limit));
  }
  const FixedPointMap map = make_map(theta, c, config);

  const int n = opts.scan_points;
  std::vector<double> roots;
  double prev_p = 0.0;
  double prev_h = prev_p - map(prev_p);
  if (prev_h == 0.0) roots.push_back(prev_p);
  for (int k = 1; k <= n; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(n);
    const double h = p - map(p);
    if (h == 0.0) {
      roots.push_back(p);
    } else if ((prev_h < 0.0) != (h < 0.0) && prev_h != 0.0) {
      roots.push_back(bisect_root(map, prev_p, p, opts.tol));
    }
    prev_p = p;
    prev_h = h;
  }

  // Collapse near-duplicates from roots landing on scan nodes.
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique_roots;
  for (double r : roots) {
    if (unique_roots.empty() || r - unique_roots.back() > 1e-9) {
      unique_roots.push_back(r);
    }
  }
  return unique_roots;
}

double solve_group_choice_prob(const ThetaParams& theta, double c,
                               const GameConfig& config) {
  const std::vector<double> roots = find_choice_prob_roots(theta, c, config);
  if (roots.empty()) {
    // The map is continuous from [0,1] into (0,1); a root always exists.
    throw NumericError("solve_group_choice_prob: scan found no fixed point");
  }
  switch (config.fixed_point.selection) {
    case RootSelection::smallest:
      return roots.front();
    case RootSelection::largest:
      return roots.back();
    case RootSelection::index: {
      const int k = config.fixed_point.selection_index;
      if (k < 0 || k >= static_cast<int>(roots.size())) {
        throw ConfigError("solve_group_choice_prob: root index " +
                          std::to_string(k) + " out of range (found " +
                          std::to_string(roots.size()) + " roots)");
      }
      return roots[static_cast<std::size_t>(k)];
    }
  }
  return roots.front();
}

OutcomeData simulate_game(const ThetaParams& theta, const GameDesign& design,
                          const GameConfig& config) {
  design.validate();
  const int num_groups = design.num_groups();
  const int num_players = design.num_players();

  OutcomeData data;
  data.num_alternatives = 2;
  data.group_sizes = design.group_sizes;
  data.actions.resize(num_players);
  data.covariates.resize(num_players);
  data.signals.resize(num_groups);
  data.group_of.resize(num_players);
  data.latent_z.resize(num_players);
  data.latent_eta.resize(num_players);
  data.latent_group_prob.resize(num_groups);

  for (int s = 0; s < num_groups; ++s) {
    rng::Stream stream(design.seed, rng::Tag::group_signal,
                       static_cast<std::uint64_t>(s));
    data.signals[s] = config.c_sd * stream.normal();
    data.latent_group_prob[s] =
        solve_group_choice_prob(theta, data.signals[s], config);
  }

  int i = 0;
  for (int s = 0; s < num_groups; ++s) {
    const double c = data.signals[s];
    const double p = data.latent_group_prob[s];
    for (int k = 0; k < design.group_sizes[s]; ++k, ++i) {
      rng::Stream stream(design.seed, rng::Tag::player,
                         static_cast<std::uint64_t>(i));
      const auto [z_raw, eta_raw] = stream.normal_pair();
      const double z = config.z_sd * z_raw;
      const double eta = config.eta_sd * eta_raw;
      const double x = z + theta.gamma * c + config.x_shift;
      data.group_of[i] = s;
      data.latent_z[i] = z;
      data.latent_eta[i] = eta;
      data.covariates[i] = x;
      data.actions[i] = (x * theta.beta + theta.phi * p + eta >= 0.0) ? 1 : 0;
    }
  }
  return data;
}

}  // namespace hindsight
