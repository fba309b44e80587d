#include "hindsight/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hindsight/errors.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

InstrumentSet InstrumentSet::standard() {
  InstrumentSet set;
  set.g = {
      [](double) { return 1.0; },
      [](double x) { return std::abs(x); },
      [](double x) { return x >= 0.0 ? 1.0 : 0.0; },
      [](double x) { return std::abs(x) + (x >= 0.0 ? 1.0 : 0.0); },
  };
  set.names = {"one", "abs", "pos", "abs_plus_pos"};
  return set;
}

RowMatrix InstrumentSet::evaluate(const OutcomeData& data) const {
  const int n = data.num_players();
  const std::size_t num_cols = g.size();
  RowMatrix values(static_cast<std::size_t>(n), num_cols);
  for (int i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < num_cols; ++l) {
      const double v = g[l](data.covariates[i]);
      if (!(v >= 0.0)) {
        throw ConfigError("instrument " + std::to_string(l) +
                          " takes a negative value");
      }
      values(static_cast<std::size_t>(i), l) = v;
    }
  }
  return values;
}

namespace {

std::vector<double> leave_one_out_means(const OutcomeData& data) {
  const std::vector<double> sums = data.group_action_sums();
  std::vector<double> means(static_cast<std::size_t>(data.num_players()));
  for (int i = 0; i < data.num_players(); ++i) {
    const int s = data.group_of[i];
    const double own = data.actions[i] == 1 ? 1.0 : 0.0;
    means[static_cast<std::size_t>(i)] =
        (sums[static_cast<std::size_t>(s)] - own) /
        static_cast<double>(data.group_sizes[s] - 1);
  }
  return means;
}

// Per-alternative leave-one-out shares, K-1 columns for alternatives 1..K-1.
RowMatrix leave_one_out_shares(const OutcomeData& data) {
  const int n = data.num_players();
  const int dim = data.num_alternatives - 1;
  RowMatrix counts(static_cast<std::size_t>(data.num_groups()),
                   static_cast<std::size_t>(dim));
  for (int i = 0; i < n; ++i) {
    if (data.actions[i] >= 1) {
      counts(static_cast<std::size_t>(data.group_of[i]),
             static_cast<std::size_t>(data.actions[i] - 1)) += 1.0;
    }
  }
  RowMatrix shares(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
  for (int i = 0; i < n; ++i) {
    const int s = data.group_of[i];
    const double denom = static_cast<double>(data.group_sizes[s] - 1);
    for (int k = 0; k < dim; ++k) {
      const double own = data.actions[i] == k + 1 ? 1.0 : 0.0;
      shares(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) =
          (counts(static_cast<std::size_t>(s), static_cast<std::size_t>(k)) - own) /
          denom;
    }
  }
  return shares;
}

double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

void check_rho_ind(double rho_ind) {
  if (rho_ind >= 1.0) {
    throw NumericError("moment stats: degenerate tail level rho_ind >= 1");
  }
}

}  // namespace

PiBounds pi_bounds(const PayoffSpec& spec, const OutcomeData& data,
                   const RegretProfile& regrets) {
  const int n = data.num_players();
  const std::vector<double> ybar = leave_one_out_means(data);
  PiBounds bounds;
  bounds.upper.resize(static_cast<std::size_t>(n));
  bounds.lower.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = data.covariates[i];
    const double idx = spec.v1(x) + spec.v2(x) * ybar[static_cast<std::size_t>(i)];
    const double lam = regrets.scalar(i);
    bounds.upper[static_cast<std::size_t>(i)] = spec.cdf(idx + lam);
    bounds.lower[static_cast<std::size_t>(i)] = 1.0 - spec.cdf(idx - lam);
  }
  return bounds;
}

std::vector<PiBounds> logit_pi_bounds(const PayoffSpec& spec,
                                      const OutcomeData& data,
                                      const RegretProfile& regrets) {
  const int num_alts = data.num_alternatives;
  if (num_alts < 3) {
    throw ConfigError("logit_pi_bounds: need an unordered action set with K >= 3");
  }
  const int dim = num_alts - 1;
  const int n = data.num_players();
  const RowMatrix shares = leave_one_out_shares(data);

  std::vector<PiBounds> bounds(static_cast<std::size_t>(dim));
  for (auto& b : bounds) {
    b.upper.resize(static_cast<std::size_t>(n));
    b.lower.resize(static_cast<std::size_t>(n));
  }

  std::vector<double> exp_up(static_cast<std::size_t>(dim));
  std::vector<double> exp_dn(static_cast<std::size_t>(dim));
  for (int i = 0; i < n; ++i) {
    const double x = data.covariates[i];
    const auto& lam = regrets.lambda[static_cast<std::size_t>(i)];
    double denom_up = 1.0, denom_dn = 1.0;
    for (int k = 0; k < dim; ++k) {
      const double v1 = spec.v1_alt[static_cast<std::size_t>(k + 1)](x);
      const double v2 = spec.v2_alt[static_cast<std::size_t>(k + 1)](x);
      const double share = shares(static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(k));
      const double base = v1 + v2 * share;
      exp_up[static_cast<std::size_t>(k)] =
          std::exp(base + lam[static_cast<std::size_t>(k)]);
      exp_dn[static_cast<std::size_t>(k)] =
          std::exp(base - lam[static_cast<std::size_t>(k)]);
      denom_up += exp_up[static_cast<std::size_t>(k)];
      denom_dn += exp_dn[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < dim; ++k) {
      bounds[static_cast<std::size_t>(k)].upper[static_cast<std::size_t>(i)] =
          exp_up[static_cast<std::size_t>(k)] / denom_up;
      bounds[static_cast<std::size_t>(k)].lower[static_cast<std::size_t>(i)] =
          exp_dn[static_cast<std::size_t>(k)] / denom_dn;
    }
  }
  return bounds;
}

VariationArrays maximal_variations(const PayoffSpec& spec,
                                   const OutcomeData& data,
                                   const RegretProfile& regrets,
                                   const InstrumentSet& instruments) {
  const int n = data.num_players();
  const std::size_t num_cols = instruments.size();
  const RowMatrix g = instruments.evaluate(data);
  const double rho_scale = 1.0 / (1.0 - regrets.rho_ind);
  check_rho_ind(regrets.rho_ind);

  // Per-player contribution t_{i,l} and per-group column sums; player j's
  // row is (group sum - own term)/N since only co-members enter.
  RowMatrix term_up(static_cast<std::size_t>(n), num_cols);
  RowMatrix term_dn(static_cast<std::size_t>(n), num_cols);
  RowMatrix group_up(static_cast<std::size_t>(data.num_groups()), num_cols);
  RowMatrix group_dn(static_cast<std::size_t>(data.num_groups()), num_cols);

  for (int i = 0; i < n; ++i) {
    const int s = data.group_of[i];
    const int ns = data.group_sizes[s];
    const double x = data.covariates[i];
    const double v2 = spec.v2(x);
    const double lam = regrets.scalar(i);
    const double v1_up = spec.v1(x) + lam;
    const double v1_dn = spec.v1(x) - lam;
    const double step = v2 / static_cast<double>(ns - 1);
    const double h = step * static_cast<double>(ns - 2);

    // argmax of |G(z + step) - G(z)| over the reachable interval: the
    // density's symmetry point, clamped.
    const double peak = -0.5 * step;
    const double z_up = clamp(peak, std::min(v1_up, v1_up + h),
                              std::max(v1_up, v1_up + h));
    const double z_dn = clamp(peak, std::min(v1_dn, v1_dn + h),
                              std::max(v1_dn, v1_dn + h));
    const double var_up = std::abs(spec.cdf(z_up + step) - spec.cdf(z_up));
    const double var_dn = std::abs(spec.cdf(z_dn + step) - spec.cdf(z_dn));

    for (std::size_t l = 0; l < num_cols; ++l) {
      const double gval = g(static_cast<std::size_t>(i), l);
      const double tu = var_up * gval * rho_scale;
      const double td = var_dn * gval * rho_scale;
      term_up(static_cast<std::size_t>(i), l) = tu;
      term_dn(static_cast<std::size_t>(i), l) = td;
      group_up(static_cast<std::size_t>(s), l) += tu;
      group_dn(static_cast<std::size_t>(s), l) += td;
    }
  }

  VariationArrays out;
  out.upper = RowMatrix(static_cast<std::size_t>(n), num_cols);
  out.lower = RowMatrix(static_cast<std::size_t>(n), num_cols);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j < n; ++j) {
    const int s = data.group_of[j];
    for (std::size_t l = 0; l < num_cols; ++l) {
      out.upper(static_cast<std::size_t>(j), l) =
          (group_up(static_cast<std::size_t>(s), l) -
           term_up(static_cast<std::size_t>(j), l)) *
          inv_n;
      out.lower(static_cast<std::size_t>(j), l) =
          (group_dn(static_cast<std::size_t>(s), l) -
           term_dn(static_cast<std::size_t>(j), l)) *
          inv_n;
    }
  }
  return out;
}

VariationArrays logit_maximal_variations(const PayoffSpec& spec,
                                         const OutcomeData& data,
                                         const RegretProfile& regrets,
                                         const InstrumentSet& instruments) {
  const int num_alts = data.num_alternatives;
  if (num_alts < 3) {
    throw ConfigError("logit_maximal_variations: need K >= 3");
  }
  const int dim = num_alts - 1;
  const int n = data.num_players();
  const std::size_t num_g = instruments.size();
  const std::size_t num_cols = static_cast<std::size_t>(dim) * num_g;
  const RowMatrix g = instruments.evaluate(data);
  const double rho_scale = 1.0 / (1.0 - regrets.rho_ind);
  check_rho_ind(regrets.rho_ind);

  RowMatrix term_up(static_cast<std::size_t>(n), num_cols);
  RowMatrix term_dn(static_cast<std::size_t>(n), num_cols);
  RowMatrix group_up(static_cast<std::size_t>(data.num_groups()), num_cols);
  RowMatrix group_dn(static_cast<std::size_t>(data.num_groups()), num_cols);

  std::vector<double> v1(static_cast<std::size_t>(dim));
  std::vector<double> v2(static_cast<std::size_t>(dim));

  for (int i = 0; i < n; ++i) {
    const int s = data.group_of[i];
    const int ns = data.group_sizes[s];
    const double x = data.covariates[i];
    const auto& lam = regrets.lambda[static_cast<std::size_t>(i)];
    for (int k = 0; k < dim; ++k) {
      v1[static_cast<std::size_t>(k)] =
          spec.v1_alt[static_cast<std::size_t>(k + 1)](x);
      v2[static_cast<std::size_t>(k)] =
          spec.v2_alt[static_cast<std::size_t>(k + 1)](x);
    }

    // Shifted-logit probability of alternative k (0-based non-base index)
    // when that alternative's co-member share is y and every exponent is
    // shifted by extra.
    const auto prob = [&](int k, double y, double extra, double sign) {
      double denom = 1.0;
      double num = 0.0;
      for (int r = 0; r < dim; ++r) {
        const double share = r == k ? y : 0.0;
        const double e = std::exp(v1[static_cast<std::size_t>(r)] +
                                  sign * lam[static_cast<std::size_t>(r)] +
                                  v2[static_cast<std::size_t>(r)] * share + extra);
        denom += e;
        if (r == k) num = e;
      }
      return num / denom;
    };

    const int grid = ns - 2;
    for (int k = 0; k < dim; ++k) {
      const double shift = v2[static_cast<std::size_t>(k)] /
                           static_cast<double>(ns - 1);
      double var_up = 0.0, var_dn = 0.0;
      for (int q = 0; q <= std::max(grid, 1); ++q) {
        const double y = grid >= 1 ? static_cast<double>(q) /
                                         static_cast<double>(std::max(grid, 1))
                                   : 0.0;
        var_up = std::max(var_up, std::abs(prob(k, y, shift, +1.0) -
                                           prob(k, y, 0.0, +1.0)));
        var_dn = std::max(var_dn, std::abs(prob(k, y, shift, -1.0) -
                                           prob(k, y, 0.0, -1.0)));
      }
      for (std::size_t l = 0; l < num_g; ++l) {
        const std::size_t col = static_cast<std::size_t>(k) * num_g + l;
        const double gval = g(static_cast<std::size_t>(i), l);
        const double tu = var_up * gval * rho_scale;
        const double td = var_dn * gval * rho_scale;
        term_up(static_cast<std::size_t>(i), col) = tu;
        term_dn(static_cast<std::size_t>(i), col) = td;
        group_up(static_cast<std::size_t>(s), col) += tu;
        group_dn(static_cast<std::size_t>(s), col) += td;
      }
    }
  }

  VariationArrays out;
  out.upper = RowMatrix(static_cast<std::size_t>(n), num_cols);
  out.lower = RowMatrix(static_cast<std::size_t>(n), num_cols);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int j = 0; j < n; ++j) {
    const int s = data.group_of[j];
    for (std::size_t col = 0; col < num_cols; ++col) {
      out.upper(static_cast<std::size_t>(j), col) =
          (group_up(static_cast<std::size_t>(s), col) -
           term_up(static_cast<std::size_t>(j), col)) *
          inv_n;
      out.lower(static_cast<std::size_t>(j), col) =
          (group_dn(static_cast<std::size_t>(s), col) -
           term_dn(static_cast<std::size_t>(j), col)) *
          inv_n;
    }
  }
  return out;
}

SlackVectors slack_vectors(const VariationArrays& variations, double tau,
                           double eta) {
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw ConfigError("slack_vectors: tau must lie in (0,1)");
  }
  const std::size_t num_cols = variations.upper.cols();
  const std::size_t n = variations.upper.rows();

  const auto build = [&](const RowMatrix& d) {
    NonNegMatrix gram(num_cols);
    for (std::size_t j = 0; j < n; ++j) gram.add_outer(d.row(j));
    return regularize(gram, eta);
  };

  SlackVectors out;
  out.gram_upper = build(variations.upper);
  out.gram_lower = build(variations.lower);

  const double log_term = -std::log(tau / 2.0);
  const auto slack = [&](const NonNegMatrix& gram, double& delta) {
    const PFEigenpair pf = perron_frobenius(gram);
    delta = pf.value;
    std::vector<double> w = gram.multiply(pf.vector);
    const double scale = std::sqrt(log_term / (2.0 * pf.value));
    for (double& v : w) v *= scale;
    return w;
  };
  out.w_upper = slack(out.gram_upper, out.delta_upper);
  out.w_lower = slack(out.gram_lower, out.delta_lower);
  return out;
}

MomentStats moment_stats(const OutcomeData& data, const PiBounds& bounds,
                         double rho_ind, const InstrumentSet& instruments) {
  check_rho_ind(rho_ind);
  const int n = data.num_players();
  const std::size_t num_cols = instruments.size();
  const RowMatrix g = instruments.evaluate(data);
  const double rho_scale = 1.0 / (1.0 - rho_ind);

  MomentStats stats;
  stats.resid_upper.resize(static_cast<std::size_t>(n));
  stats.resid_lower.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double y = data.actions[i] == 1 ? 1.0 : 0.0;
    stats.resid_upper[static_cast<std::size_t>(i)] =
        y - bounds.upper[static_cast<std::size_t>(i)] * rho_scale;
    stats.resid_lower[static_cast<std::size_t>(i)] =
        y - (1.0 - bounds.lower[static_cast<std::size_t>(i)] * rho_scale);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  stats.l_upper.resize(num_cols);
  stats.l_lower.resize(num_cols);
  for (std::size_t l = 0; l < num_cols; ++l) {
    stats.l_upper[l] =
        inv_n * pairwise_sum_fn(0, static_cast<std::size_t>(n), [&](std::size_t i) {
          return stats.resid_upper[i] * g(i, l);
        });
    stats.l_lower[l] =
        inv_n * pairwise_sum_fn(0, static_cast<std::size_t>(n), [&](std::size_t i) {
          return stats.resid_lower[i] * g(i, l);
        });
  }
  return stats;
}

MultinomialMomentStats multinomial_moment_stats(
    const OutcomeData& data, const std::vector<PiBounds>& bounds,
    double rho_ind, const InstrumentSet& instruments) {
  check_rho_ind(rho_ind);
  const int n = data.num_players();
  const int dim = static_cast<int>(bounds.size());
  const std::size_t num_g = instruments.size();
  const std::size_t num_cols = static_cast<std::size_t>(dim) * num_g;
  const RowMatrix g = instruments.evaluate(data);
  const double rho_scale = 1.0 / (1.0 - rho_ind);

  MultinomialMomentStats stats;
  stats.rows_upper = RowMatrix(static_cast<std::size_t>(n), num_cols);
  stats.rows_lower = RowMatrix(static_cast<std::size_t>(n), num_cols);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) {
      const double y = data.actions[i] == k + 1 ? 1.0 : 0.0;
      const double ru =
          y - bounds[static_cast<std::size_t>(k)].upper[static_cast<std::size_t>(i)] *
                  rho_scale;
      const double rl =
          y - (1.0 - bounds[static_cast<std::size_t>(k)].lower[static_cast<std::size_t>(i)] *
                         rho_scale);
      for (std::size_t l = 0; l < num_g; ++l) {
        const std::size_t col = static_cast<std::size_t>(k) * num_g + l;
        stats.rows_upper(static_cast<std::size_t>(i), col) =
            ru * g(static_cast<std::size_t>(i), l);
        stats.rows_lower(static_cast<std::size_t>(i), col) =
            rl * g(static_cast<std::size_t>(i), l);
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  stats.l_upper.resize(num_cols);
  stats.l_lower.resize(num_cols);
  for (std::size_t col = 0; col < num_cols; ++col) {
    stats.l_upper[col] =
        inv_n * pairwise_sum_fn(0, static_cast<std::size_t>(n), [&](std::size_t i) {
          return stats.rows_upper(i, col);
        });
    stats.l_lower[col] =
        inv_n * pairwise_sum_fn(0, static_cast<std::size_t>(n), [&](std::size_t i) {
          return stats.rows_lower(i, col);
        });
  }
  return stats;
}

double test_statistic(const std::vector<double>& l_upper,
                      const std::vector<double>& l_lower,
                      const std::vector<double>& w_upper,
                      const std::vector<double>& w_lower, int num_players) {
  if (l_upper.size() != l_lower.size() || l_upper.size() != w_upper.size() ||
      l_upper.size() != w_lower.size()) {
    throw ConfigError("test_statistic: vector length mismatch");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < l_upper.size(); ++l) {
    const double channel =
        pos_part(l_upper[l] - w_upper[l]) + neg_part(l_lower[l] + w_lower[l]);
    acc += channel * channel;
  }
  return static_cast<double>(num_players) * acc;
}

double tau_theta(double delta_upper, double delta_lower, double tau) {
  return 0.5 * tau *
         ((delta_upper > 0.0 ? 1.0 : 0.0) + (delta_lower > 0.0 ? 1.0 : 0.0));
}

std::vector<double> negligibility_sums(const VariationArrays& variations) {
  const std::size_t num_cols = variations.upper.cols();
  const std::size_t n = variations.upper.rows();
  std::vector<double> sums(num_cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < num_cols; ++l) {
      sums[l] += sq(variations.lower(j, l)) + sq(variations.upper(j, l));
    }
  }
  return sums;
}

MomentSystem build_moment_system(const PayoffSpec& spec, const OutcomeData& data,
                                 const InstrumentSet& instruments,
                                 const MomentOptions& options) {
  MomentSystem sys;
  const int n = data.num_players();

  if (options.ignore_regret) {
    const RegretProfile zero = RegretProfile::zero(n);
    sys.rho_ind = 0.0;
    sys.regret.assign(static_cast<std::size_t>(n), 0.0);
    sys.bounds = pi_bounds(spec, data, zero);
    sys.stats = moment_stats(data, sys.bounds, 0.0, instruments);
    const std::size_t num_cols = instruments.size();
    sys.slacks.w_upper.assign(num_cols, 0.0);
    sys.slacks.w_lower.assign(num_cols, 0.0);
    sys.slacks.delta_upper = 0.0;
    sys.slacks.delta_lower = 0.0;
    sys.tau_adjust = 0.0;
    sys.negligibility.assign(num_cols, 0.0);
  } else {
    const RegretProfile regrets = binary_regret(spec, data, options.rho);
    sys.rho_ind = regrets.rho_ind;
    sys.regret.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      sys.regret[static_cast<std::size_t>(i)] = regrets.scalar(i);
    }
    sys.bounds = pi_bounds(spec, data, regrets);
    sys.stats = moment_stats(data, sys.bounds, regrets.rho_ind, instruments);
    sys.variations = maximal_variations(spec, data, regrets, instruments);
    sys.slacks = slack_vectors(sys.variations, options.tau, options.eta);
    sys.tau_adjust =
        tau_theta(sys.slacks.delta_upper, sys.slacks.delta_lower, options.tau);
    sys.negligibility = negligibility_sums(sys.variations);
  }

  sys.statistic = test_statistic(sys.stats.l_upper, sys.stats.l_lower,
                                 sys.slacks.w_upper, sys.slacks.w_lower, n);
  return sys;
}

}  // namespace hindsight
