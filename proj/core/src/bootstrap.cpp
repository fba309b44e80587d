#include "hindsight/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hindsight/errors.hpp"
#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

const char* method_name(Method m) {
  switch (m) {
    case Method::benchmark:
      return "benchmark";
    case Method::modified:
      return "modified";
    case Method::ignore_regret:
      return "ignore-regret";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "benchmark") return Method::benchmark;
  if (name == "modified") return Method::modified;
  if (name == "ignore-regret" || name == "ignore_regret") {
    return Method::ignore_regret;
  }
  throw ConfigError("unknown method '" + name +
                    "' (expected benchmark, modified or ignore-regret)");
}

MultiplierDraws::MultiplierDraws(int num_players, int num_draws,
                                 std::uint64_t seed, std::uint64_t salt)
    : eps_(static_cast<std::size_t>(num_players),
           static_cast<std::size_t>(num_draws)) {
  for (int i = 0; i < num_players; ++i) {
    rng::Stream stream(seed, rng::Tag::multiplier,
                       static_cast<std::uint64_t>(i), salt);
    auto row = eps_.row(static_cast<std::size_t>(i));
    int b = 0;
    while (b + 1 < num_draws) {
      const auto [a, c] = stream.normal_pair();
      row[static_cast<std::size_t>(b++)] = a;
      row[static_cast<std::size_t>(b++)] = c;
    }
    if (b < num_draws) row[static_cast<std::size_t>(b)] = stream.normal();
  }
}

namespace {

// || (1/sqrt N) sum_i rows_i eps_{i,b} ||^2 for every b.
std::vector<double> centered_norm_stats(const RowMatrix& rows,
                                        const MultiplierDraws& draws) {
  const std::size_t n = rows.rows();
  const std::size_t cols = rows.cols();
  const int num_draws = draws.num_draws();
  RowMatrix acc(static_cast<std::size_t>(num_draws), cols);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = rows.row(i);
    const auto eps = draws.row(static_cast<int>(i));
    for (int b = 0; b < num_draws; ++b) {
      const double e = eps[static_cast<std::size_t>(b)];
      auto out = acc.row(static_cast<std::size_t>(b));
      for (std::size_t l = 0; l < cols; ++l) out[l] += row[l] * e;
    }
  }
  std::vector<double> stats(static_cast<std::size_t>(num_draws), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int b = 0; b < num_draws; ++b) {
    double s = 0.0;
    const auto row = acc.row(static_cast<std::size_t>(b));
    for (std::size_t l = 0; l < cols; ++l) s += row[l] * row[l];
    stats[static_cast<std::size_t>(b)] = s * inv_n;
  }
  return stats;
}

RowMatrix centered_action_rows(const OutcomeData& data,
                               const InstrumentSet& instruments,
                               int num_alternatives) {
  const int n = data.num_players();
  const std::size_t num_g = instruments.size();
  const int dim = num_alternatives - 1;
  const std::size_t cols = static_cast<std::size_t>(dim) * num_g;
  const RowMatrix g = instruments.evaluate(data);

  std::vector<double> means(cols, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t col = 0; col < cols; ++col) {
    const int k = static_cast<int>(col / num_g);
    const std::size_t l = col % num_g;
    means[col] = inv_n * pairwise_sum_fn(0, static_cast<std::size_t>(n),
                                         [&](std::size_t i) {
                                           const double y =
                                               data.actions[i] == k + 1 ? 1.0 : 0.0;
                                           return y * g(i, l);
                                         });
  }

  RowMatrix rows(static_cast<std::size_t>(n), cols);
  for (int i = 0; i < n; ++i) {
    for (std::size_t col = 0; col < cols; ++col) {
      const int k = static_cast<int>(col / num_g);
      const std::size_t l = col % num_g;
      const double y = data.actions[i] == k + 1 ? 1.0 : 0.0;
      rows(static_cast<std::size_t>(i), col) =
          y * g(static_cast<std::size_t>(i), l) - means[col];
    }
  }
  return rows;
}

std::vector<double> positive_negative_norm_stats(const RowMatrix& rows_upper,
                                                 const RowMatrix& rows_lower,
                                                 const MultiplierDraws& draws) {
  const std::size_t n = rows_upper.rows();
  const std::size_t cols = rows_upper.cols();
  const int num_draws = draws.num_draws();
  RowMatrix acc_up(static_cast<std::size_t>(num_draws), cols);
  RowMatrix acc_dn(static_cast<std::size_t>(num_draws), cols);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ru = rows_upper.row(i);
    const auto rl = rows_lower.row(i);
    const auto eps = draws.row(static_cast<int>(i));
    for (int b = 0; b < num_draws; ++b) {
      const double e = eps[static_cast<std::size_t>(b)];
      auto up = acc_up.row(static_cast<std::size_t>(b));
      auto dn = acc_dn.row(static_cast<std::size_t>(b));
      for (std::size_t l = 0; l < cols; ++l) {
        up[l] += ru[l] * e;
        dn[l] += rl[l] * e;
      }
    }
  }
  // acc holds sum_i r_i g_i eps; l* = acc/N and the statistic carries a
  // factor N, so N ||[acc/N]_+ + [...]_-||^2 = ||...||^2 / N.
  std::vector<double> stats(static_cast<std::size_t>(num_draws), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int b = 0; b < num_draws; ++b) {
    const auto up = acc_up.row(static_cast<std::size_t>(b));
    const auto dn = acc_dn.row(static_cast<std::size_t>(b));
    double s = 0.0;
    for (std::size_t l = 0; l < cols; ++l) {
      const double channel = pos_part(up[l]) + neg_part(dn[l]);
      s += channel * channel;
    }
    stats[static_cast<std::size_t>(b)] = s * inv_n;
  }
  return stats;
}

}  // namespace

std::vector<double> benchmark_stats(const OutcomeData& data,
                                    const InstrumentSet& instruments,
                                    const MultiplierDraws& draws) {
  return centered_norm_stats(centered_action_rows(data, instruments, 2), draws);
}

std::vector<double> benchmark_stats_multinomial(const OutcomeData& data,
                                                const InstrumentSet& instruments,
                                                const MultiplierDraws& draws) {
  return centered_norm_stats(
      centered_action_rows(data, instruments, data.num_alternatives), draws);
}

std::vector<double> modified_stats(const RowMatrix& rows_upper,
                                   const RowMatrix& rows_lower,
                                   const MultiplierDraws& draws) {
  if (rows_upper.rows() != rows_lower.rows() ||
      rows_upper.cols() != rows_lower.cols()) {
    throw ConfigError("modified_stats: row matrices do not match");
  }
  return positive_negative_norm_stats(rows_upper, rows_lower, draws);
}

std::vector<double> modified_stats(const OutcomeData& data,
                                   const MomentSystem& system,
                                   const InstrumentSet& instruments,
                                   const MultiplierDraws& draws) {
  const int n = data.num_players();
  const std::size_t num_g = instruments.size();
  const RowMatrix g = instruments.evaluate(data);
  RowMatrix rows_upper(static_cast<std::size_t>(n), num_g);
  RowMatrix rows_lower(static_cast<std::size_t>(n), num_g);
  for (int i = 0; i < n; ++i) {
    const double ru = system.stats.resid_upper[static_cast<std::size_t>(i)];
    const double rl = system.stats.resid_lower[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < num_g; ++l) {
      rows_upper(static_cast<std::size_t>(i), l) =
          ru * g(static_cast<std::size_t>(i), l);
      rows_lower(static_cast<std::size_t>(i), l) =
          rl * g(static_cast<std::size_t>(i), l);
    }
  }
  return positive_negative_norm_stats(rows_upper, rows_lower, draws);
}

double critical_value(std::vector<double> stats, double alpha,
                      double tau_theta) {
  if (stats.empty()) {
    throw ConfigError("critical_value: no bootstrap statistics");
  }
  const double level = 1.0 - alpha + tau_theta;
  if (level > 1.0) {
    throw ConfigError("critical_value: quantile level 1-alpha+tau(theta) = " +
                      std::to_string(level) + " exceeds 1");
  }
  if (!(level > 0.0)) {
    throw ConfigError("critical_value: quantile level must be positive");
  }
  const std::size_t b = stats.size();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(b)));
  const std::size_t idx = std::max<std::size_t>(k, 1) - 1;
  std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(idx),
                   stats.end());
  return stats[idx];
}

namespace {

struct EvalContext {
  const OutcomeData& data;
  const InstrumentSet& instruments;
  const BootstrapConfig& config;
  const MomentOptions& options;
  const MultiplierDraws& draws;
  std::vector<double> benchmark;  // filled lazily, reused across the grid
  int benchmark_draw_count = 0;
};

InferenceRow evaluate_point(EvalContext& ctx, const ThetaPoint& theta,
                            const MultiplierDraws* point_draws) {
  MomentOptions opts = ctx.options;
  if (ctx.config.method == Method::ignore_regret) opts.ignore_regret = true;

  const PayoffSpec spec = PayoffSpec::linear_binary(theta.beta, theta.phi);
  const MomentSystem system =
      build_moment_system(spec, ctx.data, ctx.instruments, opts);

  const MultiplierDraws& draws = point_draws ? *point_draws : ctx.draws;
  double crit = 0.0;
  if (ctx.config.method == Method::benchmark) {
    if (point_draws || ctx.benchmark.empty()) {
      ctx.benchmark = benchmark_stats(ctx.data, ctx.instruments, draws);
      ++ctx.benchmark_draw_count;
    }
    crit = critical_value(ctx.benchmark, ctx.config.alpha, system.tau_adjust);
  } else {
    const std::vector<double> stats =
        modified_stats(ctx.data, system, ctx.instruments, draws);
    crit = critical_value(stats, ctx.config.alpha, system.tau_adjust);
  }

  InferenceRow row;
  row.theta = theta;
  row.statistic = system.statistic;
  row.critical = crit;
  row.accept =
      system.statistic <= std::max(crit, ctx.config.epsilon_floor);
  row.tau_adjust = system.tau_adjust;
  row.negligibility = system.negligibility;
  return row;
}

}  // namespace

InferenceResult confidence_set(const OutcomeData& data,
                               const std::vector<ThetaPoint>& theta_grid,
                               const InstrumentSet& instruments,
                               const BootstrapConfig& config,
                               const MomentOptions& options) {
  if (theta_grid.empty()) {
    throw ConfigError("confidence_set: empty theta grid");
  }
  if (config.B < 1) throw ConfigError("confidence_set: B must be >= 1");
  if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) {
    throw ConfigError("confidence_set: alpha must lie in (0,1)");
  }

  const MultiplierDraws draws(data.num_players(), config.B, config.seed);
  EvalContext ctx{data, instruments, config, options, draws, {}, 0};

  InferenceResult result;
  result.method = config.method;
  result.alpha = config.alpha;
  result.epsilon_floor = config.epsilon_floor;
  result.num_players = data.num_players();
  result.rows.reserve(theta_grid.size());

  for (std::size_t t = 0; t < theta_grid.size(); ++t) {
    if (config.redraw_per_theta && config.method == Method::benchmark) {
      const MultiplierDraws redraw(data.num_players(), config.B, config.seed,
                                   /*salt=*/t + 1);
      result.rows.push_back(evaluate_point(ctx, theta_grid[t], &redraw));
    } else {
      result.rows.push_back(evaluate_point(ctx, theta_grid[t], nullptr));
    }
  }
  result.benchmark_draw_count = ctx.benchmark_draw_count;
  for (const auto& row : result.rows) {
    for (double v : row.negligibility) {
      result.max_negligibility = std::max(result.max_negligibility, v);
    }
  }
  return result;
}

InferenceResult subvector_cs(const OutcomeData& data,
                             const std::vector<double>& phi_grid,
                             const std::vector<double>& beta_grid,
                             const InstrumentSet& instruments,
                             const BootstrapConfig& config,
                             const MomentOptions& options) {
  if (phi_grid.empty() || beta_grid.empty()) {
    throw ConfigError("subvector_cs: grids must be nonempty");
  }

  const MultiplierDraws draws(data.num_players(), config.B, config.seed);
  EvalContext ctx{data, instruments, config, options, draws, {}, 0};

  InferenceResult result;
  result.method = config.method;
  result.alpha = config.alpha;
  result.epsilon_floor = config.epsilon_floor;
  result.num_players = data.num_players();
  result.rows.reserve(phi_grid.size());

  for (double phi : phi_grid) {
    InferenceRow best;
    best.theta = {beta_grid.front(), phi};
    double min_stat = 0.0, min_crit = 0.0;
    bool first = true;
    for (double beta : beta_grid) {
      const InferenceRow row = evaluate_point(ctx, {beta, phi}, nullptr);
      if (first) {
        min_stat = row.statistic;
        min_crit = row.critical;
        best = row;
        first = false;
      } else {
        min_stat = std::min(min_stat, row.statistic);
        min_crit = std::min(min_crit, row.critical);
      }
    }
    best.theta = {0.0, phi};  // beta profiled out
    best.statistic = min_stat;
    best.critical = min_crit;
    best.accept = min_stat <= std::max(min_crit, config.epsilon_floor);
    result.rows.push_back(best);
  }
  result.benchmark_draw_count = ctx.benchmark_draw_count;
  for (const auto& row : result.rows) {
    for (double v : row.negligibility) {
      result.max_negligibility = std::max(result.max_negligibility, v);
    }
  }
  return result;
}

}  // namespace hindsight
