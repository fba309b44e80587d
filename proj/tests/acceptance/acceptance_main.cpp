// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here. Optional argv filter: pass the
// criterion numbers to run, e.g. "./acceptance 1 7 8".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hindsight/bootstrap.hpp"
#include "hindsight/config.hpp"
#include "hindsight/game.hpp"
#include "hindsight/harness.hpp"
#include "hindsight/io.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/moments.hpp"
#include "hindsight/regret.hpp"
#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

using namespace hindsight;

namespace {

constexpr std::uint64_t kSeed = 20260809;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentSpec base_spec() {
  ExperimentSpec spec;
  spec.beta0 = 1.0;
  spec.gamma0 = 1.0 / 3.0;
  spec.rho = 0.01;
  spec.tau = 0.01;
  spec.nominal_level = 0.95;
  spec.replications = 500;
  spec.bootstrap_draws = 500;
  spec.seed = kSeed;
  spec.workers = 0;
  return spec;
}

double cell_coverage(const CoverageReport& report, Method method) {
  for (const auto& cell : report.cells) {
    if (cell.method == method) return cell.coverage;
  }
  return -1.0;
}

// ---------------------------------------------------------------------------
// 1-2: coverage table reproduction at the (10, 100) design.

Outcome criterion1() {
  ExperimentSpec spec = base_spec();
  spec.designs = {{10, 100}};
  spec.phi0_values = {0.0};
  spec.methods = {Method::benchmark, Method::modified};
  const CoverageReport report = run_coverage(spec);
  const double bench = cell_coverage(report, Method::benchmark);
  const double mod = cell_coverage(report, Method::modified);
  const bool pass = bench >= 0.99 && std::abs(mod - 0.948) <= 0.035;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "benchmark=%.3f (need >=0.99), modified=%.3f (need 0.948+-0.035)",
                bench, mod);
  return {pass, buf};
}

Outcome criterion2() {
  ExperimentSpec spec = base_spec();
  spec.designs = {{10, 100}};
  spec.phi0_values = {0.5};
  spec.methods = {Method::benchmark, Method::modified};
  const CoverageReport report = run_coverage(spec);
  const double bench = cell_coverage(report, Method::benchmark);
  const double mod = cell_coverage(report, Method::modified);
  const bool pass = bench >= 0.99 && mod >= 0.99;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "benchmark=%.3f, modified=%.3f (need both >=0.99)",
                bench, mod);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 3: invalidity when the regret machinery is switched off.

Outcome criterion3() {
  ExperimentSpec spec = base_spec();
  spec.designs = {{10, 300}};
  spec.phi0_values = {-1.0};
  spec.methods = {Method::modified};
  spec.gamma0 = 0.0;  // reference design for the ignored-regret study
  spec.nominal_level = 0.90;
  spec.ignore_regret = true;
  const CoverageReport report = run_coverage(spec);
  const double mod = cell_coverage(report, Method::modified);
  const bool pass = mod <= 0.88;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "ignored-regret coverage=%.3f (need <=0.88)", mod);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 4: power against phi = 0 with the nuisance recycled out.

Outcome criterion4() {
  ExperimentSpec spec = base_spec();
  spec.designs = {{10, 300}};
  spec.phi0_values = {0.5};
  spec.methods = {Method::modified};
  spec.replications = 200;
  spec.beta_grid = linspace(0.0, 2.0, 21);
  const CoverageReport report = run_power_curve(spec, {0.0});
  const double false_cov = report.cells.front().coverage;
  const bool pass = false_cov <= 0.05;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "false coverage of phi=0 is %.3f (need <=0.05)",
                false_cov);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 5: tail validity of the per-player compensation on equilibrium play.

Outcome criterion5() {
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes.assign(10, 100);
  const PayoffSpec spec = PayoffSpec::linear_binary(theta.beta, theta.phi);

  bool pass = true;
  std::string detail;
  for (double rho : {0.1, 0.01}) {
    long violations = 0, total = 0;
    for (int rep = 0; rep < 200; ++rep) {
      design.seed = rng::derive_key(kSeed, rng::Tag::replication_sim, 500,
                                    static_cast<std::uint64_t>(rep));
      const OutcomeData data = simulate_game(theta, design);
      const RegretProfile profile = binary_regret(spec, data, rho);
      const std::vector<double> sums = data.group_action_sums();
      for (int i = 0; i < data.num_players(); ++i) {
        const int s = data.group_of[i];
        const double ybar =
            (sums[static_cast<std::size_t>(s)] - data.actions[i]) /
            static_cast<double>(data.group_sizes[s] - 1);
        const double diff = data.covariates[i] * theta.beta +
                            theta.phi * ybar + data.latent_eta[i];
        const double payoff_gap = data.actions[i] == 1 ? diff : -diff;
        if (payoff_gap < -profile.scalar(i)) ++violations;
        ++total;
      }
    }
    const double freq = static_cast<double>(violations) / static_cast<double>(total);
    const double se = std::sqrt(rho * (1.0 - rho) / static_cast<double>(total));
    pass = pass && freq <= rho + 3.0 * se;
    char buf[80];
    std::snprintf(buf, sizeof(buf), "rho=%g: freq=%.5f limit=%.5f; ", rho, freq,
                  rho + 3.0 * se);
    detail += buf;
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 6: the moment-inequality event holds with the advertised frequency.

// True P{Y_i = 1 | X_i = x} under the simulated process: integrate the
// choice probability over the conditional law of the group signal.
class TrueChoiceProb {
 public:
  explicit TrueChoiceProb(const ThetaParams& theta) : theta_(theta) {
    const double c_lo = -8.0, c_hi = 8.0;
    const int nodes = 1601;
    grid_ = linspace(c_lo, c_hi, nodes);
    probs_.reserve(grid_.size());
    for (double c : grid_) probs_.push_back(solve_group_choice_prob(theta_, c));
  }

  double equilibrium_prob(double c) const {
    const double lo = grid_.front(), hi = grid_.back();
    if (c <= lo) return probs_.front();
    if (c >= hi) return probs_.back();
    const double step = (hi - lo) / static_cast<double>(grid_.size() - 1);
    const auto k = static_cast<std::size_t>((c - lo) / step);
    const double frac = (c - (lo + step * static_cast<double>(k))) / step;
    return probs_[k] * (1.0 - frac) + probs_[k + 1] * frac;
  }

  double operator()(double x) const {
    // C | X = x is normal with the usual Gaussian-conditioning moments.
    const double g = theta_.gamma;
    const double mean = g * (x + 0.2) / (1.0 + g * g);
    const double sd = 1.0 / std::sqrt(1.0 + g * g);
    const int intervals = 256;  // Simpson rule over mean +- 8 sd
    const double lo = mean - 8.0 * sd, hi = mean + 8.0 * sd;
    const double h = (hi - lo) / intervals;
    double acc = 0.0;
    for (int k = 0; k <= intervals; ++k) {
      const double c = lo + h * k;
      const double z = (c - mean) / sd;
      const double density = std::exp(-0.5 * z * z) / (sd * 2.5066282746310002);
      const double f =
          std_normal_cdf(x * theta_.beta + theta_.phi * equilibrium_prob(c)) *
          density;
      const double weight = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += weight * f;
    }
    return acc * h / 3.0;
  }

 private:
  ThetaParams theta_;
  std::vector<double> grid_;
  std::vector<double> probs_;
};

Outcome criterion6() {
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes.assign(10, 100);
  const PayoffSpec payoff = PayoffSpec::linear_binary(theta.beta, theta.phi);
  const InstrumentSet instruments = InstrumentSet::standard();
  const TrueChoiceProb true_prob(theta);
  MomentOptions options;
  options.rho = theta.rho;
  options.tau = theta.tau;

  const int reps = 500;
  int holds = 0;
  for (int rep = 0; rep < reps; ++rep) {
    design.seed = rng::derive_key(kSeed, rng::Tag::replication_sim, 600,
                                  static_cast<std::uint64_t>(rep));
    const OutcomeData data = simulate_game(theta, design);
    const MomentSystem system =
        build_moment_system(payoff, data, instruments, options);

    const int n = data.num_players();
    const RowMatrix g = instruments.evaluate(data);
    const double rho_scale = 1.0 / (1.0 - system.rho_ind);
    bool ok = true;
    for (std::size_t l = 0; l < instruments.size() && ok; ++l) {
      double sum_lower = 0.0, sum_upper = 0.0;
      for (int i = 0; i < n; ++i) {
        const double p = true_prob(data.covariates[i]);
        const double e_lower =
            p - (1.0 - system.bounds.lower[static_cast<std::size_t>(i)] * rho_scale);
        const double e_upper =
            p - system.bounds.upper[static_cast<std::size_t>(i)] * rho_scale;
        sum_lower += e_lower * g(static_cast<std::size_t>(i), l);
        sum_upper += e_upper * g(static_cast<std::size_t>(i), l);
      }
      sum_lower /= n;
      sum_upper /= n;
      ok = sum_lower + system.slacks.w_lower[l] >= 0.0 &&
           sum_upper - system.slacks.w_upper[l] <= 0.0;
    }
    holds += ok ? 1 : 0;
  }
  const double freq = static_cast<double>(holds) / reps;
  const double se = std::sqrt(theta.tau * (1.0 - theta.tau) / reps);
  const double need = 1.0 - theta.tau - 3.0 * se;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "event frequency=%.4f (need >= %.4f)", freq, need);
  return {freq >= need, buf};
}

// ---------------------------------------------------------------------------
// 7: numerical invariant battery.

Outcome criterion7() {
  std::string detail;

  // Dominant eigenpair residuals on 1000 random positive matrices, dim <= 8.
  rng::Stream stream(kSeed, rng::Tag::check_draw, 700);
  bool pf_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + stream.next_u64() % 8;
    std::vector<double> entries(dim * dim);
    for (double& v : entries) v = stream.uniform_pos();
    const NonNegMatrix m(dim, entries);
    const PFEigenpair pf = perron_frobenius(m);
    const std::vector<double> mv = m.multiply(pf.vector);
    double res_sq = 0.0, norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      res_sq += sq(mv[i] - pf.value * pf.vector[i]);
      norm_sq += sq(pf.vector[i]);
    }
    pf_ok = pf_ok && std::sqrt(res_sq) <= 1e-10 * m.frobenius_norm() &&
            std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-12;
  }
  detail += pf_ok ? "pf ok; " : "pf FAILED; ";

  // Binary regret equals the two-alternative vector path.
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes = {60, 40};
  design.seed = 7001;
  const OutcomeData data = simulate_game(theta, design);
  const RegretProfile binary =
      binary_regret(PayoffSpec::linear_binary(1.0, 0.5), data, 0.01);
  PayoffSpec multi;
  multi.kind = PayoffKind::multinomial_logit;
  const ScalarFn phi_fn = [](double) { return 0.5; };
  multi.v1_alt = {[](double) { return 0.0; }, [](double x) { return x; }};
  multi.v2_alt = {phi_fn, phi_fn};
  const RegretProfile vector_path = multinomial_regret(multi, data, 0.01, 1e-16);
  bool regret_ok = true;
  for (int i = 0; i < data.num_players(); ++i) {
    regret_ok = regret_ok &&
                std::abs(vector_path.scalar(i) - binary.scalar(i)) <= 1e-12;
  }
  detail += regret_ok ? "k2 ok; " : "k2 FAILED; ";

  // Fixed-point residuals across a parameter sweep.
  bool fp_ok = true;
  for (int trial = 0; trial < 400; ++trial) {
    ThetaParams t;
    t.beta = -2.0 + 4.0 * stream.uniform();
    t.phi = -1.5 + 3.0 * stream.uniform();
    t.gamma = -1.0 + 2.0 * stream.uniform();
    const double c = -3.0 + 6.0 * stream.uniform();
    const double p = solve_group_choice_prob(t, c);
    const double sigma = std::sqrt(t.beta * t.beta + 1.0);
    const double residual = std::abs(
        p - std_normal_cdf(((t.gamma * c - 0.2) * t.beta + t.phi * p) / sigma));
    fp_ok = fp_ok && residual <= 1e-12;
  }
  detail += fp_ok ? "fixed point ok; " : "fixed point FAILED; ";

  // lambda * sqrt(N_s - 1) constant along a quadrupling chain, bit for bit.
  const PayoffSpec payoff = PayoffSpec::linear_binary(1.0, 0.5);
  const auto lambda_at = [&](int size) {
    GameDesign d;
    d.group_sizes = {size};
    d.seed = 7002;
    return binary_regret(payoff, simulate_game(theta, d), 0.01).scalar(0);
  };
  const double l99 = lambda_at(100);
  const bool lambda_ok = lambda_at(397) * std::sqrt(396.0) == l99 * std::sqrt(99.0) &&
                         lambda_at(1585) * std::sqrt(1584.0) == l99 * std::sqrt(99.0);
  detail += lambda_ok ? "lambda scaling ok; " : "lambda scaling FAILED; ";

  // Statistic monotone in every slack coordinate, 1000 random instances.
  bool monotone_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + stream.next_u64() % 6;
    std::vector<double> lu(dim), ll(dim), wu(dim), wl(dim);
    for (std::size_t l = 0; l < dim; ++l) {
      lu[l] = -1.0 + 2.0 * stream.uniform();
      ll[l] = -1.0 + 2.0 * stream.uniform();
      wu[l] = stream.uniform();
      wl[l] = stream.uniform();
    }
    const double base = test_statistic(lu, ll, wu, wl, 64);
    auto wu2 = wu;
    auto wl2 = wl;
    const std::size_t bump = stream.next_u64() % dim;
    wu2[bump] += stream.uniform();
    wl2[bump] += stream.uniform();
    monotone_ok = monotone_ok && test_statistic(lu, ll, wu2, wl, 64) <= base &&
                  test_statistic(lu, ll, wu, wl2, 64) <= base;
  }
  detail += monotone_ok ? "monotone ok; " : "monotone FAILED; ";

  // Slack insensitive to the regularization floor on active data.
  const InstrumentSet instruments = InstrumentSet::standard();
  MomentOptions opt_a;
  opt_a.eta = 1e-16;
  MomentOptions opt_b;
  opt_b.eta = 1e-12;
  const MomentSystem sys_a = build_moment_system(payoff, data, instruments, opt_a);
  const MomentSystem sys_b = build_moment_system(payoff, data, instruments, opt_b);
  bool eta_ok = true;
  for (std::size_t l = 0; l < sys_a.slacks.w_upper.size(); ++l) {
    eta_ok = eta_ok &&
             std::abs(sys_a.slacks.w_upper[l] - sys_b.slacks.w_upper[l]) <
                 1e-6 * std::abs(sys_a.slacks.w_upper[l]) &&
             std::abs(sys_a.slacks.w_lower[l] - sys_b.slacks.w_lower[l]) <
                 1e-6 * std::abs(sys_a.slacks.w_lower[l]);
  }
  detail += eta_ok ? "eta ok" : "eta FAILED";

  return {pf_ok && regret_ok && fp_ok && lambda_ok && monotone_ok && eta_ok,
          detail};
}

// ---------------------------------------------------------------------------
// 8: determinism and parallel invariance.

std::string strip_runtime_column(const std::string& csv) {
  // Drop the trailing runtime_s field of every row (timing is the one
  // nondeterministic output field).
  std::string out;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    const std::string line = csv.substr(start, end - start);
    const std::size_t comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
    start = end + 1;
  }
  return out;
}

Outcome criterion8() {
  ExperimentSpec spec = base_spec();
  spec.designs = {{4, 40}};
  spec.phi0_values = {0.0, 0.5};
  spec.methods = {Method::benchmark, Method::modified};
  spec.replications = 40;
  spec.bootstrap_draws = 100;

  std::vector<std::string> canon;
  std::vector<std::string> csvs;
  for (int workers : {1, 4, 8}) {
    spec.workers = workers;
    const CoverageReport report = run_coverage(spec);
    canon.push_back(report.canonical_bytes());
    csvs.push_back(strip_runtime_column(coverage_csv(report)));
  }
  const bool worker_ok = canon[0] == canon[1] && canon[1] == canon[2] &&
                         csvs[0] == csvs[1] && csvs[1] == csvs[2];

  // Re-running the same spec is byte-identical (runtime masked).
  spec.workers = 2;
  const std::string again = strip_runtime_column(coverage_csv(run_coverage(spec)));
  const bool rerun_ok = again == csvs[0];

  // Simulated outcome artifacts are byte-identical without masking.
  ThetaParams theta{1.0, 0.5, 1.0 / 3.0, 0.01, 0.01};
  GameDesign design;
  design.group_sizes.assign(5, 20);
  design.seed = kSeed;
  const std::string csv_a = outcome_csv(simulate_game(theta, design));
  const std::string csv_b = outcome_csv(simulate_game(theta, design));
  const bool sim_ok = csv_a == csv_b;

  std::string detail = std::string(worker_ok ? "workers {1,4,8} agree; " :
                                               "worker mismatch; ") +
                       (rerun_ok ? "rerun identical; " : "rerun differs; ") +
                       (sim_ok ? "outcome bytes identical" : "outcome differs");
  return {worker_ok && rerun_ok && sim_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"coverage at phi0=0 (benchmark conservative, modified near nominal)",
       criterion1},
      {"coverage at phi0=0.5 (both methods conservative)", criterion2},
      {"under-coverage when regrets are ignored", criterion3},
      {"power: recycled confidence set excludes phi=0", criterion4},
      {"tail validity of the per-player compensation", criterion5},
      {"moment-inequality event frequency", criterion6},
      {"numerical invariant battery", criterion7},
      {"determinism and parallel invariance", criterion8},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("%s  criterion %d: %s — %s [%.1fs]\n",
                outcome.pass ? "PASS" : "FAIL", number, criteria[k].first.c_str(),
                outcome.detail.c_str(), secs);
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
