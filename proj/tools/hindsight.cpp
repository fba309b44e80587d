// Command-line front end: simulate games, run test-inversion inference,
// reproduce the coverage tables and power curves, and validate the
// concentration bound empirically.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hindsight/bootstrap.hpp"
#include "hindsight/config.hpp"
#include "hindsight/errors.hpp"
#include "hindsight/game.hpp"
#include "hindsight/harness.hpp"
#include "hindsight/io.hpp"
#include "hindsight/linalg.hpp"
#include "hindsight/moments.hpp"
#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

namespace {

using hindsight::RunConfig;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> reps;
  std::optional<int> bootstrap;
  std::optional<std::string> method;
  std::optional<std::string> out;
};

RunConfig effective_config(const Overrides& ov) {
  RunConfig cfg = ov.config_path.empty() ? RunConfig{}
                                         : hindsight::load_config_file(ov.config_path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.workers) cfg.workers = *ov.workers;
  if (ov.reps) cfg.replications = *ov.reps;
  if (ov.bootstrap) cfg.bootstrap_draws = *ov.bootstrap;
  if (ov.method) cfg.methods = {hindsight::method_from_name(*ov.method)};
  if (ov.out) cfg.out_dir = *ov.out;
  return cfg;
}

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "Key=value config file");
  cmd->add_option("--seed", ov.seed, "Root seed (fallback: HINDSIGHT_SEED)");
  cmd->add_option("--workers", ov.workers, "Worker cap (0 = hardware)");
  cmd->add_option("--reps", ov.reps, "Monte Carlo replications");
  cmd->add_option("--bootstrap", ov.bootstrap, "Bootstrap draws B");
  cmd->add_option("--method", ov.method,
                  "benchmark, modified or ignore-regret (overrides config)");
  cmd->add_option("--out", ov.out, "Output directory");
}

int cmd_simulate(const Overrides& ov) {
  const RunConfig cfg = effective_config(ov);
  cfg.require("beta0");
  cfg.require("phi0");
  const std::uint64_t seed = cfg.seed_or_env();

  hindsight::ThetaParams theta{cfg.beta0, cfg.phi0, cfg.gamma0, cfg.rho, cfg.tau};
  hindsight::GameDesign design;
  design.group_sizes.assign(static_cast<std::size_t>(cfg.designs.front().num_groups),
                            cfg.designs.front().group_size);
  design.seed = seed;

  const hindsight::GameConfig game_config;
  const hindsight::OutcomeData data =
      hindsight::simulate_game(theta, design, game_config);

  hindsight::ensure_directory(cfg.out_dir);
  hindsight::write_outcome_csv(data, cfg.out_dir + "/outcome.csv");
  hindsight::write_text_file(cfg.out_dir + "/outcome.json",
                             hindsight::outcome_manifest(design, theta, game_config));
  hindsight::write_text_file(cfg.out_dir + "/manifest.json",
                             [&] {
                               RunConfig c = cfg;
                               c.seed = seed;
                               return c.manifest("simulate");
                             }());
  std::cout << "wrote " << data.num_players() << " players to " << cfg.out_dir
            << "/outcome.csv\n";
  return kExitOk;
}

int cmd_infer(const Overrides& ov, const std::string& data_path) {
  const RunConfig cfg = effective_config(ov);
  const std::uint64_t seed = cfg.seed_or_env();
  const hindsight::OutcomeData data = hindsight::read_outcome_csv(data_path);

  const std::vector<double> betas = cfg.beta_grid.points();
  const std::vector<double> phis = cfg.phi_grid.points();
  std::vector<hindsight::ThetaPoint> grid;
  grid.reserve(betas.size() * phis.size());
  for (double beta : betas) {
    for (double phi : phis) grid.push_back({beta, phi});
  }

  hindsight::BootstrapConfig boot;
  boot.B = cfg.bootstrap_draws;
  boot.alpha = 1.0 - cfg.level;
  boot.epsilon_floor = cfg.epsilon_floor;
  boot.method = cfg.methods.front();
  boot.seed = seed;
  boot.redraw_per_theta = cfg.redraw_per_theta;

  hindsight::MomentOptions options;
  options.rho = cfg.rho;
  options.tau = cfg.tau;
  options.eta = cfg.eta;
  options.ignore_regret = cfg.ignore_regret;

  const hindsight::InstrumentSet instruments = hindsight::InstrumentSet::standard();
  const hindsight::InferenceResult result =
      hindsight::confidence_set(data, grid, instruments, boot, options);

  if (result.max_negligibility > cfg.negligibility_threshold) {
    std::cerr << "warning: max negligibility sum "
              << hindsight::format_float(result.max_negligibility)
              << " exceeds threshold "
              << hindsight::format_float(cfg.negligibility_threshold)
              << "; modified-bootstrap levels may be unreliable\n";
  }

  hindsight::ensure_directory(cfg.out_dir);
  hindsight::write_inference_csv(result, cfg.out_dir + "/confidence_set.csv");

  ordered_json diag;
  diag["schema"] = "hindsight-diagnostics";
  diag["method"] = hindsight::method_name(result.method);
  diag["ignore_regret"] = cfg.ignore_regret;
  diag["negligibility_threshold"] = cfg.negligibility_threshold;
  diag["max_negligibility"] = result.max_negligibility;
  diag["negligibility_warning"] =
      result.max_negligibility > cfg.negligibility_threshold;
  ordered_json blocks = ordered_json::array();
  hindsight::MomentOptions diag_opts = options;
  if (boot.method == hindsight::Method::ignore_regret) diag_opts.ignore_regret = true;
  for (const auto& point : grid) {
    const auto spec = hindsight::PayoffSpec::linear_binary(point.beta, point.phi);
    const auto system =
        hindsight::build_moment_system(spec, data, instruments, diag_opts);
    ordered_json block = ordered_json::parse(hindsight::moment_system_json(system));
    block["beta"] = point.beta;
    block["phi"] = point.phi;
    blocks.push_back(block);
  }
  diag["theta"] = blocks;
  hindsight::write_text_file(cfg.out_dir + "/diagnostics.json", diag.dump(2) + "\n");
  hindsight::write_text_file(cfg.out_dir + "/manifest.json", [&] {
    RunConfig c = cfg;
    c.seed = seed;
    return c.manifest("infer");
  }());

  int accepted = 0;
  for (const auto& row : result.rows) accepted += row.accept ? 1 : 0;
  std::cout << "confidence set: accepted " << accepted << " of "
            << result.rows.size() << " grid points\n";
  return kExitOk;
}

int cmd_coverage(const Overrides& ov) {
  RunConfig cfg = effective_config(ov);
  cfg.seed = cfg.seed_or_env();
  const hindsight::CoverageReport report =
      hindsight::run_coverage(cfg.experiment());

  hindsight::ensure_directory(cfg.out_dir);
  hindsight::write_coverage_csv(report, cfg.out_dir + "/coverage.csv");
  hindsight::write_text_file(cfg.out_dir + "/manifest.json",
                             cfg.manifest("coverage"));
  for (const auto& cell : report.cells) {
    std::cout << "S=" << cell.num_groups << " Ns=" << cell.group_size
              << " phi0=" << cell.phi0 << " " << hindsight::method_name(cell.method)
              << " coverage=" << cell.coverage << " (se=" << cell.se << ")\n";
  }
  return kExitOk;
}

int cmd_power(const Overrides& ov) {
  RunConfig cfg = effective_config(ov);
  cfg.seed = cfg.seed_or_env();
  const std::vector<double> axis = cfg.phi_axis.points();
  const hindsight::CoverageReport report =
      hindsight::run_power_curve(cfg.experiment(), axis);

  hindsight::ensure_directory(cfg.out_dir);
  // One CSV per phi0 panel.
  for (double phi0 : cfg.phi0_values) {
    hindsight::CoverageReport panel;
    panel.seed = report.seed;
    for (const auto& cell : report.cells) {
      if (cell.phi0 == phi0) panel.cells.push_back(cell);
    }
    hindsight::write_coverage_csv(
        panel, cfg.out_dir + "/power_phi0_" + hindsight::format_float(phi0) + ".csv");
  }
  hindsight::write_text_file(cfg.out_dir + "/manifest.json", cfg.manifest("power"));
  std::cout << "power curves written for " << cfg.phi0_values.size()
            << " phi0 panel(s), " << axis.size() << " axis point(s)\n";
  return kExitOk;
}

int cmd_mcdiarmid_check(const Overrides& ov) {
  RunConfig cfg = effective_config(ov);
  const std::uint64_t seed = cfg.seed_or_env();
  const int n = cfg.check_n;
  const long draws = cfg.check_draws;
  const double coeff = cfg.check_coeff;

  // Scalar scenario: f(X) = sum_i coeff * X_i with X_i = +-1/2 fair coin,
  // so the variation at every coordinate is |coeff|.
  // Paired scenario: f2 loads only the first half of the coordinates; the
  // joint lower tail is gated by the matrix bound.
  const double lam_scalar = static_cast<double>(n) * coeff * coeff;
  const int half = n / 2;
  const hindsight::NonNegMatrix gram = hindsight::regularize(
      hindsight::NonNegMatrix::from_rows(
          {{static_cast<double>(n) * coeff * coeff,
            static_cast<double>(half) * coeff * coeff},
           {static_cast<double>(half) * coeff * coeff,
            static_cast<double>(half) * coeff * coeff}}),
      1e-16);

  bool all_pass = true;
  ordered_json rows = ordered_json::array();
  for (double rho : cfg.check_rho) {
    const double bound = std::sqrt(-std::log(rho) * lam_scalar / 2.0);
    const std::vector<double> vec_bound =
        hindsight::mcdiarmid_vector_bound(gram, rho);

    long tail_scalar = 0;
    long tail_vector = 0;
    for (long d = 0; d < draws; ++d) {
      hindsight::rng::Stream stream(seed, hindsight::rng::Tag::check_draw,
                                    static_cast<std::uint64_t>(d));
      double f1 = 0.0, f2 = 0.0;
      int i = 0;
      while (i + 64 <= n) {
        std::uint64_t bits = stream.next_u64();
        for (int b = 0; b < 64; ++b, ++i) {
          const double x = (bits >> b) & 1 ? 0.5 * coeff : -0.5 * coeff;
          f1 += x;
          if (i < half) f2 += x;
        }
      }
      if (i < n) {
        std::uint64_t bits = stream.next_u64();
        for (int b = 0; i < n; ++b, ++i) {
          const double x = (bits >> b) & 1 ? 0.5 * coeff : -0.5 * coeff;
          f1 += x;
          if (i < half) f2 += x;
        }
      }
      if (f1 < -bound) ++tail_scalar;
      if (f1 < -vec_bound[0] && f2 < -vec_bound[1]) ++tail_vector;
    }

    const double se = std::sqrt(rho * (1.0 - rho) / static_cast<double>(draws));
    const double threshold = rho + 3.0 * se;
    const double freq_scalar =
        static_cast<double>(tail_scalar) / static_cast<double>(draws);
    const double freq_vector =
        static_cast<double>(tail_vector) / static_cast<double>(draws);

    const bool pass_scalar = freq_scalar <= threshold;
    const bool pass_vector = freq_vector <= threshold;
    all_pass = all_pass && pass_scalar && pass_vector;

    std::cout << (pass_scalar ? "PASS" : "FAIL") << " scalar rho="
              << hindsight::format_float(rho)
              << " freq=" << hindsight::format_float(freq_scalar)
              << " bound_freq<=" << hindsight::format_float(threshold) << "\n";
    std::cout << (pass_vector ? "PASS" : "FAIL") << " vector rho="
              << hindsight::format_float(rho)
              << " freq=" << hindsight::format_float(freq_vector)
              << " bound_freq<=" << hindsight::format_float(threshold) << "\n";

    rows.push_back({{"rho", rho},
                    {"scalar_bound", bound},
                    {"scalar_freq", freq_scalar},
                    {"vector_bound", vec_bound},
                    {"vector_freq", freq_vector},
                    {"threshold", threshold},
                    {"pass", pass_scalar && pass_vector}});
  }

  hindsight::ensure_directory(cfg.out_dir);
  ordered_json report;
  report["schema"] = "hindsight-mcdiarmid-check";
  report["n"] = n;
  report["draws"] = draws;
  report["coeff"] = coeff;
  report["seed"] = seed;
  report["checks"] = rows;
  report["pass"] = all_pass;
  hindsight::write_text_file(cfg.out_dir + "/mcdiarmid_check.json",
                             report.dump(2) + "\n");
  hindsight::write_text_file(cfg.out_dir + "/manifest.json", [&] {
    RunConfig c = cfg;
    c.seed = seed;
    return c.manifest("mcdiarmid-check");
  }());
  return all_pass ? kExitOk : kExitFailedCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and partial-identification inference for large "
               "binary-action games with group-level public signals"};
  app.require_subcommand(1);

  Overrides ov;
  std::string data_path;

  CLI::App* simulate = app.add_subcommand("simulate", "Draw one game to CSV");
  add_common_flags(simulate, ov);

  CLI::App* infer = app.add_subcommand(
      "infer", "Confidence set over a (beta, phi) grid from an outcome CSV");
  add_common_flags(infer, ov);
  infer->add_option("--data", data_path, "Outcome CSV path")->required();

  CLI::App* coverage =
      app.add_subcommand("coverage", "Coverage table across design cells");
  add_common_flags(coverage, ov);

  CLI::App* power =
      app.add_subcommand("power", "False-coverage curves over a phi axis");
  add_common_flags(power, ov);

  CLI::App* check = app.add_subcommand(
      "mcdiarmid-check", "Empirical validation of the concentration bound");
  add_common_flags(check, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(ov);
    if (infer->parsed()) return cmd_infer(ov, data_path);
    if (coverage->parsed()) return cmd_coverage(ov);
    if (power->parsed()) return cmd_power(ov);
    if (check->parsed()) return cmd_mcdiarmid_check(ov);
  } catch (const hindsight::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hindsight::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const hindsight::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedCheck;
  }
  return kExitOk;
}
