#include "hindsight/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "hindsight/errors.hpp"
#include "hindsight/io.hpp"
#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

void ExperimentSpec::validate() const {
  if (designs.empty()) throw ConfigError("experiment: no design cells");
  if (phi0_values.empty()) throw ConfigError("experiment: no phi0 values");
  if (methods.empty()) throw ConfigError("experiment: no methods");
  if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
  if (bootstrap_draws < 1) throw ConfigError("experiment: bootstrap draws must be >= 1");
  if (!(nominal_level > 0.0) || !(nominal_level < 1.0)) {
    throw ConfigError("experiment: nominal level must lie in (0,1)");
  }
  for (const DesignCell& cell : designs) {
    if (cell.num_groups < 1 || cell.group_size < 2) {
      throw ConfigError("experiment: design cells need S >= 1 and N_s >= 2");
    }
  }
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::min(resolve_workers(workers), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string CoverageReport::canonical_bytes() const {
  std::ostringstream out;
  out << "seed=" << seed << "\n";
  for (const CoverageCell& c : cells) {
    out << c.num_groups << ',' << c.group_size << ',' << format_float(c.phi0)
        << ',' << method_name(c.method) << ',' << format_float(c.level) << ','
        << format_float(c.phi_hypothesis) << ',' << format_float(c.coverage)
        << ',' << format_float(c.se) << '\n';
  }
  return out.str();
}

namespace {

GameDesign make_design(const DesignCell& cell, std::uint64_t seed) {
  GameDesign design;
  design.group_sizes.assign(static_cast<std::size_t>(cell.num_groups),
                            cell.group_size);
  design.seed = seed;
  return design;
}

double binomial_se(double p, int n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

CoverageReport run_coverage(const ExperimentSpec& spec) {
  spec.validate();
  CoverageReport report;
  report.seed = spec.seed;

  std::uint64_t cell_index = 0;
  for (const DesignCell& design_cell : spec.designs) {
    for (double phi0 : spec.phi0_values) {
      const ThetaParams theta0{spec.beta0, phi0, spec.gamma0, spec.rho, spec.tau};
      const int reps = spec.replications;
      // accepts[m][r] for method m, replication r
      std::vector<std::vector<char>> accepts(
          spec.methods.size(), std::vector<char>(static_cast<std::size_t>(reps), 0));

      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t cell_id = cell_index++;
      parallel_for(reps, spec.workers, [&](int rep) {
        const std::uint64_t sim_seed = rng::derive_key(
            spec.seed, rng::Tag::replication_sim, cell_id,
            static_cast<std::uint64_t>(rep));
        const std::uint64_t boot_seed = rng::derive_key(
            spec.seed, rng::Tag::replication_boot, cell_id,
            static_cast<std::uint64_t>(rep));

        const OutcomeData data =
            simulate_game(theta0, make_design(design_cell, sim_seed));

        MomentOptions options;
        options.rho = spec.rho;
        options.tau = spec.tau;
        options.eta = spec.eta;
        options.ignore_regret = spec.ignore_regret;

        for (std::size_t m = 0; m < spec.methods.size(); ++m) {
          BootstrapConfig config;
          config.B = spec.bootstrap_draws;
          config.alpha = spec.alpha();
          config.epsilon_floor = spec.epsilon_floor;
          config.seed = boot_seed;
          config.method = spec.methods[m];
          if (spec.ignore_regret && config.method == Method::modified) {
            config.method = Method::ignore_regret;
          }
          MomentOptions opts = options;
          if (spec.ignore_regret) opts.ignore_regret = true;

          const InferenceResult result = confidence_set(
              data, {{theta0.beta, theta0.phi}}, InstrumentSet::standard(),
              config, opts);
          accepts[m][static_cast<std::size_t>(rep)] =
              result.rows.front().accept ? 1 : 0;
        }
      });
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();

      for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        int count = 0;
        for (char a : accepts[m]) count += a;
        CoverageCell cell;
        cell.num_groups = design_cell.num_groups;
        cell.group_size = design_cell.group_size;
        cell.phi0 = phi0;
        cell.method = spec.methods[m];
        cell.level = spec.nominal_level;
        cell.phi_hypothesis = phi0;
        cell.coverage = static_cast<double>(count) / static_cast<double>(reps);
        cell.se = binomial_se(cell.coverage, reps);
        cell.runtime_s = elapsed;
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

CoverageReport run_power_curve(const ExperimentSpec& spec,
                               const std::vector<double>& phi_axis) {
  spec.validate();
  if (phi_axis.empty()) throw ConfigError("power curve: empty phi axis");
  const std::vector<double> beta_grid =
      spec.beta_grid.empty() ? linspace(spec.beta0 - 1.0, spec.beta0 + 1.0, 21)
                             : spec.beta_grid;

  CoverageReport report;
  report.seed = spec.seed;

  std::uint64_t cell_index = 0;
  for (const DesignCell& design_cell : spec.designs) {
    for (double phi0 : spec.phi0_values) {
      const ThetaParams theta0{spec.beta0, phi0, spec.gamma0, spec.rho, spec.tau};
      const int reps = spec.replications;
      // covers[m][a][r]: method m, axis point a, replication r
      std::vector<std::vector<std::vector<char>>> covers(
          spec.methods.size(),
          std::vector<std::vector<char>>(
              phi_axis.size(), std::vector<char>(static_cast<std::size_t>(reps), 0)));

      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t cell_id = cell_index++;
      parallel_for(reps, spec.workers, [&](int rep) {
        const std::uint64_t sim_seed = rng::derive_key(
            spec.seed, rng::Tag::replication_sim, cell_id,
            static_cast<std::uint64_t>(rep));
        const std::uint64_t boot_seed = rng::derive_key(
            spec.seed, rng::Tag::replication_boot, cell_id,
            static_cast<std::uint64_t>(rep));

        const OutcomeData data =
            simulate_game(theta0, make_design(design_cell, sim_seed));

        MomentOptions options;
        options.rho = spec.rho;
        options.tau = spec.tau;
        options.eta = spec.eta;
        options.ignore_regret = spec.ignore_regret;

        for (std::size_t m = 0; m < spec.methods.size(); ++m) {
          BootstrapConfig config;
          config.B = spec.bootstrap_draws;
          config.alpha = spec.alpha();
          config.epsilon_floor = spec.epsilon_floor;
          config.seed = boot_seed;
          config.method = spec.methods[m];
          if (spec.ignore_regret && config.method == Method::modified) {
            config.method = Method::ignore_regret;
          }

          const InferenceResult result = subvector_cs(
              data, phi_axis, beta_grid, InstrumentSet::standard(), config,
              options);
          for (std::size_t a = 0; a < phi_axis.size(); ++a) {
            covers[m][a][static_cast<std::size_t>(rep)] =
                result.rows[a].accept ? 1 : 0;
          }
        }
      });
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();

      for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        for (std::size_t a = 0; a < phi_axis.size(); ++a) {
          int count = 0;
          for (char v : covers[m][a]) count += v;
          CoverageCell cell;
          cell.num_groups = design_cell.num_groups;
          cell.group_size = design_cell.group_size;
          cell.phi0 = phi0;
          cell.method = spec.methods[m];
          cell.level = spec.nominal_level;
          cell.phi_hypothesis = phi_axis[a];
          cell.coverage =
              static_cast<double>(count) / static_cast<double>(reps);
          cell.se = binomial_se(cell.coverage, reps);
          cell.runtime_s = elapsed;
          cell.is_curve_point = true;
          report.cells.push_back(cell);
        }
      }
    }
  }
  return report;
}

}  // namespace hindsight
