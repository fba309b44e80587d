#include "hindsight/config.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hindsight/errors.hpp"
#include "hindsight/io.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

std::vector<double> GridSpec::points() const {
  if (count < 1) throw ConfigError("grid: count must be >= 1");
  return linspace(lo, hi, count);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': bad number '" + value + "'");
  }
}

long to_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': bad integer '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': bad seed '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': bad boolean '" + value + "'");
}

GridSpec to_grid(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::string lo, hi, count;
  if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') ||
      !std::getline(in, count)) {
    throw ConfigError("key '" + key + "': expected lo:hi:count, got '" + value +
                      "'");
  }
  GridSpec grid;
  grid.lo = to_double(key, trim(lo));
  grid.hi = to_double(key, trim(hi));
  grid.count = static_cast<int>(to_long(key, trim(count)));
  if (grid.count < 1) throw ConfigError("key '" + key + "': count must be >= 1");
  return grid;
}

std::vector<DesignCell> to_designs(const std::string& key,
                                   const std::string& value) {
  std::vector<DesignCell> cells;
  for (const std::string& item : split_list(value)) {
    const std::size_t x = item.find('x');
    if (x == std::string::npos) {
      throw ConfigError("key '" + key + "': expected SxN items, got '" + item +
                        "'");
    }
    DesignCell cell;
    cell.num_groups = static_cast<int>(to_long(key, trim(item.substr(0, x))));
    cell.group_size = static_cast<int>(to_long(key, trim(item.substr(x + 1))));
    cells.push_back(cell);
  }
  if (cells.empty()) throw ConfigError("key '" + key + "': empty design list");
  return cells;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> schema = {
      {"S", [&](const std::string& k, const std::string& v) {
         cfg.designs.assign(1, DesignCell{static_cast<int>(to_long(k, v)),
                                          cfg.designs.front().group_size});
       }},
      {"Ns", [&](const std::string& k, const std::string& v) {
         for (auto& cell : cfg.designs) cell.group_size = static_cast<int>(to_long(k, v));
       }},
      {"designs", [&](const std::string& k, const std::string& v) {
         cfg.designs = to_designs(k, v);
       }},
      {"beta0", [&](const std::string& k, const std::string& v) { cfg.beta0 = to_double(k, v); }},
      {"phi0", [&](const std::string& k, const std::string& v) {
         cfg.phi0_values.clear();
         for (const std::string& item : split_list(v)) {
           cfg.phi0_values.push_back(to_double(k, item));
         }
         if (cfg.phi0_values.empty()) throw ConfigError("key 'phi0': empty list");
         cfg.phi0 = cfg.phi0_values.front();
       }},
      {"gamma0", [&](const std::string& k, const std::string& v) { cfg.gamma0 = to_double(k, v); }},
      {"rho", [&](const std::string& k, const std::string& v) { cfg.rho = to_double(k, v); }},
      {"tau", [&](const std::string& k, const std::string& v) { cfg.tau = to_double(k, v); }},
      {"method", [&](const std::string&, const std::string& v) {
         cfg.methods.clear();
         for (const std::string& item : split_list(v)) {
           cfg.methods.push_back(method_from_name(item));
         }
         if (cfg.methods.empty()) throw ConfigError("key 'method': empty list");
       }},
      {"level", [&](const std::string& k, const std::string& v) { cfg.level = to_double(k, v); }},
      {"bootstrap", [&](const std::string& k, const std::string& v) {
         cfg.bootstrap_draws = static_cast<int>(to_long(k, v));
       }},
      {"epsilon", [&](const std::string& k, const std::string& v) {
         cfg.epsilon_floor = to_double(k, v);
       }},
      {"eta", [&](const std::string& k, const std::string& v) { cfg.eta = to_double(k, v); }},
      {"ignore_regret", [&](const std::string& k, const std::string& v) {
         cfg.ignore_regret = to_bool(k, v);
       }},
      {"redraw_per_theta", [&](const std::string& k, const std::string& v) {
         cfg.redraw_per_theta = to_bool(k, v);
       }},
      {"negligibility_threshold", [&](const std::string& k, const std::string& v) {
         cfg.negligibility_threshold = to_double(k, v);
       }},
      {"reps", [&](const std::string& k, const std::string& v) {
         cfg.replications = static_cast<int>(to_long(k, v));
       }},
      {"workers", [&](const std::string& k, const std::string& v) {
         cfg.workers = static_cast<int>(to_long(k, v));
       }},
      {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = to_u64(k, v); }},
      {"beta_grid", [&](const std::string& k, const std::string& v) {
         cfg.beta_grid = to_grid(k, v);
       }},
      {"phi_grid", [&](const std::string& k, const std::string& v) {
         cfg.phi_grid = to_grid(k, v);
       }},
      {"phi_axis", [&](const std::string& k, const std::string& v) {
         cfg.phi_axis = to_grid(k, v);
       }},
      {"out", [&](const std::string&, const std::string& v) { cfg.out_dir = v; }},
      {"check_n", [&](const std::string& k, const std::string& v) {
         cfg.check_n = static_cast<int>(to_long(k, v));
       }},
      {"check_draws", [&](const std::string& k, const std::string& v) {
         cfg.check_draws = to_long(k, v);
       }},
      {"check_rho", [&](const std::string& k, const std::string& v) {
         cfg.check_rho.clear();
         for (const std::string& item : split_list(v)) {
           cfg.check_rho.push_back(to_double(k, item));
         }
       }},
      {"check_coeff", [&](const std::string& k, const std::string& v) {
         cfg.check_coeff = to_double(k, v);
       }},
  };

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = schema.find(key);
    if (it == schema.end()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    cfg.provided_keys.push_back(key);
  }

  if (cfg.phi0_values.empty()) cfg.phi0_values = {cfg.phi0};
  return cfg;
}

bool RunConfig::has(const std::string& key) const {
  for (const std::string& k : provided_keys) {
    if (k == key) return true;
  }
  return false;
}

void RunConfig::require(const std::string& key) const {
  if (!has(key)) {
    throw ConfigError("missing required key `" + key + "`");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, path);
}

std::uint64_t RunConfig::seed_or_env() const {
  if (seed) return *seed;
  if (const char* env = std::getenv("HINDSIGHT_SEED")) {
    return to_u64("HINDSIGHT_SEED", env);
  }
  throw ConfigError(
      "missing required key `seed` (set it in the config, pass --seed, or "
      "export HINDSIGHT_SEED)");
}

ExperimentSpec RunConfig::experiment() const {
  ExperimentSpec spec;
  spec.designs = designs;
  spec.phi0_values = phi0_values;
  spec.methods = methods;
  spec.beta0 = beta0;
  spec.gamma0 = gamma0;
  spec.rho = rho;
  spec.tau = tau;
  spec.nominal_level = level;
  spec.replications = replications;
  spec.bootstrap_draws = bootstrap_draws;
  spec.epsilon_floor = epsilon_floor;
  spec.eta = eta;
  spec.ignore_regret = ignore_regret;
  spec.seed = seed_or_env();
  spec.workers = workers;
  spec.beta_grid = beta_grid.points();
  return spec;
}

std::string RunConfig::manifest(const std::string& command) const {
  nlohmann::ordered_json j;
  j["schema"] = "hindsight-manifest";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json();

  nlohmann::ordered_json d = nlohmann::ordered_json::array();
  for (const DesignCell& cell : designs) {
    d.push_back({{"S", cell.num_groups}, {"Ns", cell.group_size}});
  }
  j["designs"] = d;
  j["beta0"] = beta0;
  j["phi0"] = phi0_values;
  j["gamma0"] = gamma0;
  j["rho"] = rho;
  j["tau"] = tau;
  nlohmann::ordered_json m = nlohmann::ordered_json::array();
  for (Method method : methods) m.push_back(method_name(method));
  j["method"] = m;
  j["level"] = level;
  j["bootstrap"] = bootstrap_draws;
  j["epsilon"] = epsilon_floor;
  j["eta"] = eta;
  j["ignore_regret"] = ignore_regret;
  j["redraw_per_theta"] = redraw_per_theta;
  j["negligibility_threshold"] = negligibility_threshold;
  j["reps"] = replications;
  j["workers"] = workers;
  j["beta_grid"] = {{"lo", beta_grid.lo}, {"hi", beta_grid.hi}, {"count", beta_grid.count}};
  j["phi_grid"] = {{"lo", phi_grid.lo}, {"hi", phi_grid.hi}, {"count", phi_grid.count}};
  j["phi_axis"] = {{"lo", phi_axis.lo}, {"hi", phi_axis.hi}, {"count", phi_axis.count}};
  j["check_n"] = check_n;
  j["check_draws"] = check_draws;
  j["check_rho"] = check_rho;
  j["check_coeff"] = check_coeff;
  return j.dump(2) + "\n";
}

}  // namespace hindsight
