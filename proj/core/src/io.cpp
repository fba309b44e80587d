#include "hindsight/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hindsight/errors.hpp"
#include "hindsight/util.hpp"

namespace hindsight {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

long parse_long(const std::string& s, std::size_t row) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ": bad integer '" + s + "'");
  }
}

}  // namespace

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw DataError("cannot create directory '" + path + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string outcome_csv(const OutcomeData& data) {
  std::ostringstream out;
  out << "player_id,group_id,Y,X,C_of_group\n";
  for (int i = 0; i < data.num_players(); ++i) {
    const int s = data.group_of[i];
    out << i << ',' << s << ',' << data.actions[i] << ','
        << format_float(data.covariates[i]) << ','
        << format_float(data.signals[static_cast<std::size_t>(s)]) << '\n';
  }
  return out.str();
}

OutcomeData parse_outcome_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty outcome file");
  if (line == "player_id,group_id,Y,X,C_of_group\r") line.pop_back();
  if (line != "player_id,group_id,Y,X,C_of_group") {
    throw DataError("unexpected header '" + line + "'");
  }

  std::vector<int> group_ids, actions;
  std::vector<double> xs, cs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw DataError("row " + std::to_string(row) + ": expected 5 fields, got " +
                      std::to_string(fields.size()));
    }
    const long pid = parse_long(fields[0], row);
    if (pid != static_cast<long>(actions.size())) {
      throw DataError("row " + std::to_string(row) + ": player_id out of order");
    }
    const long gid = parse_long(fields[1], row);
    const long y = parse_long(fields[2], row);
    if (gid < 0) throw DataError("row " + std::to_string(row) + ": negative group_id");
    if (y != 0 && y != 1) {
      throw DataError("row " + std::to_string(row) + ": Y must be 0 or 1");
    }
    group_ids.push_back(static_cast<int>(gid));
    actions.push_back(static_cast<int>(y));
    xs.push_back(parse_double(fields[3], row));
    cs.push_back(parse_double(fields[4], row));
  }
  if (actions.empty()) throw DataError("outcome file has no data rows");

  int num_groups = 0;
  for (int g : group_ids) num_groups = std::max(num_groups, g + 1);

  OutcomeData data;
  data.num_alternatives = 2;
  data.actions = actions;
  data.covariates = xs;
  data.group_of = group_ids;
  data.group_sizes.assign(static_cast<std::size_t>(num_groups), 0);
  data.signals.assign(static_cast<std::size_t>(num_groups), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(num_groups), false);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto g = static_cast<std::size_t>(group_ids[i]);
    ++data.group_sizes[g];
    if (!seen[g]) {
      data.signals[g] = cs[i];
      seen[g] = true;
    } else if (data.signals[g] != cs[i]) {
      throw DataError("row " + std::to_string(i + 2) +
                      ": C_of_group differs within group " +
                      std::to_string(group_ids[i]));
    }
  }
  data.validate();
  return data;
}

void write_outcome_csv(const OutcomeData& data, const std::string& path) {
  write_text_file(path, outcome_csv(data));
}

OutcomeData read_outcome_csv(const std::string& path) {
  try {
    return parse_outcome_csv(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string outcome_manifest(const GameDesign& design, const ThetaParams& theta,
                             const GameConfig& config) {
  ordered_json j;
  j["schema"] = "hindsight-outcome";
  j["version"] = kVersion;
  j["seed"] = design.seed;
  j["group_sizes"] = design.group_sizes;
  j["theta"] = {{"beta", theta.beta},
                {"phi", theta.phi},
                {"gamma", theta.gamma},
                {"rho", theta.rho},
                {"tau", theta.tau}};
  j["dgp"] = {{"x_shift", config.x_shift},
              {"z_sd", config.z_sd},
              {"eta_sd", config.eta_sd},
              {"c_sd", config.c_sd}};
  return j.dump(2) + "\n";
}

std::string inference_csv(const InferenceResult& result) {
  std::ostringstream out;
  out << "beta,phi,T,crit,accept\n";
  for (const InferenceRow& row : result.rows) {
    out << format_float(row.theta.beta) << ',' << format_float(row.theta.phi)
        << ',' << format_float(row.statistic) << ','
        << format_float(row.critical) << ',' << (row.accept ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_inference_csv(const InferenceResult& result, const std::string& path) {
  write_text_file(path, inference_csv(result));
}

std::string moment_system_json(const MomentSystem& system) {
  ordered_json j;
  j["l_upper"] = system.stats.l_upper;
  j["l_lower"] = system.stats.l_lower;
  j["w_upper"] = system.slacks.w_upper;
  j["w_lower"] = system.slacks.w_lower;
  j["delta_upper"] = system.slacks.delta_upper;
  j["delta_lower"] = system.slacks.delta_lower;
  j["T"] = system.statistic;
  j["tau_theta"] = system.tau_adjust;
  j["rho_ind"] = system.rho_ind;
  j["negligibility"] = system.negligibility;
  j["regret"] = system.regret;
  return j.dump();
}

std::string coverage_csv(const CoverageReport& report) {
  const bool curve =
      !report.cells.empty() && report.cells.front().is_curve_point;
  std::ostringstream out;
  out << (curve ? "S,N_s,phi0,method,level,phi,coverage,se,runtime_s\n"
                : "S,N_s,phi0,method,level,coverage,se,runtime_s\n");
  for (const CoverageCell& c : report.cells) {
    out << c.num_groups << ',' << c.group_size << ',' << format_float(c.phi0)
        << ',' << method_name(c.method) << ',' << format_float(c.level) << ',';
    if (curve) out << format_float(c.phi_hypothesis) << ',';
    out << format_float(c.coverage) << ',' << format_float(c.se) << ','
        << format_float(c.runtime_s) << '\n';
  }
  return out.str();
}

void write_coverage_csv(const CoverageReport& report, const std::string& path) {
  write_text_file(path, coverage_csv(report));
}

}  // namespace hindsight
