#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hindsight/bootstrap.hpp"
#include "hindsight/game.hpp"
#include "hindsight/harness.hpp"
#include "hindsight/moments.hpp"

namespace hindsight {

// Fixed 17-significant-digit decimal rendering used by every CSV column.
std::string format_float(double v);

void ensure_directory(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

// Outcome CSV: header player_id,group_id,Y,X,C_of_group.
std::string outcome_csv(const OutcomeData& data);
OutcomeData parse_outcome_csv(const std::string& text);
void write_outcome_csv(const OutcomeData& data, const std::string& path);
OutcomeData read_outcome_csv(const std::string& path);

// JSON sidecar with the design, parameters and seed of a simulated game.
std::string outcome_manifest(const GameDesign& design, const ThetaParams& theta,
                             const GameConfig& config);

// Inference CSV: beta,phi,T,crit,accept.
std::string inference_csv(const InferenceResult& result);
void write_inference_csv(const InferenceResult& result, const std::string& path);

// Per-theta diagnostics block: moments, slacks, eigenvalues, statistic,
// negligibility sums, per-player regrets.
std::string moment_system_json(const MomentSystem& system);

// Coverage/power CSV; curve rows carry an extra phi column.
std::string coverage_csv(const CoverageReport& report);
void write_coverage_csv(const CoverageReport& report, const std::string& path);

}  // namespace hindsight
