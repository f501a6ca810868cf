#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "geospot/analytics.hpp"
#include "geospot/costing.hpp"
#include "geospot/optimizer.hpp"

namespace geospot::serialize {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

/* All numeric output goes through these: six significant digits, so report
   files stay byte-stable across runs and platforms. */
std::string fmt(double v);
ordered_json num(double v);

ordered_json epoch_json(const protocol::EpochReport& rep);
ordered_json cost_json(const std::string& scenario_id,
                       const costing::CostReport& rep);
ordered_json calibration_json(const protocol::CalibrationResult& fit);
ordered_json candidate_json(const optimizer::Candidate& cand);

/* What it takes to re-run a command: written alongside every output set. */
struct RunManifest {
  std::string command;                       // argv joined by spaces
  std::vector<std::string> scenario_paths;   // resolved input files
  std::string output_dir;
  bool deterministic = true;                 // no seeds anywhere
  std::string tool_version = kToolVersion;
};

ordered_json manifest_json(const RunManifest& m);

/* CSV emitters (comma-separated, header row, LF endings). */
std::string analytics_csv(const std::vector<analytics::ScalingPoint>& rows);
std::string costing_csv(
    const std::vector<std::pair<std::string, costing::CostReport>>& rows);
std::string ranked_csv(const std::vector<optimizer::Candidate>& ranked,
                       const std::string& scenario_id);

/* Plain-text table with aligned columns; `cells` holds rows of equal width.
   The first row is the header. */
std::string render_table(const std::vector<std::vector<std::string>>& cells);

/* Writes content exactly as given (binary mode: LF stays LF). */
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace geospot::serialize
