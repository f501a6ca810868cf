#pragma once

#include <string>
#include <vector>

#include "geospot/optimizer.hpp"

namespace geospot::refsuite {

/* One comparison between a simulated quantity and its published reference
   value. `criterion` groups rows into the numbered release gates. */
struct RefRow {
  int criterion = 0;
  std::string group;
  std::string name;
  double simulated = 0.0;
  double reference = 0.0;
  std::string tolerance;  // display form, e.g. "±20%", "exact", "in [50, 80]"
  double rel_err = 0.0;   // (simulated - reference") / reference, when defined
  bool pass = false;
  std::string detail;     // optional context for the report table
};

bool all_pass(const std::vector<RefRow>& rows);

/* Observation files pair a bundled scenario with a measured averaging-step
   wall time; the calibrate command and the reference suite both read them. */
std::vector<protocol::Observation> load_observations(const std::string& path);

/* Runs every released comparison against the bundled data: cost arithmetic,
   scaling projections, the calibrated speedup table, geo-distribution deltas,
   egress call counts and rates, TCP throughput caps, and the placement-search
   selections. Deterministic; safe to re-run. */
std::vector<RefRow> evaluate_reference_suite();

}  // namespace geospot::refsuite
