#pragma once

#include <string>
#include <vector>

#include "geospot/analytics.hpp"
#include "geospot/costing.hpp"

namespace geospot::optimizer {

/* One evaluated placement: per-entry totals plus its simulation and cost. */
struct Candidate {
  std::vector<int> counts;  // VMs per search entry
  protocol::EpochReport epoch;
  costing::CostReport cost;
  double objective_value = 0.0;  // larger is better (costs enter negated)
};

struct SearchResult {
  bool feasible = false;
  std::string note;  // diagnostic when infeasible
  long long evaluated = 0;
  std::vector<Candidate> ranked;  // best first
};

/* All per-entry count vectors the search space admits (allowed counts per
   entry, total bounds). Throws SpaceTooLarge beyond the enumeration cap. */
std::vector<std::vector<int>> enumerate_counts(const SearchSpec& spec);

/* Scenario with the placement realized from per-entry totals (each entry
   fills its sites in order, honoring fill limits). */
Scenario realize(const Scenario& base, const std::vector<int>& counts);

/* Evaluates a candidate under the objective. Budget applies only to
   MaxSpsUnderBudget. */
double objective_value(Objective obj, const protocol::EpochReport& rep,
                       const costing::CostReport& cost);
bool within_budget(Objective obj, std::optional<double> budget,
                   const costing::CostReport& cost);

/* Finds the best placements for the scenario's search spec. Spaces within
   the enumeration cap are searched exhaustively; larger spaces fall back to
   greedy construction plus local moves, optionally pruned by the scaling
   projection bound. Ties (<= 1e-9) break toward fewer VMs, then the
   lexicographically smallest count vector. */
SearchResult search(const Scenario& base, Objective obj,
                    std::optional<double> budget, int top_k = 10,
                    bool prune = true);

}  // namespace geospot::optimizer
