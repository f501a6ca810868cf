#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geospot/catalog.hpp"
#include "geospot/netmodel.hpp"

namespace geospot {

struct PlacementEntry {
  std::string site_id;
  int vm_count = 0;
  /* Cap used when a sweep or the optimizer refills this entry; VMs beyond it
     overflow into the next entry. */
  std::optional<int> fill_limit;
};

struct RunConfig {
  double tbs = 32768.0;
  double matchmaking_floor_s = 5.0;
  catalog::PricingMode pricing_mode = catalog::PricingMode::Spot;
  double tcp_window_bytes = 2.5e6;
  double comm_overlap = 0.0;  // fraction of averaging hidden under compute
  catalog::CommParams comm;
};

enum class Objective { MaxSps, MinUsdPerMillion, MaxSpsUnderBudget };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

/* One selectable block in an optimizer catalog: an ordered list of sites the
   block's VMs fill in turn, plus (optionally) the exact totals the block may
   take. An empty allowed_counts means any total up to the fill capacity. */
struct SearchEntry {
  std::vector<PlacementEntry> sites;  // vm_count ignored; fill_limit honored
  std::vector<int> allowed_counts;
};

struct SearchSpec {
  std::vector<SearchEntry> entries;
  int min_total_vms = 1;
  int max_total_vms = 0;  // 0 -> unbounded
  Objective objective = Objective::MinUsdPerMillion;
  std::optional<double> budget_usd_per_h;
  long long enumeration_cap = 1000000;
};

struct Scenario {
  std::string id;
  std::vector<catalog::Site> sites;
  std::vector<PlacementEntry> placement;
  catalog::ModelProfile model;
  RunConfig run;
  netmodel::NetworkMatrix network;
  catalog::PriceBook prices;
  catalog::ComputeBook compute;
  std::optional<SearchSpec> search;

  const catalog::Site& site(const std::string& id) const;
  int total_vms() const;
};

/* Root of the bundled data files: $GEOSPOT_DATA_DIR when set, otherwise the
   directory compiled in at build time. */
std::string default_data_dir();

/* Loads and validates a scenario file. Shared resources (network, prices,
   compute, models) are file references resolved against the scenario's
   directory first, then the data root. */
Scenario load_scenario(const std::string& path);

/* Resolves a scenario name: a path as given, or "<name>.json" under the data
   root's scenarios/ directory. Throws Validation ("scenario not found"). */
std::string resolve_scenario_path(const std::string& name);

/* One entry per VM, in placement order. */
std::vector<const catalog::Site*> expand_placement(const Scenario& s);

/* Refills the placement with n VMs honoring per-entry fill limits, for
   sweeps over the peer count. Throws Validation when n exceeds capacity. */
void set_total_vms(Scenario& s, int n);

}  // namespace geospot
