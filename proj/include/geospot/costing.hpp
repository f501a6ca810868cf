#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geospot/protocol.hpp"

namespace geospot::costing {

/* Hourly cost decomposition of one VM while the run is in steady state. */
struct VmCost {
  std::string site_id;
  int peer_index = 0;
  double vm_usd_h = 0.0;
  double egress_usd_h = 0.0;           // all billed traffic this VM sends
  double egress_external_usd_h = 0.0;  // the part leaving its region
  double data_usd_h = 0.0;             // dataset ingress for its sample share
  double total_usd_h = 0.0;
  /* Bytes this VM sends per epoch, by traffic class token (GB). */
  std::map<std::string, double> egress_gb_by_class;
};

struct CostReport {
  catalog::PricingMode mode = catalog::PricingMode::Spot;
  std::vector<VmCost> per_vm;
  double fleet_vm_usd_h = 0.0;
  double fleet_egress_usd_h = 0.0;
  double fleet_data_usd_h = 0.0;
  double fleet_total_usd_h = 0.0;
  double usd_per_million = 0.0;          // full hourly cost per 1M samples
  double usd_per_million_vm_only = 0.0;  // VM rental alone per 1M samples
};

/* $ per million trained samples at the given burn rate and throughput. */
double usd_per_million_samples(double usd_per_h, double sps);

/* Hourly dataset-loading cost of a peer training `sps` samples/s. */
double dataload_usd_per_h(double sps, double sample_bytes,
                          double ingress_usd_per_gb);

/* Prices an epoch report under the scenario's books. The pricing mode
   defaults to the scenario's run config. */
CostReport cost_epoch(const Scenario& s, const protocol::EpochReport& rep,
                      std::optional<catalog::PricingMode> mode = std::nullopt);

}  // namespace geospot::costing
