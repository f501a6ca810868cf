#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geospot/errors.hpp"

namespace geospot::catalog {

enum class Cloud { GC, AWS, AZURE, LAMBDA, ONPREM };

enum class PricingMode { Spot, OnDemand };

std::string to_string(Cloud c);
Cloud cloud_from_string(const std::string& s);
std::string to_string(PricingMode m);
PricingMode pricing_mode_from_string(const std::string& s);

/* A placement target: one GPU offering in one zone. net_group names the row
   of the network matrix this site belongs to. */
struct Site {
  std::string id;
  Cloud cloud = Cloud::GC;
  std::string continent;  // US, EU, ASIA, OCE
  std::string region;
  std::string zone;
  std::string gpu;        // offering token, e.g. T4, A10, V100x8, RTX8000
  std::string net_group;
};

/* Where a byte sent between two sites lands in the billing hierarchy.
   Most-specific wins: same site -> Internal, same zone -> IntraZone,
   same region -> InterZoneSameRegion, same continent ->
   InterRegionSameContinent, either side in OCE -> AnyToOce, otherwise
   BetweenContinents. Symmetric in its arguments. */
enum class TrafficClass {
  Internal,
  IntraZone,
  InterZoneSameRegion,
  InterRegionSameContinent,
  AnyToOce,
  BetweenContinents,
};

std::string to_string(TrafficClass c);

/* InterRegionSameContinent rates differ per continent, so the classification
   carries the continent token alongside the class. */
struct Classified {
  TrafficClass cls = TrafficClass::Internal;
  std::string continent;  // set only for InterRegionSameContinent

  std::string token() const;  // e.g. "inter_region_US", "between_continents"
  bool is_external() const;   // leaves the region: inter-region and beyond
};

Classified classify_traffic(const Site& a, const Site& b);

/* Per-cloud egress price table, $/GB by traffic class. */
struct EgressRates {
  double intra_zone = 0.0;
  double inter_zone = 0.0;
  std::map<std::string, double> inter_region;  // continent -> $/GB
  double any_to_oce = 0.0;
  double between_continents = 0.0;
};

struct VmPrice {
  double spot_usd_per_h = 0.0;
  double ondemand_usd_per_h = 0.0;
};

class PriceBook {
 public:
  /* Throws MissingRate naming "<cloud>/<gpu>" when the offering is unknown. */
  double vm_usd_per_h(Cloud cloud, const std::string& gpu,
                      PricingMode mode) const;
  /* $/GB the sender's cloud bills for one classified transfer. Internal
     traffic is never billed. Throws MissingRate naming the class token. */
  double egress_usd_per_gb(Cloud sender, const Classified& cls) const;
  double dataset_ingress_usd_per_gb() const { return dataset_ingress_; }

  void set_vm(Cloud cloud, const std::string& gpu, VmPrice price);
  void set_egress(Cloud cloud, EgressRates rates);
  void set_dataset_ingress(double usd_per_gb) { dataset_ingress_ = usd_per_gb; }
  bool has_vm(Cloud cloud, const std::string& gpu) const;

 private:
  std::map<std::pair<Cloud, std::string>, VmPrice> vm_;
  std::map<Cloud, EgressRates> egress_;
  double dataset_ingress_ = 0.0;
};

PriceBook load_prices(const std::string& path);

/* A trainable model: gradient payload and per-sample data volume. */
struct ModelProfile {
  std::string name;
  double param_count = 0.0;
  double bytes_per_param = 2.0;
  std::string domain;         // CV or NLP
  double sample_bytes = 0.0;  // dataset bytes fetched per training sample

  double grad_payload_gb() const { return param_count * bytes_per_param / 1e9; }
};

std::map<std::string, ModelProfile> load_models(const std::string& path);

/* Communication overhead parameters shared by every peer: fixed matchmaking
   cost beta, per-peer coordination cost gamma, and a payload efficiency
   multiplier on the transfer stages. Produced by calibrate(). */
struct CommParams {
  double beta_s = 0.0;
  double gamma_s_per_peer = 0.0;
  double payload_scale = 1.0;
};

/* Measured single-GPU throughputs plus the per-model collaborative-mode
   penalty (gradient averaging pipeline overhead on each worker). */
class ComputeBook {
 public:
  /* Throws MissingRate naming "<gpu>/<model>". */
  double baseline_sps(const std::string& gpu, const std::string& model) const;
  /* Throws MissingRate naming the model. */
  double collaborative_penalty(const std::string& model) const;
  /* Effective per-peer rate: baseline, discounted when collaborating. */
  double rate_sps(const std::string& gpu, const std::string& model,
                  bool collaborative) const;
  const CommParams& default_comm() const { return default_comm_; }

  void set_baseline(const std::string& gpu, const std::string& model,
                    double sps);
  void set_penalty(const std::string& model, double penalty);
  void set_default_comm(const CommParams& p) { default_comm_ = p; }
  bool has_baseline(const std::string& gpu, const std::string& model) const;

 private:
  std::map<std::pair<std::string, std::string>, double> baseline_;
  std::map<std::string, double> penalty_;
  CommParams default_comm_;
};

ComputeBook load_compute(const std::string& path);

/* Seconds one peer needs per sample under collaborative load. */
double per_sample_seconds(double baseline_sps, double penalty);

/* Checks geography consistency across a site list: unique ids, zone implies
   region implies continent, and one net_group per (cloud, region). */
void validate_sites(const std::vector<Site>& sites);

}  // namespace geospot::catalog
