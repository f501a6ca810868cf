#pragma once

/* Shared fixtures: bundled-scenario loading plus small synthetic worlds for
   property and search tests. */

#include <random>
#include <string>
#include <vector>

#include "geospot/optimizer.hpp"

namespace geospot::testing {

inline Scenario load_named(const std::string& name) {
  return load_scenario(resolve_scenario_path(name));
}

/* A deterministic little world: `groups` locality groups (one (cloud,
   region) pair each) with `per_group` single-VM sites, full-mesh network,
   uniform prices and rates. Good defaults for most synthetic tests. */
struct ToyWorld {
  int groups = 2;
  int per_group = 2;
  double local_gbit = 10.0;
  double local_ms = 0.5;
  double cross_gbit = 1.0;
  double cross_ms = 50.0;
  double baseline_sps = 100.0;
  double penalty = 0.5;
  double param_count = 1e8;   // 0.2 GB payload at 2 bytes/param
  double sample_bytes = 1e5;
  double tbs = 32768.0;
  double floor_s = 5.0;
  double beta_s = 2.0;
  double gamma_s = 0.25;
  double spot_usd_h = 0.5;

  Scenario build() const {
    Scenario s;
    s.id = "toy";
    const catalog::Cloud clouds[] = {catalog::Cloud::GC, catalog::Cloud::AWS,
                                     catalog::Cloud::AZURE,
                                     catalog::Cloud::LAMBDA};
    const char* continents[] = {"US", "EU", "ASIA", "OCE"};
    for (int g = 0; g < groups; ++g) {
      catalog::Cloud cloud = clouds[g % 4];
      std::string cont = continents[g % 4];
      std::string region = "r" + std::to_string(g);
      std::string net = "N" + std::to_string(g);
      for (int z = 0; z < per_group; ++z) {
        catalog::Site site;
        site.id = "s" + std::to_string(g) + "_" + std::to_string(z);
        site.cloud = cloud;
        site.continent = cont;
        site.region = region;
        site.zone = region + "-" + std::to_string(z);
        site.gpu = "T4";
        site.net_group = net;
        s.sites.push_back(site);
        s.placement.push_back({site.id, 1, 1});
      }
    }
    for (int a = 0; a < groups; ++a) {
      for (int b = 0; b < groups; ++b) {
        std::string na = "N" + std::to_string(a);
        std::string nb = "N" + std::to_string(b);
        if (a == b) {
          s.network.add(na, nb, {local_gbit, local_ms, std::nullopt});
        } else {
          s.network.add(na, nb, {cross_gbit, cross_ms, std::nullopt});
        }
      }
    }
    s.model.name = "toy-model";
    s.model.param_count = param_count;
    s.model.bytes_per_param = 2.0;
    s.model.domain = "CV";
    s.model.sample_bytes = sample_bytes;
    for (catalog::Cloud c : clouds) {
      s.prices.set_vm(c, "T4", {spot_usd_h, 2.0 * spot_usd_h});
      catalog::EgressRates er;
      er.intra_zone = 0.01;
      er.inter_region = {{"US", 0.01}, {"EU", 0.02}, {"ASIA", 0.05},
                         {"OCE", 0.08}};
      er.any_to_oce = 0.15;
      er.between_continents = 0.08;
      s.prices.set_egress(c, er);
    }
    s.prices.set_dataset_ingress(0.01);
    s.compute.set_baseline("T4", s.model.name, baseline_sps);
    s.compute.set_penalty(s.model.name, penalty);
    s.run.tbs = tbs;
    s.run.matchmaking_floor_s = floor_s;
    s.run.comm.beta_s = beta_s;
    s.run.comm.gamma_s_per_peer = gamma_s;
    s.run.comm.payload_scale = 1.0;
    return s;
  }
};

/* Uniformly random double in [lo, hi). */
inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/* Randomized variant of the toy world for property suites. */
inline Scenario random_world(std::mt19937& rng) {
  ToyWorld w;
  w.groups = uniform_int(rng, 1, 4);
  w.per_group = uniform_int(rng, 1, 3);
  w.local_gbit = uniform(rng, 1.0, 12.0);
  w.local_ms = uniform(rng, 0.1, 2.0);
  w.cross_gbit = uniform(rng, 0.3, 4.0);
  w.cross_ms = uniform(rng, 5.0, 300.0);
  w.baseline_sps = uniform(rng, 40.0, 700.0);
  w.penalty = uniform(rng, 0.3, 1.0);
  w.param_count = uniform(rng, 1e7, 6e8);
  w.sample_bytes = uniform(rng, 1e4, 5e5);
  w.tbs = static_cast<double>(uniform_int(rng, 1024, 65536));
  w.floor_s = uniform(rng, 0.0, 8.0);
  w.beta_s = uniform(rng, 0.0, 7.0);
  w.gamma_s = uniform(rng, 0.0, 0.8);
  w.spot_usd_h = uniform(rng, 0.1, 1.5);
  Scenario s = w.build();
  /* Heterogeneous rates: perturb per-site gpu tokens. */
  if (uniform_int(rng, 0, 1) == 1) {
    for (auto& site : s.sites) {
      if (uniform_int(rng, 0, 1) == 1) {
        site.gpu = "A10";
      }
    }
    for (catalog::Cloud c :
         {catalog::Cloud::GC, catalog::Cloud::AWS, catalog::Cloud::AZURE,
          catalog::Cloud::LAMBDA}) {
      s.prices.set_vm(c, "A10", {w.spot_usd_h * 1.6, w.spot_usd_h * 3.0});
    }
    s.compute.set_baseline("A10", s.model.name,
                           w.baseline_sps * uniform(rng, 1.2, 2.5));
  }
  return s;
}

}  // namespace geospot::testing
