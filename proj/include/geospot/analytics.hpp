#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geospot/protocol.hpp"

namespace geospot::analytics {

/* Compute-to-communication ratio of an epoch. Single-peer epochs have no
   averaging step, so there is nothing to compare: nullopt, never infinity. */
std::optional<double> granularity(const protocol::EpochReport& rep);

/* Variant charging the matchmaking wait to the communication side. */
std::optional<double> granularity_incl_wait(const protocol::EpochReport& rep);

double speedup(double sps_global, double baseline_sps);

/* Throughput ceiling as compute time vanishes: tbs / (t_comm + t_wait).
   nullopt when the epoch has no fixed part at all (unbounded). */
std::optional<double> asymptotic_sps(const protocol::EpochReport& rep);

/* Speedup factor gained by scaling per-peer compute by `factor` at fixed
   communication cost, for an epoch with the given granularity:
   (g + 1) / (g / factor + 1). */
double project_scaling(double granularity, double factor);

/* One row of a scaling sweep. */
struct ScalingPoint {
  std::string scenario_id;
  int n_gpus = 0;
  double tbs = 0.0;
  double sps = 0.0;
  double speedup = 0.0;   // vs the single-peer baseline of the same offering
  double per_gpu = 0.0;   // speedup / n_gpus
  std::optional<double> granularity;
  std::optional<double> asymptotic_sps;
};

ScalingPoint analyze(const Scenario& s, const protocol::EpochReport& rep);

}  // namespace geospot::analytics
