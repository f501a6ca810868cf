#include "geospot/analytics.hpp"

namespace geospot::analytics {

std::optional<double> granularity(const protocol::EpochReport& rep) {
  if (rep.t_comm_s <= 0.0) {
    return std::nullopt;
  }
  return rep.t_calc_s / rep.t_comm_s;
}

std::optional<double> granularity_incl_wait(const protocol::EpochReport& rep) {
  double fixed = rep.t_comm_s + rep.t_wait_s;
  if (fixed <= 0.0) {
    return std::nullopt;
  }
  return rep.t_calc_s / fixed;
}

double speedup(double sps_global, double baseline_sps) {
  if (baseline_sps <= 0.0) {
    raise(ErrorKind::Domain, "baseline_sps", "baseline must be positive");
  }
  return sps_global / baseline_sps;
}

std::optional<double> asymptotic_sps(const protocol::EpochReport& rep) {
  double fixed = rep.t_comm_s + rep.t_wait_s;
  if (fixed <= 0.0) {
    return std::nullopt;
  }
  return rep.tbs / fixed;
}

double project_scaling(double granularity, double factor) {
  if (granularity <= 0.0) {
    raise(ErrorKind::Domain, "granularity", "granularity must be positive");
  }
  if (factor <= 0.0) {
    raise(ErrorKind::Domain, "factor", "scaling factor must be positive");
  }
  return (granularity + 1.0) / (granularity / factor + 1.0);
}

ScalingPoint analyze(const Scenario& s, const protocol::EpochReport& rep) {
  ScalingPoint pt;
  pt.scenario_id = rep.scenario_id;
  pt.n_gpus = rep.n_peers;
  pt.tbs = rep.tbs;
  pt.sps = rep.sps_global;
  // Speedups are relative to one non-collaborative peer of the kind the
  // placement lists first (the reference machine of the scenario).
  const catalog::Site& first = *rep.peers.front().site;
  double base = s.compute.baseline_sps(first.gpu, s.model.name);
  pt.speedup = speedup(rep.sps_global, base);
  pt.per_gpu = pt.speedup / rep.n_peers;
  pt.granularity = granularity(rep);
  pt.asymptotic_sps = asymptotic_sps(rep);
  return pt;
}

}  // namespace geospot::analytics
