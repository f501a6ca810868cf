#include "geospot/costing.hpp"

namespace geospot::costing {

double usd_per_million_samples(double usd_per_h, double sps) {
  if (sps <= 0.0) {
    raise(ErrorKind::Domain, "sps", "throughput must be positive");
  }
  return usd_per_h * 1e6 / (sps * 3600.0);
}

double dataload_usd_per_h(double sps, double sample_bytes,
                          double ingress_usd_per_gb) {
  return sps * sample_bytes * 3600.0 * ingress_usd_per_gb / 1e9;
}

CostReport cost_epoch(const Scenario& s, const protocol::EpochReport& rep,
                      std::optional<catalog::PricingMode> mode) {
  CostReport out;
  out.mode = mode.value_or(s.run.pricing_mode);
  out.per_vm.resize(rep.n_peers);

  for (int i = 0; i < rep.n_peers; ++i) {
    const protocol::Peer& p = rep.peers[i];
    VmCost& c = out.per_vm[i];
    c.site_id = p.site->id;
    c.peer_index = i;
    c.vm_usd_h = s.prices.vm_usd_per_h(p.site->cloud, p.site->gpu, out.mode);
    double samples_per_s = rep.samples_per_peer[i] / rep.epoch_time_s;
    c.data_usd_h = dataload_usd_per_h(samples_per_s, s.model.sample_bytes,
                                      s.prices.dataset_ingress_usd_per_gb());
  }

  // Bill every recorded call to its sender.
  for (const auto& call : rep.comm.calls) {
    VmCost& c = out.per_vm[call.sender];
    c.egress_gb_by_class[call.cls.token()] += call.gbytes;
    const catalog::Site& sender = *rep.peers[call.sender].site;
    double usd =
        call.gbytes * s.prices.egress_usd_per_gb(sender.cloud, call.cls);
    double usd_h = usd * 3600.0 / rep.epoch_time_s;
    c.egress_usd_h += usd_h;
    if (call.cls.is_external()) {
      c.egress_external_usd_h += usd_h;
    }
  }

  for (VmCost& c : out.per_vm) {
    c.total_usd_h = c.vm_usd_h + c.egress_usd_h + c.data_usd_h;
    out.fleet_vm_usd_h += c.vm_usd_h;
    out.fleet_egress_usd_h += c.egress_usd_h;
    out.fleet_data_usd_h += c.data_usd_h;
    out.fleet_total_usd_h += c.total_usd_h;
  }
  out.usd_per_million =
      usd_per_million_samples(out.fleet_total_usd_h, rep.sps_global);
  out.usd_per_million_vm_only =
      usd_per_million_samples(out.fleet_vm_usd_h, rep.sps_global);
  return out;
}

}  // namespace geospot::costing
