#include "geospot/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace geospot::protocol {

std::vector<Peer> build_peers(const Scenario& s) {
  auto sites = expand_placement(s);
  if (sites.empty()) {
    raise(ErrorKind::Validation, "placement", "placement has no VMs");
  }
  bool collaborative = sites.size() >= 2;
  std::vector<Peer> peers;
  peers.reserve(sites.size());
  int idx = 0;
  for (const auto* site : sites) {
    Peer p;
    p.site = site;
    p.vm_index = idx++;
    p.rate_sps = s.compute.rate_sps(site->gpu, s.model.name, collaborative);
    peers.push_back(p);
  }
  return peers;
}

namespace {

/* Locality groups keyed by (cloud, region); member order follows the
   placement expansion, so the first member is the stable leader. */
using GroupKey = std::pair<catalog::Cloud, std::string>;

std::map<GroupKey, std::vector<int>> group_peers(
    const std::vector<Peer>& peers) {
  std::map<GroupKey, std::vector<int>> groups;
  for (const Peer& p : peers) {
    groups[{p.site->cloud, p.site->region}].push_back(p.vm_index);
  }
  return groups;
}

}  // namespace

CommBreakdown communication_phase(const std::vector<Peer>& peers,
                                  double payload_gb,
                                  const netmodel::NetworkMatrix& net,
                                  double window_bytes) {
  CommBreakdown out;
  if (peers.size() < 2) {
    return out;
  }
  if (payload_gb <= 0.0) {
    raise(ErrorKind::Domain, "payload_gb", "gradient payload must be positive");
  }
  auto groups = group_peers(peers);
  const int k = static_cast<int>(groups.size());

  // Stage 1: chunked all-reduce inside each group, groups in parallel. Each
  // member moves 2P(g-1)/g in g-1 equal chunks over the local link.
  for (const auto& [key, members] : groups) {
    const int g = static_cast<int>(members.size());
    if (g < 2) {
      continue;
    }
    const netmodel::Link& local =
        net.at(peers[members[0]].site->net_group,
               peers[members[0]].site->net_group);
    double bw = netmodel::aggregate_gbit(local, g - 1, window_bytes);
    double wall = 2.0 * payload_gb * 8.0 * (g - 1) / g / bw + local.rtt_s();
    out.stage1_s = std::max(out.stage1_s, wall);
    double chunk = 2.0 * payload_gb / g;
    for (int u : members) {
      for (int v : members) {
        if (u != v) {
          out.calls.push_back(
              {u, v, catalog::classify_traffic(*peers[u].site, *peers[v].site),
               chunk, 1});
        }
      }
    }
  }

  // Stage 2: leaders exchange the reduced shards, 2P/k per directed pair.
  // Transport runs over the member-pair mesh (s_i * s_j streams), and a
  // sender's summed outflow cannot exceed its local uplink.
  if (k >= 2) {
    std::vector<const std::vector<int>*> glist;
    for (const auto& [key, members] : groups) {
      glist.push_back(&members);
    }
    double bytes_dir = 2.0 * payload_gb / k;
    std::vector<std::vector<double>> pair_bw(k, std::vector<double>(k, 0.0));
    std::vector<std::vector<double>> pair_rtt(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const Peer& pi = peers[(*glist[i])[0]];
        const Peer& pj = peers[(*glist[j])[0]];
        netmodel::Link ch =
            net.channel(pi.site->net_group, pj.site->net_group);
        int streams = static_cast<int>(glist[i]->size() * glist[j]->size());
        double bw = netmodel::aggregate_gbit(ch, streams, window_bytes);
        pair_bw[i][j] = pair_bw[j][i] = bw;
        pair_rtt[i][j] = pair_rtt[j][i] = ch.rtt_s();
      }
    }
    for (int i = 0; i < k; ++i) {
      const Peer& leader = peers[(*glist[i])[0]];
      const netmodel::Link& local =
          net.at(leader.site->net_group, leader.site->net_group);
      double uplink = local.bandwidth_gbit;
      if (local.ceiling_gbit) {
        uplink = std::min(uplink, *local.ceiling_gbit);
      }
      double outflow = 0.0;
      for (int j = 0; j < k; ++j) {
        if (j != i) {
          outflow += pair_bw[i][j];
        }
      }
      double scale = outflow > uplink ? uplink / outflow : 1.0;
      for (int j = 0; j < k; ++j) {
        if (j == i) {
          continue;
        }
        double wall = bytes_dir * 8.0 / (pair_bw[i][j] * scale) + pair_rtt[i][j];
        out.stage2_s = std::max(out.stage2_s, wall);
        const Peer& peer_j = peers[(*glist[j])[0]];
        out.calls.push_back(
            {leader.vm_index, peer_j.vm_index,
             catalog::classify_traffic(*leader.site, *peer_j.site), bytes_dir,
             2});
      }
    }
  }
  return out;
}

double comm_total_s(const CommBreakdown& comm, const catalog::CommParams& p,
                    int n_peers) {
  if (n_peers < 2) {
    return 0.0;
  }
  return p.payload_scale * (comm.stage1_s + comm.stage2_s) + p.beta_s +
         p.gamma_s_per_peer * n_peers;
}

double total_egress_gb(const CommBreakdown& comm) {
  double total = 0.0;
  for (const auto& c : comm.calls) {
    total += c.gbytes;
  }
  return total;
}

EpochReport simulate_epoch(const Scenario& s) {
  EpochReport rep;
  rep.scenario_id = s.id;
  rep.model = s.model.name;
  rep.tbs = s.run.tbs;
  rep.peers = build_peers(s);
  rep.n_peers = static_cast<int>(rep.peers.size());

  double rate_sum = 0.0;
  for (const Peer& p : rep.peers) {
    rate_sum += p.rate_sps;
  }
  rep.t_calc_s = s.run.tbs / rate_sum;
  rep.t_wait_s = std::max(0.0, s.run.matchmaking_floor_s - rep.t_calc_s);
  rep.floor_bound = rep.t_wait_s > 0.0;

  if (rep.n_peers >= 2) {
    rep.comm = communication_phase(rep.peers, s.model.grad_payload_gb(),
                                   s.network, s.run.tcp_window_bytes);
  }
  rep.t_comm_s = comm_total_s(rep.comm, s.run.comm, rep.n_peers);
  rep.t_comm_per_gpu_s = rep.n_peers > 0 ? rep.t_comm_s / rep.n_peers : 0.0;

  rep.epoch_time_s =
      rep.t_calc_s + rep.t_wait_s + (1.0 - s.run.comm_overlap) * rep.t_comm_s;
  rep.sps_global = s.run.tbs / rep.epoch_time_s;

  // Per-peer sample shares; the last peer takes the remainder so the total
  // matches the batch exactly.
  rep.samples_per_peer.resize(rep.n_peers);
  double assigned = 0.0;
  for (int i = 0; i + 1 < rep.n_peers; ++i) {
    rep.samples_per_peer[i] = rep.peers[i].rate_sps / rate_sum * s.run.tbs;
    assigned += rep.samples_per_peer[i];
  }
  rep.samples_per_peer[rep.n_peers - 1] = s.run.tbs - assigned;
  return rep;
}

/* --- calibration ------------------------------------------------------- */

namespace {

/* Solves the 2x2 system a*x + b*y = e ; c*x + d*y = f. */
bool solve2(double a, double b, double c, double d, double e, double f,
            double& x, double& y) {
  double det = a * d - b * c;
  if (std::abs(det) < 1e-12) {
    return false;
  }
  x = (e * d - b * f) / det;
  y = (a * f - e * c) / det;
  return true;
}

}  // namespace

CalibrationResult calibrate(const std::vector<Observation>& observations) {
  if (observations.size() < 2) {
    raise(ErrorKind::UnderdeterminedFit, "observations",
          "calibration needs at least 2 averaging-time observations");
  }
  struct Row {
    double transfer_s;  // modeled stage1 + stage2 wall
    double n;
    double measured;
  };
  std::vector<Row> rows;
  for (const auto& obs : observations) {
    auto peers = build_peers(obs.scenario);
    if (peers.size() < 2) {
      raise(ErrorKind::Validation, obs.scenario.id,
            "calibration observations need at least 2 peers");
    }
    CommBreakdown comm = communication_phase(
        peers, obs.scenario.model.grad_payload_gb(), obs.scenario.network,
        obs.scenario.run.tcp_window_bytes);
    rows.push_back({comm.stage1_s + comm.stage2_s,
                    static_cast<double>(peers.size()), obs.measured_t_comm_s});
  }

  CalibrationResult result;
  auto fit_pinned = [&rows](double& beta, double& gamma) {
    // payload_scale = 1: least squares on y - T = beta + gamma * n.
    double sn = 0, snn = 0, sy = 0, sny = 0;
    for (const Row& r : rows) {
      double y = r.measured - r.transfer_s;
      sn += r.n;
      snn += r.n * r.n;
      sy += y;
      sny += r.n * y;
    }
    double m = static_cast<double>(rows.size());
    return solve2(m, sn, sn, snn, sy, sny, beta, gamma);
  };

  bool fitted = false;
  if (observations.size() >= 3) {
    // Normal equations for y = ps*T + beta + gamma*n.
    double stt = 0, st = 0, stn = 0, sn = 0, snn = 0, sty = 0, sy = 0, sny = 0;
    for (const Row& r : rows) {
      stt += r.transfer_s * r.transfer_s;
      st += r.transfer_s;
      stn += r.transfer_s * r.n;
      sn += r.n;
      snn += r.n * r.n;
      sty += r.transfer_s * r.measured;
      sy += r.measured;
      sny += r.n * r.measured;
    }
    double m = static_cast<double>(rows.size());
    std::array<std::array<double, 3>, 3> a = {{{stt, st, stn},
                                               {st, m, sn},
                                               {stn, sn, snn}}};
    std::array<double, 3> b = {sty, sy, sny};
    double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) > 1e-9) {
      auto det3 = [](std::array<std::array<double, 3>, 3> mm) {
        return mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
               mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
               mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
      };
      auto col = [&](int c) {
        auto mm = a;
        for (int r = 0; r < 3; ++r) {
          mm[r][c] = b[r];
        }
        return det3(mm);
      };
      result.params.payload_scale = col(0) / det;
      result.params.beta_s = col(1) / det;
      result.params.gamma_s_per_peer = col(2) / det;
      fitted = result.params.payload_scale > 0.0;
    }
  }
  if (!fitted) {
    result.payload_scale_pinned = true;
    result.params.payload_scale = 1.0;
    if (!fit_pinned(result.params.beta_s, result.params.gamma_s_per_peer)) {
      raise(ErrorKind::UnderdeterminedFit, "observations",
            "observations do not span distinct peer counts");
    }
  }

  // Diagnostic: raw linear fit of measured totals against the peer count.
  {
    double sn = 0, snn = 0, sy = 0, sny = 0;
    for (const Row& r : rows) {
      sn += r.n;
      snn += r.n * r.n;
      sy += r.measured;
      sny += r.n * r.measured;
    }
    double m = static_cast<double>(rows.size());
    double beta = 0.0, gamma = 0.0;
    if (solve2(m, sn, sn, snn, sy, sny, beta, gamma)) {
      result.linear_beta_s = beta;
      result.linear_gamma_s_per_peer = gamma;
    }
  }

  for (const Row& r : rows) {
    double model = result.params.payload_scale * r.transfer_s +
                   result.params.beta_s +
                   result.params.gamma_s_per_peer * r.n;
    result.residual_s.push_back(model - r.measured);
  }
  return result;
}

}  // namespace geospot::protocol
