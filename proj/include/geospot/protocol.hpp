#pragma once

#include <string>
#include <vector>

#include "geospot/scenario.hpp"

namespace geospot::protocol {

/* One VM participating in an epoch. */
struct Peer {
  const catalog::Site* site = nullptr;
  int vm_index = 0;       // position within the placement expansion
  double rate_sps = 0.0;  // effective training rate of this peer
};

/* One billed transfer: sender pushes gbytes to receiver once per epoch. */
struct EgressCall {
  int sender = 0;    // peer index
  int receiver = 0;  // peer index
  catalog::Classified cls;
  double gbytes = 0.0;
  int stage = 0;  // 1 = within locality group, 2 = between group leaders
};

/* Transfer walls of the two averaging stages, before protocol overhead. */
struct CommBreakdown {
  double stage1_s = 0.0;  // parallel intra-group all-reduce, slowest group
  double stage2_s = 0.0;  // leader exchange, slowest directed transfer
  std::vector<EgressCall> calls;
};

struct EpochReport {
  std::string scenario_id;
  std::string model;
  int n_peers = 0;
  double tbs = 0.0;
  double t_calc_s = 0.0;
  double t_wait_s = 0.0;
  double t_comm_s = 0.0;
  double t_comm_per_gpu_s = 0.0;
  double epoch_time_s = 0.0;
  double sps_global = 0.0;
  bool floor_bound = false;  // matchmaking floor extended the epoch
  std::vector<double> samples_per_peer;
  std::vector<Peer> peers;
  CommBreakdown comm;
};

/* Peers for the scenario's placement with collaborative rates applied. */
std::vector<Peer> build_peers(const Scenario& s);

/* Transfer walls and billed calls of the gradient averaging step.

   Peers are partitioned into locality groups by (cloud, region). Stage 1 runs
   a chunked all-reduce inside each group: every member exchanges 2P/g with
   each of its g-1 counterparts over the group's local link, all groups in
   parallel. Stage 2 exchanges the reduced shards between group leaders: 2P/k
   per directed leader pair, carried by the s_i*s_j member-pair streams of the
   two groups, and a sender's total outflow is capped by its local uplink. */
CommBreakdown communication_phase(const std::vector<Peer>& peers,
                                  double payload_gb,
                                  const netmodel::NetworkMatrix& net,
                                  double window_bytes);

/* Wall time of the full averaging step for n peers:
   payload_scale * (stage1 + stage2) + beta + gamma * n. Zero below 2 peers. */
double comm_total_s(const CommBreakdown& comm, const catalog::CommParams& p,
                    int n_peers);

EpochReport simulate_epoch(const Scenario& s);

/* Total bytes leaving VMs during one epoch (GB). */
double total_egress_gb(const CommBreakdown& comm);

/* --- calibration ------------------------------------------------------- */

struct Observation {
  Scenario scenario;
  double measured_t_comm_s = 0.0;
};

struct CalibrationResult {
  catalog::CommParams params;
  bool payload_scale_pinned = false;  // too few observations to fit it
  /* Plain linear fit of measured totals against the peer count; a useful
     smoke check but it folds the transfer time into both coefficients. */
  double linear_beta_s = 0.0;
  double linear_gamma_s_per_peer = 0.0;
  std::vector<double> residual_s;  // per observation, model minus measured
};

/* Fits CommParams so modeled averaging walls match the measured ones.
   Two observations pin payload_scale at 1 and solve beta/gamma exactly;
   three or more fit all parameters by least squares. Fewer than two, or a
   degenerate system, throw UnderdeterminedFit. */
CalibrationResult calibrate(const std::vector<Observation>& observations);

}  // namespace geospot::protocol
