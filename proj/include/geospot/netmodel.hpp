#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "geospot/errors.hpp"

namespace geospot::netmodel {

/* One direction of a link between two peer groups. bandwidth_gbit is the path
   capacity; ceiling_gbit, when present, is the lower aggregate throughput
   actually observed between VMs on that path (NIC or provider cap) and is
   applied on top of the capacity. Latency is one-way, as measured. */
struct Link {
  double bandwidth_gbit = 0.0;
  double latency_ms = 0.0;
  std::optional<double> ceiling_gbit;

  double rtt_s() const { return 2.0 * latency_ms / 1000.0; }
};

/* Steady-state throughput of a single TCP stream: limited by the congestion
   window per round trip, never above the link capacity. A zero-latency link
   is window-unconstrained. */
double single_stream_gbit(const Link& link, double window_bytes);

/* Total throughput of n parallel streams on one link. The optional ceiling
   argument models an externally measured aggregate cap (e.g. a benchmarked
   uplink limit) and combines with the link's own ceiling. */
double aggregate_gbit(const Link& link, int n_streams, double window_bytes,
                      std::optional<double> ceiling_gbit = std::nullopt);

/* Directional matrix of links keyed by (from_group, to_group) tokens. */
class NetworkMatrix {
 public:
  void add(const std::string& from, const std::string& to, Link link);
  bool has(const std::string& from, const std::string& to) const;
  /* Throws MissingLink naming "from->to" when absent. */
  const Link& at(const std::string& from, const std::string& to) const;

  /* Symmetric channel both directions must traverse: min of the directional
     bandwidths, mean latency, min of the ceilings that are present. */
  Link channel(const std::string& a, const std::string& b) const;

  const std::map<std::pair<std::string, std::string>, Link>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, Link> entries_;
};

/* Loads a matrix file: {"entries": [{"from", "to", "bandwidth_gbit",
   "latency_ms", "ceiling_gbit"?}, ...]}. Diagonals are regular entries. */
NetworkMatrix load_network(const std::string& path);

}  // namespace geospot::netmodel
