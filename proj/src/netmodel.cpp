#include "geospot/netmodel.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace geospot::netmodel {

double single_stream_gbit(const Link& link, double window_bytes) {
  if (window_bytes <= 0.0) {
    raise(ErrorKind::Domain, "window_bytes", "TCP window must be positive");
  }
  double rtt = link.rtt_s();
  if (rtt <= 0.0) {
    return link.bandwidth_gbit;
  }
  double window_limited = window_bytes * 8.0 / rtt / 1e9;
  return std::min(link.bandwidth_gbit, window_limited);
}

double aggregate_gbit(const Link& link, int n_streams, double window_bytes,
                      std::optional<double> ceiling_gbit) {
  if (n_streams < 1) {
    raise(ErrorKind::Domain, "n_streams", "stream count must be >= 1");
  }
  double cap = link.bandwidth_gbit;
  if (link.ceiling_gbit) {
    cap = std::min(cap, *link.ceiling_gbit);
  }
  if (ceiling_gbit) {
    cap = std::min(cap, *ceiling_gbit);
  }
  return std::min(cap, n_streams * single_stream_gbit(link, window_bytes));
}

void NetworkMatrix::add(const std::string& from, const std::string& to,
                        Link link) {
  entries_[{from, to}] = link;
}

bool NetworkMatrix::has(const std::string& from, const std::string& to) const {
  return entries_.count({from, to}) > 0;
}

const Link& NetworkMatrix::at(const std::string& from,
                              const std::string& to) const {
  auto it = entries_.find({from, to});
  if (it == entries_.end()) {
    raise(ErrorKind::MissingLink, from + "->" + to,
          "network matrix has no entry for group pair");
  }
  return it->second;
}

Link NetworkMatrix::channel(const std::string& a, const std::string& b) const {
  if (a == b) {
    return at(a, a);
  }
  const Link& fwd = at(a, b);
  const Link& rev = at(b, a);
  Link out;
  out.bandwidth_gbit = std::min(fwd.bandwidth_gbit, rev.bandwidth_gbit);
  out.latency_ms = 0.5 * (fwd.latency_ms + rev.latency_ms);
  if (fwd.ceiling_gbit && rev.ceiling_gbit) {
    out.ceiling_gbit = std::min(*fwd.ceiling_gbit, *rev.ceiling_gbit);
  } else if (fwd.ceiling_gbit) {
    out.ceiling_gbit = fwd.ceiling_gbit;
  } else if (rev.ceiling_gbit) {
    out.ceiling_gbit = rev.ceiling_gbit;
  }
  return out;
}

NetworkMatrix load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorKind::Parse, path, "cannot open network file");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Parse, path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    raise(ErrorKind::Parse, "entries", "network file needs an entries array");
  }
  NetworkMatrix net;
  for (const auto& e : doc["entries"]) {
    for (const char* field : {"from", "to", "bandwidth_gbit", "latency_ms"}) {
      if (!e.contains(field)) {
        raise(ErrorKind::Parse, field, "network entry missing field");
      }
    }
    Link link;
    link.bandwidth_gbit = e["bandwidth_gbit"].get<double>();
    link.latency_ms = e["latency_ms"].get<double>();
    if (e.contains("ceiling_gbit")) {
      link.ceiling_gbit = e["ceiling_gbit"].get<double>();
    }
    std::string from = e["from"].get<std::string>();
    std::string to = e["to"].get<std::string>();
    if (link.bandwidth_gbit <= 0.0) {
      raise(ErrorKind::Validation, from + "->" + to,
            "bandwidth_gbit must be positive");
    }
    if (link.latency_ms < 0.0) {
      raise(ErrorKind::Validation, from + "->" + to,
            "latency_ms must be nonnegative");
    }
    net.add(from, to, link);
    if (from != to && !net.has(to, from)) {
      // Symmetric by default; an explicit reverse entry overrides this.
      net.add(to, from, link);
    }
  }
  return net;
}

}  // namespace geospot::netmodel
