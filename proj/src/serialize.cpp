#include "geospot/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geospot/errors.hpp"

namespace geospot::serialize {

std::string fmt(double v) {
  if (!std::isfinite(v)) {
    raise(ErrorKind::Domain, "value", "cannot serialize a non-finite number");
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ordered_json num(double v) {
  // Round-trip through the 6-digit text so the JSON dump prints the same
  // short form instead of a 17-digit shortest representation.
  return ordered_json::parse(fmt(v));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

ordered_json epoch_json(const protocol::EpochReport& rep) {
  ordered_json j;
  j["scenario_id"] = rep.scenario_id;
  j["model"] = rep.model;
  j["n_peers"] = rep.n_peers;
  j["tbs"] = num(rep.tbs);
  j["t_calc_s"] = num(rep.t_calc_s);
  j["t_wait_s"] = num(rep.t_wait_s);
  j["t_comm_s"] = num(rep.t_comm_s);
  j["t_comm_per_gpu_s"] = num(rep.t_comm_per_gpu_s);
  j["epoch_time_s"] = num(rep.epoch_time_s);
  j["sps_global"] = num(rep.sps_global);
  j["floor_bound"] = rep.floor_bound;
  j["stage1_s"] = num(rep.comm.stage1_s);
  j["stage2_s"] = num(rep.comm.stage2_s);
  ordered_json samples = ordered_json::array();
  for (double s : rep.samples_per_peer) {
    samples.push_back(num(s));
  }
  j["samples_per_peer"] = samples;
  ordered_json peers = ordered_json::array();
  for (const auto& p : rep.peers) {
    ordered_json pj;
    pj["site"] = p.site->id;
    pj["rate_sps"] = num(p.rate_sps);
    peers.push_back(pj);
  }
  j["peers"] = peers;
  ordered_json calls = ordered_json::array();
  for (const auto& c : rep.comm.calls) {
    ordered_json cj;
    cj["sender"] = c.sender;
    cj["receiver"] = c.receiver;
    cj["class"] = c.cls.token();
    cj["gbytes"] = num(c.gbytes);
    cj["stage"] = c.stage;
    calls.push_back(cj);
  }
  j["egress_calls"] = calls;
  return j;
}

ordered_json cost_json(const std::string& scenario_id,
                       const costing::CostReport& rep) {
  ordered_json j;
  j["scenario_id"] = scenario_id;
  j["mode"] = catalog::to_string(rep.mode);
  j["fleet_vm_usd_h"] = num(rep.fleet_vm_usd_h);
  j["fleet_egress_usd_h"] = num(rep.fleet_egress_usd_h);
  j["fleet_data_usd_h"] = num(rep.fleet_data_usd_h);
  j["fleet_total_usd_h"] = num(rep.fleet_total_usd_h);
  j["usd_per_million"] = num(rep.usd_per_million);
  j["usd_per_million_vm_only"] = num(rep.usd_per_million_vm_only);
  ordered_json vms = ordered_json::array();
  for (const auto& vm : rep.per_vm) {
    ordered_json vj;
    vj["site"] = vm.site_id;
    vj["peer_index"] = vm.peer_index;
    vj["vm_usd_h"] = num(vm.vm_usd_h);
    vj["egress_usd_h"] = num(vm.egress_usd_h);
    vj["egress_external_usd_h"] = num(vm.egress_external_usd_h);
    vj["data_usd_h"] = num(vm.data_usd_h);
    vj["total_usd_h"] = num(vm.total_usd_h);
    ordered_json by_class;
    for (const auto& [token, gb] : vm.egress_gb_by_class) {
      by_class[token] = num(gb);
    }
    vj["egress_gb_by_class"] = by_class;
    vms.push_back(vj);
  }
  j["per_vm"] = vms;
  return j;
}

ordered_json calibration_json(const protocol::CalibrationResult& fit) {
  ordered_json j;
  j["beta_s"] = num(fit.params.beta_s);
  j["gamma_s_per_peer"] = num(fit.params.gamma_s_per_peer);
  j["payload_scale"] = num(fit.params.payload_scale);
  j["payload_scale_pinned"] = fit.payload_scale_pinned;
  j["linear_beta_s"] = num(fit.linear_beta_s);
  j["linear_gamma_s_per_peer"] = num(fit.linear_gamma_s_per_peer);
  ordered_json res = ordered_json::array();
  for (double r : fit.residual_s) {
    res.push_back(num(r));
  }
  j["residual_s"] = res;
  return j;
}

ordered_json candidate_json(const optimizer::Candidate& cand) {
  ordered_json j;
  j["counts"] = cand.counts;
  j["objective_value"] = num(cand.objective_value);
  j["epoch"] = epoch_json(cand.epoch);
  j["cost"] = cost_json(cand.epoch.scenario_id, cand.cost);
  return j;
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["scenario_paths"] = m.scenario_paths;
  j["output_dir"] = m.output_dir;
  j["deterministic"] = m.deterministic;
  j["tool_version"] = m.tool_version;
  return j;
}

std::string analytics_csv(const std::vector<analytics::ScalingPoint>& rows) {
  std::string out =
      "scenario_id,n_gpus,sps,speedup,per_gpu,granularity,asymptotic_sps\n";
  for (const auto& r : rows) {
    out += csv_field(r.scenario_id);
    out += ',' + std::to_string(r.n_gpus);
    out += ',' + fmt(r.sps);
    out += ',' + fmt(r.speedup);
    out += ',' + fmt(r.per_gpu);
    out += ',';
    out += r.granularity ? fmt(*r.granularity) : "";
    out += ',';
    out += r.asymptotic_sps ? fmt(*r.asymptotic_sps) : "";
    out += '\n';
  }
  return out;
}

std::string costing_csv(
    const std::vector<std::pair<std::string, costing::CostReport>>& rows) {
  std::string out =
      "scenario_id,mode,vm_usd_h,egress_usd_h,data_usd_h,total_usd_h,"
      "usd_per_1m,usd_per_1m_vm_only\n";
  for (const auto& [id, rep] : rows) {
    out += csv_field(id);
    out += ',' + catalog::to_string(rep.mode);
    out += ',' + fmt(rep.fleet_vm_usd_h);
    out += ',' + fmt(rep.fleet_egress_usd_h);
    out += ',' + fmt(rep.fleet_data_usd_h);
    out += ',' + fmt(rep.fleet_total_usd_h);
    out += ',' + fmt(rep.usd_per_million);
    out += ',' + fmt(rep.usd_per_million_vm_only);
    out += '\n';
  }
  return out;
}

std::string ranked_csv(const std::vector<optimizer::Candidate>& ranked,
                       const std::string& scenario_id) {
  std::string out =
      "scenario_id,rank,counts,n_vms,sps,usd_per_1m,total_usd_h,"
      "objective_value\n";
  for (size_t i = 0; i < ranked.size(); ++i) {
    const auto& c = ranked[i];
    std::string counts;
    int n_vms = 0;
    for (size_t k = 0; k < c.counts.size(); ++k) {
      if (k) {
        counts += '+';
      }
      counts += std::to_string(c.counts[k]);
      n_vms += c.counts[k];
    }
    out += csv_field(scenario_id);
    out += ',' + std::to_string(i + 1);
    out += ',' + counts;
    out += ',' + std::to_string(n_vms);
    out += ',' + fmt(c.epoch.sps_global);
    out += ',' + fmt(c.cost.usd_per_million);
    out += ',' + fmt(c.cost.fleet_total_usd_h);
    out += ',' + fmt(c.objective_value);
    out += '\n';
  }
  return out;
}

std::string render_table(const std::vector<std::vector<std::string>>& cells) {
  if (cells.empty()) {
    return "";
  }
  std::vector<size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  }
  std::string out;
  for (size_t r = 0; r < cells.size(); ++r) {
    const auto& row = cells[r];
    for (size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      if (i + 1 < row.size()) {
        out.append(width[i] - row[i].size() + 2, ' ');
      }
    }
    out += '\n';
    if (r == 0) {
      for (size_t i = 0; i < width.size(); ++i) {
        out.append(width[i], '-');
        if (i + 1 < width.size()) {
          out.append(2, ' ');
        }
      }
      out += '\n';
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    raise(ErrorKind::Validation, path, "cannot open output file for writing");
  }
  f << content;
  if (!f) {
    raise(ErrorKind::Validation, path, "failed while writing output file");
  }
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    raise(ErrorKind::Validation, path, "cannot open file for reading");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace geospot::serialize
