#include "geospot/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#ifndef GEOSPOT_BUNDLED_DATA_DIR
#define GEOSPOT_BUNDLED_DATA_DIR "data"
#endif

namespace geospot {

namespace fs = std::filesystem;

std::string to_string(Objective o) {
  switch (o) {
    case Objective::MaxSps: return "max_sps";
    case Objective::MinUsdPerMillion: return "min_usd_per_million";
    case Objective::MaxSpsUnderBudget: return "max_sps_under_budget";
  }
  return "?";
}

Objective objective_from_string(const std::string& s) {
  if (s == "max_sps") return Objective::MaxSps;
  if (s == "min_usd_per_million") return Objective::MinUsdPerMillion;
  if (s == "max_sps_under_budget") return Objective::MaxSpsUnderBudget;
  raise(ErrorKind::Parse, s, "unknown objective");
}

const catalog::Site& Scenario::site(const std::string& sid) const {
  for (const auto& s : sites) {
    if (s.id == sid) {
      return s;
    }
  }
  raise(ErrorKind::Validation, sid, "unknown site id");
}

int Scenario::total_vms() const {
  int n = 0;
  for (const auto& p : placement) {
    n += p.vm_count;
  }
  return n;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("GEOSPOT_DATA_DIR")) {
    if (*env != '\0') {
      return env;
    }
  }
  return GEOSPOT_BUNDLED_DATA_DIR;
}

std::string resolve_scenario_path(const std::string& name) {
  if (fs::exists(name)) {
    return name;
  }
  fs::path candidate = fs::path(default_data_dir()) / "scenarios" / name;
  if (fs::exists(candidate)) {
    return candidate.string();
  }
  candidate = fs::path(default_data_dir()) / "scenarios" / (name + ".json");
  if (fs::exists(candidate)) {
    return candidate.string();
  }
  raise(ErrorKind::Validation, name, "scenario not found");
}

namespace {

std::string resolve_resource(const std::string& ref,
                             const fs::path& scenario_dir) {
  fs::path p(ref);
  if (p.is_absolute() && fs::exists(p)) {
    return p.string();
  }
  fs::path local = scenario_dir / p;
  if (fs::exists(local)) {
    return local.string();
  }
  fs::path bundled = fs::path(default_data_dir()) / p;
  if (fs::exists(bundled)) {
    return bundled.string();
  }
  raise(ErrorKind::Validation, ref, "referenced data file not found");
}

PlacementEntry parse_placement_entry(const nlohmann::json& e) {
  PlacementEntry pe;
  if (!e.contains("site")) {
    raise(ErrorKind::Parse, "site", "placement entry missing site");
  }
  pe.site_id = e["site"].get<std::string>();
  pe.vm_count = e.value("vm_count", 0);
  if (e.contains("fill_limit")) {
    pe.fill_limit = e["fill_limit"].get<int>();
  }
  if (pe.vm_count < 0) {
    raise(ErrorKind::Validation, pe.site_id, "vm_count must be >= 0");
  }
  return pe;
}

SearchSpec parse_search(const nlohmann::json& j) {
  SearchSpec spec;
  if (!j.contains("entries") || !j["entries"].is_array() ||
      j["entries"].empty()) {
    raise(ErrorKind::Parse, "search.entries",
          "search spec needs a nonempty entries array");
  }
  for (const auto& e : j["entries"]) {
    SearchEntry se;
    if (!e.contains("sites") || !e["sites"].is_array() || e["sites"].empty()) {
      raise(ErrorKind::Parse, "search.entries.sites",
            "search entry needs a nonempty sites array");
    }
    for (const auto& s : e["sites"]) {
      se.sites.push_back(parse_placement_entry(s));
    }
    if (e.contains("allowed_counts")) {
      for (const auto& c : e["allowed_counts"]) {
        se.allowed_counts.push_back(c.get<int>());
      }
    }
    spec.entries.push_back(std::move(se));
  }
  if (j.contains("total_vm_bounds")) {
    const auto& b = j["total_vm_bounds"];
    if (!b.is_array() || b.size() != 2) {
      raise(ErrorKind::Parse, "search.total_vm_bounds",
            "total_vm_bounds must be [min, max]");
    }
    spec.min_total_vms = b[0].get<int>();
    spec.max_total_vms = b[1].get<int>();
  }
  if (j.contains("objective")) {
    spec.objective = objective_from_string(j["objective"].get<std::string>());
  }
  if (j.contains("budget_usd_per_h")) {
    spec.budget_usd_per_h = j["budget_usd_per_h"].get<double>();
  }
  if (j.contains("enumeration_cap")) {
    spec.enumeration_cap = j["enumeration_cap"].get<long long>();
  }
  return spec;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorKind::Parse, path, "cannot open scenario file");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Parse, path, std::string("invalid JSON: ") + e.what());
  }

  fs::path dir = fs::path(path).parent_path();
  Scenario sc;
  sc.id = doc.value("id", fs::path(path).stem().string());

  if (!doc.contains("sites") || !doc["sites"].is_array() ||
      doc["sites"].empty()) {
    raise(ErrorKind::Parse, "sites", "scenario needs a nonempty sites array");
  }
  for (const auto& s : doc["sites"]) {
    catalog::Site site;
    for (const char* field :
         {"id", "cloud", "continent", "region", "zone", "gpu", "net_group"}) {
      if (!s.contains(field)) {
        raise(ErrorKind::Parse, field, "site missing field");
      }
    }
    site.id = s["id"].get<std::string>();
    site.cloud = catalog::cloud_from_string(s["cloud"].get<std::string>());
    site.continent = s["continent"].get<std::string>();
    site.region = s["region"].get<std::string>();
    site.zone = s["zone"].get<std::string>();
    site.gpu = s["gpu"].get<std::string>();
    site.net_group = s["net_group"].get<std::string>();
    sc.sites.push_back(std::move(site));
  }
  catalog::validate_sites(sc.sites);

  if (doc.contains("placement")) {
    for (const auto& e : doc["placement"]) {
      sc.placement.push_back(parse_placement_entry(e));
    }
  }
  if (doc.contains("search")) {
    sc.search = parse_search(doc["search"]);
  }
  if (sc.placement.empty() && !sc.search) {
    raise(ErrorKind::Validation, "placement",
          "scenario needs a placement or a search spec");
  }

  for (const char* field : {"model", "network", "prices", "compute"}) {
    if (!doc.contains(field)) {
      raise(ErrorKind::Parse, field, "scenario missing field");
    }
  }
  sc.network = netmodel::load_network(
      resolve_resource(doc["network"].get<std::string>(), dir));
  sc.prices = catalog::load_prices(
      resolve_resource(doc["prices"].get<std::string>(), dir));
  sc.compute = catalog::load_compute(
      resolve_resource(doc["compute"].get<std::string>(), dir));

  std::string models_ref = doc.value("models", std::string("models.json"));
  auto models = catalog::load_models(resolve_resource(models_ref, dir));
  std::string model_name = doc["model"].get<std::string>();
  auto mit = models.find(model_name);
  if (mit == models.end()) {
    raise(ErrorKind::Validation, model_name, "model not in model file");
  }
  sc.model = mit->second;

  sc.run.comm = sc.compute.default_comm();
  if (doc.contains("run")) {
    const auto& r = doc["run"];
    sc.run.tbs = r.value("tbs", sc.run.tbs);
    sc.run.matchmaking_floor_s =
        r.value("matchmaking_floor_s", sc.run.matchmaking_floor_s);
    sc.run.tcp_window_bytes =
        r.value("tcp_window_bytes", sc.run.tcp_window_bytes);
    sc.run.comm_overlap = r.value("comm_overlap", sc.run.comm_overlap);
    if (r.contains("pricing_mode")) {
      sc.run.pricing_mode = catalog::pricing_mode_from_string(
          r["pricing_mode"].get<std::string>());
    }
    if (r.contains("comm")) {
      const auto& c = r["comm"];
      sc.run.comm.beta_s = c.value("beta_s", sc.run.comm.beta_s);
      sc.run.comm.gamma_s_per_peer =
          c.value("gamma_s_per_peer", sc.run.comm.gamma_s_per_peer);
      sc.run.comm.payload_scale =
          c.value("payload_scale", sc.run.comm.payload_scale);
    }
  }
  if (sc.run.tbs <= 0.0) {
    raise(ErrorKind::Validation, "run.tbs", "tbs must be positive");
  }
  if (sc.run.comm_overlap < 0.0 || sc.run.comm_overlap > 1.0) {
    raise(ErrorKind::Validation, "run.comm_overlap",
          "comm_overlap must be in [0, 1]");
  }
  if (sc.run.tcp_window_bytes <= 0.0) {
    raise(ErrorKind::Validation, "run.tcp_window_bytes",
          "tcp_window_bytes must be positive");
  }
  if (sc.run.comm.payload_scale <= 0.0) {
    raise(ErrorKind::Validation, "run.comm.payload_scale",
          "payload_scale must be positive");
  }

  // Every placement/search site must exist; every site pair the placement can
  // produce must have network coverage and prices.
  auto check_site = [&sc](const std::string& sid) {
    const catalog::Site& st = sc.site(sid);
    if (!sc.prices.has_vm(st.cloud, st.gpu)) {
      raise(ErrorKind::MissingRate, catalog::to_string(st.cloud) + "/" + st.gpu,
            "no VM price for placed offering");
    }
    if (!sc.compute.has_baseline(st.gpu, sc.model.name)) {
      raise(ErrorKind::MissingRate, st.gpu + "/" + sc.model.name,
            "no baseline throughput for placed offering");
    }
  };
  auto require_links = [&sc](const std::vector<const catalog::Site*>& group) {
    for (const auto* a : group) {
      for (const auto* b : group) {
        sc.network.at(a->net_group, b->net_group);  // throws MissingLink
      }
    }
  };
  std::vector<const catalog::Site*> placed;
  for (const auto& p : sc.placement) {
    check_site(p.site_id);
    if (p.vm_count > 0) {
      placed.push_back(&sc.site(p.site_id));
    }
  }
  require_links(placed);
  if (sc.search) {
    // Sites inside one entry co-fill, so they must be fully linked. Pairs
    // across entries are only exercised when a candidate actually mixes the
    // entries; the matrix lookup reports the missing link at that point.
    for (const auto& e : sc.search->entries) {
      std::vector<const catalog::Site*> entry_sites;
      for (const auto& s : e.sites) {
        check_site(s.site_id);
        entry_sites.push_back(&sc.site(s.site_id));
      }
      require_links(entry_sites);
    }
  }
  return sc;
}

std::vector<const catalog::Site*> expand_placement(const Scenario& s) {
  std::vector<const catalog::Site*> out;
  for (const auto& p : s.placement) {
    const catalog::Site& site = s.site(p.site_id);
    for (int i = 0; i < p.vm_count; ++i) {
      out.push_back(&site);
    }
  }
  return out;
}

void set_total_vms(Scenario& s, int n) {
  if (n < 1) {
    raise(ErrorKind::Validation, "n_gpus", "peer count must be >= 1");
  }
  int remaining = n;
  for (auto& p : s.placement) {
    int cap = p.fill_limit.value_or(remaining);
    p.vm_count = std::min(remaining, cap);
    remaining -= p.vm_count;
  }
  if (remaining > 0) {
    raise(ErrorKind::Validation, "n_gpus",
          "placement capacity too small for requested peer count");
  }
}

}  // namespace geospot
