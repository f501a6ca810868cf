#include "geospot/catalog.hpp"

#include <fstream>

#include "json.hpp"

namespace geospot::catalog {

std::string to_string(Cloud c) {
  switch (c) {
    case Cloud::GC: return "GC";
    case Cloud::AWS: return "AWS";
    case Cloud::AZURE: return "AZURE";
    case Cloud::LAMBDA: return "LAMBDA";
    case Cloud::ONPREM: return "ONPREM";
  }
  return "?";
}

Cloud cloud_from_string(const std::string& s) {
  if (s == "GC") return Cloud::GC;
  if (s == "AWS") return Cloud::AWS;
  if (s == "AZURE") return Cloud::AZURE;
  if (s == "LAMBDA") return Cloud::LAMBDA;
  if (s == "ONPREM") return Cloud::ONPREM;
  raise(ErrorKind::Parse, s, "unknown cloud");
}

std::string to_string(PricingMode m) {
  return m == PricingMode::Spot ? "spot" : "ondemand";
}

PricingMode pricing_mode_from_string(const std::string& s) {
  if (s == "spot" || s == "Spot") return PricingMode::Spot;
  if (s == "ondemand" || s == "OnDemand" || s == "on_demand") {
    return PricingMode::OnDemand;
  }
  raise(ErrorKind::Parse, s, "unknown pricing mode");
}

std::string to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::Internal: return "internal";
    case TrafficClass::IntraZone: return "intra_zone";
    case TrafficClass::InterZoneSameRegion: return "inter_zone";
    case TrafficClass::InterRegionSameContinent: return "inter_region";
    case TrafficClass::AnyToOce: return "any_to_oce";
    case TrafficClass::BetweenContinents: return "between_continents";
  }
  return "?";
}

std::string Classified::token() const {
  if (cls == TrafficClass::InterRegionSameContinent) {
    return to_string(cls) + "_" + continent;
  }
  return to_string(cls);
}

bool Classified::is_external() const {
  switch (cls) {
    case TrafficClass::Internal:
    case TrafficClass::IntraZone:
    case TrafficClass::InterZoneSameRegion:
      return false;
    default:
      return true;
  }
}

Classified classify_traffic(const Site& a, const Site& b) {
  if (a.id == b.id) {
    return {TrafficClass::Internal, ""};
  }
  if (a.zone == b.zone) {
    return {TrafficClass::IntraZone, ""};
  }
  if (a.region == b.region) {
    return {TrafficClass::InterZoneSameRegion, ""};
  }
  if (a.continent == b.continent) {
    return {TrafficClass::InterRegionSameContinent, a.continent};
  }
  if (a.continent == "OCE" || b.continent == "OCE") {
    return {TrafficClass::AnyToOce, ""};
  }
  return {TrafficClass::BetweenContinents, ""};
}

double PriceBook::vm_usd_per_h(Cloud cloud, const std::string& gpu,
                               PricingMode mode) const {
  auto it = vm_.find({cloud, gpu});
  if (it == vm_.end()) {
    raise(ErrorKind::MissingRate, to_string(cloud) + "/" + gpu,
          "no VM price for offering");
  }
  return mode == PricingMode::Spot ? it->second.spot_usd_per_h
                                   : it->second.ondemand_usd_per_h;
}

double PriceBook::egress_usd_per_gb(Cloud sender, const Classified& c) const {
  if (c.cls == TrafficClass::Internal) {
    return 0.0;
  }
  auto it = egress_.find(sender);
  if (it == egress_.end()) {
    raise(ErrorKind::MissingRate, to_string(sender),
          "no egress rates for cloud");
  }
  const EgressRates& r = it->second;
  switch (c.cls) {
    case TrafficClass::IntraZone: return r.intra_zone;
    case TrafficClass::InterZoneSameRegion: return r.inter_zone;
    case TrafficClass::InterRegionSameContinent: {
      auto jt = r.inter_region.find(c.continent);
      if (jt == r.inter_region.end()) {
        raise(ErrorKind::MissingRate, to_string(sender) + "/" + c.token(),
              "no inter-region rate for continent");
      }
      return jt->second;
    }
    case TrafficClass::AnyToOce: return r.any_to_oce;
    case TrafficClass::BetweenContinents: return r.between_continents;
    default: return 0.0;
  }
}

void PriceBook::set_vm(Cloud cloud, const std::string& gpu, VmPrice price) {
  vm_[{cloud, gpu}] = price;
}

void PriceBook::set_egress(Cloud cloud, EgressRates rates) {
  egress_[cloud] = std::move(rates);
}

bool PriceBook::has_vm(Cloud cloud, const std::string& gpu) const {
  return vm_.count({cloud, gpu}) > 0;
}

namespace {

nlohmann::json parse_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorKind::Parse, path, std::string("cannot open ") + what);
  }
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Parse, path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

PriceBook load_prices(const std::string& path) {
  nlohmann::json doc = parse_file(path, "price file");
  PriceBook book;
  if (!doc.contains("clouds")) {
    raise(ErrorKind::Parse, "clouds", "price file needs a clouds object");
  }
  for (const auto& [name, spec] : doc["clouds"].items()) {
    Cloud cloud = cloud_from_string(name);
    if (spec.contains("vm")) {
      for (const auto& [gpu, p] : spec["vm"].items()) {
        VmPrice vp;
        if (!p.contains("vm_spot_usd_per_h")) {
          raise(ErrorKind::Parse, name + "/" + gpu,
                "VM price needs vm_spot_usd_per_h");
        }
        vp.spot_usd_per_h = p["vm_spot_usd_per_h"].get<double>();
        vp.ondemand_usd_per_h =
            p.value("vm_ondemand_usd_per_h", vp.spot_usd_per_h);
        book.set_vm(cloud, gpu, vp);
      }
    }
    EgressRates rates;
    if (spec.contains("egress_price_per_gb_usd")) {
      const auto& e = spec["egress_price_per_gb_usd"];
      rates.intra_zone = e.value("intra_zone", 0.0);
      rates.inter_zone = e.value("inter_zone", 0.0);
      rates.any_to_oce = e.value("any_to_oce", 0.0);
      rates.between_continents = e.value("between_continents", 0.0);
      if (e.contains("inter_region")) {
        for (const auto& [cont, v] : e["inter_region"].items()) {
          rates.inter_region[cont] = v.get<double>();
        }
      }
    }
    book.set_egress(cloud, rates);
  }
  book.set_dataset_ingress(doc.value("dataset_ingress_price_per_gb_usd", 0.0));
  return book;
}

std::map<std::string, ModelProfile> load_models(const std::string& path) {
  nlohmann::json doc = parse_file(path, "model file");
  if (!doc.contains("models")) {
    raise(ErrorKind::Parse, "models", "model file needs a models object");
  }
  std::map<std::string, ModelProfile> out;
  for (const auto& [name, m] : doc["models"].items()) {
    ModelProfile p;
    p.name = name;
    for (const char* field : {"param_count", "domain", "sample_bytes"}) {
      if (!m.contains(field)) {
        raise(ErrorKind::Parse, name + "/" + field, "model missing field");
      }
    }
    p.param_count = m["param_count"].get<double>();
    p.bytes_per_param = m.value("bytes_per_param", 2.0);
    p.domain = m["domain"].get<std::string>();
    p.sample_bytes = m["sample_bytes"].get<double>();
    if (p.param_count <= 0.0 || p.bytes_per_param <= 0.0) {
      raise(ErrorKind::Validation, name, "model sizes must be positive");
    }
    out[name] = p;
  }
  return out;
}

double ComputeBook::baseline_sps(const std::string& gpu,
                                 const std::string& model) const {
  auto it = baseline_.find({gpu, model});
  if (it == baseline_.end()) {
    raise(ErrorKind::MissingRate, gpu + "/" + model,
          "no baseline throughput for offering/model");
  }
  return it->second;
}

double ComputeBook::collaborative_penalty(const std::string& model) const {
  auto it = penalty_.find(model);
  if (it == penalty_.end()) {
    raise(ErrorKind::MissingRate, model, "no collaborative penalty for model");
  }
  return it->second;
}

double ComputeBook::rate_sps(const std::string& gpu, const std::string& model,
                             bool collaborative) const {
  double rate = baseline_sps(gpu, model);
  if (collaborative) {
    rate *= collaborative_penalty(model);
  }
  return rate;
}

void ComputeBook::set_baseline(const std::string& gpu,
                               const std::string& model, double sps) {
  if (sps <= 0.0) {
    raise(ErrorKind::Validation, gpu + "/" + model,
          "baseline throughput must be positive");
  }
  baseline_[{gpu, model}] = sps;
}

void ComputeBook::set_penalty(const std::string& model, double penalty) {
  if (penalty <= 0.0 || penalty > 1.0) {
    raise(ErrorKind::Validation, model, "penalty must be in (0, 1]");
  }
  penalty_[model] = penalty;
}

bool ComputeBook::has_baseline(const std::string& gpu,
                               const std::string& model) const {
  return baseline_.count({gpu, model}) > 0;
}

ComputeBook load_compute(const std::string& path) {
  nlohmann::json doc = parse_file(path, "compute file");
  ComputeBook book;
  if (!doc.contains("baseline_sps")) {
    raise(ErrorKind::Parse, "baseline_sps",
          "compute file needs a baseline_sps object");
  }
  for (const auto& [gpu, models] : doc["baseline_sps"].items()) {
    for (const auto& [model, sps] : models.items()) {
      book.set_baseline(gpu, model, sps.get<double>());
    }
  }
  if (!doc.contains("collaborative_penalty")) {
    raise(ErrorKind::Parse, "collaborative_penalty",
          "compute file needs a collaborative_penalty object");
  }
  for (const auto& [model, p] : doc["collaborative_penalty"].items()) {
    book.set_penalty(model, p.get<double>());
  }
  CommParams comm;
  if (doc.contains("comm_params")) {
    const auto& c = doc["comm_params"];
    comm.beta_s = c.value("beta_s", 0.0);
    comm.gamma_s_per_peer = c.value("gamma_s_per_peer", 0.0);
    comm.payload_scale = c.value("payload_scale", 1.0);
  }
  book.set_default_comm(comm);
  return book;
}

double per_sample_seconds(double baseline_sps, double penalty) {
  if (baseline_sps <= 0.0) {
    raise(ErrorKind::Domain, "baseline_sps", "throughput must be positive");
  }
  if (penalty <= 0.0 || penalty > 1.0) {
    raise(ErrorKind::Domain, "penalty", "penalty must be in (0, 1]");
  }
  return 1.0 / (baseline_sps * penalty);
}

void validate_sites(const std::vector<Site>& sites) {
  std::map<std::string, const Site*> by_id;
  std::map<std::string, std::string> zone_region;
  std::map<std::string, std::string> region_continent;
  std::map<std::pair<Cloud, std::string>, std::string> group_token;
  for (const Site& s : sites) {
    if (s.id.empty()) {
      raise(ErrorKind::Validation, "id", "site id must not be empty");
    }
    if (!by_id.emplace(s.id, &s).second) {
      raise(ErrorKind::Validation, s.id, "duplicate site id");
    }
    if (s.zone.empty() || s.region.empty() || s.continent.empty()) {
      raise(ErrorKind::Validation, s.id,
            "site needs zone, region and continent");
    }
    if (s.gpu.empty() || s.net_group.empty()) {
      raise(ErrorKind::Validation, s.id, "site needs gpu and net_group");
    }
    auto [zit, znew] = zone_region.emplace(s.zone, s.region);
    if (!znew && zit->second != s.region) {
      raise(ErrorKind::Validation, s.zone, "zone mapped to two regions");
    }
    auto [rit, rnew] = region_continent.emplace(s.region, s.continent);
    if (!rnew && rit->second != s.continent) {
      raise(ErrorKind::Validation, s.region,
            "region mapped to two continents");
    }
    auto [git, gnew] = group_token.emplace(
        std::make_pair(s.cloud, s.region), s.net_group);
    if (!gnew && git->second != s.net_group) {
      raise(ErrorKind::Validation, s.id,
            "sites in one cloud region must share a net_group");
    }
  }
}

}  // namespace geospot::catalog
