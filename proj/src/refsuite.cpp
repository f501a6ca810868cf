#include "geospot/refsuite.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

namespace geospot::refsuite {

namespace {

RefRow rel_row(int criterion, const std::string& group, const std::string& name,
               double simulated, double reference, double tol_rel) {
  RefRow r;
  r.criterion = criterion;
  r.group = group;
  r.name = name;
  r.simulated = simulated;
  r.reference = reference;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "±%g%%", tol_rel * 100.0);
  r.tolerance = buf;
  r.rel_err = (simulated - reference) / reference;
  r.pass = std::abs(simulated - reference) <= tol_rel * std::abs(reference);
  return r;
}

RefRow band_row(int criterion, const std::string& group, const std::string& name,
                double simulated, double lo, double hi) {
  RefRow r;
  r.criterion = criterion;
  r.group = group;
  r.name = name;
  r.simulated = simulated;
  r.reference = 0.5 * (lo + hi);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "in [%g, %g]", lo, hi);
  r.tolerance = buf;
  r.rel_err = 0.0;
  r.pass = simulated >= lo && simulated <= hi;
  return r;
}

RefRow exact_row(int criterion, const std::string& group,
                 const std::string& name, double simulated, double reference) {
  RefRow r;
  r.criterion = criterion;
  r.group = group;
  r.name = name;
  r.simulated = simulated;
  r.reference = reference;
  r.tolerance = "exact";
  r.rel_err = reference != 0.0 ? (simulated - reference) / reference : 0.0;
  r.pass = simulated == reference;
  return r;
}

Scenario load_named(const std::string& name) {
  return load_scenario(resolve_scenario_path(name));
}

struct FigOption {
  std::string label;
  std::vector<int> counts;
};

/* Index of `counts` in the ranked list's winner, by label lookup. */
std::string winner_label(const optimizer::SearchResult& result,
                         const std::vector<FigOption>& options) {
  if (!result.feasible || result.ranked.empty()) {
    return "<infeasible>";
  }
  for (const auto& opt : options) {
    if (result.ranked.front().counts == opt.counts) {
      return opt.label;
    }
  }
  return "<other>";
}

}  // namespace

bool all_pass(const std::vector<RefRow>& rows) {
  for (const auto& r : rows) {
    if (!r.pass) {
      return false;
    }
  }
  return true;
}

std::vector<protocol::Observation> load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorKind::Parse, path, "cannot open observation file");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Parse, path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.contains("observations") || !doc["observations"].is_array() ||
      doc["observations"].empty()) {
    raise(ErrorKind::Parse, "observations",
          "observation file needs a nonempty observations array");
  }
  std::vector<protocol::Observation> out;
  for (const auto& o : doc["observations"]) {
    if (!o.contains("scenario") || !o.contains("measured_t_comm_s")) {
      raise(ErrorKind::Parse, "observations",
            "observation needs scenario and measured_t_comm_s");
    }
    protocol::Observation obs;
    obs.scenario = load_named(o["scenario"].get<std::string>());
    obs.measured_t_comm_s = o["measured_t_comm_s"].get<double>();
    if (obs.measured_t_comm_s <= 0.0) {
      raise(ErrorKind::Validation, "measured_t_comm_s",
            "measured averaging time must be positive");
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<RefRow> evaluate_reference_suite() {
  std::vector<RefRow> rows;

  // --- 1: cost arithmetic on published burn rates and throughputs.
  rows.push_back(rel_row(1, "cost-goldens", "DGX-2 spot $/1M",
                         costing::usd_per_million_samples(6.30, 413.0), 4.24,
                         0.01));
  rows.push_back(rel_row(1, "cost-goldens", "1xT4 spot $/1M",
                         costing::usd_per_million_samples(0.18, 80.0), 0.62,
                         0.01));
  rows.push_back(rel_row(1, "cost-goldens", "1xA10 $/1M",
                         costing::usd_per_million_samples(0.60, 185.0), 0.90,
                         0.01));
  rows.push_back(rel_row(1, "cost-goldens", "8xA10 $/1M",
                         costing::usd_per_million_samples(4.80, 620.6), 2.15,
                         0.01));

  // --- 2: scaling projections at granularity 1 and 10.
  rows.push_back(band_row(2, "scaling-projection", "project(g=1, 2x compute)",
                          analytics::project_scaling(1.0, 2.0), 1.328, 1.338));
  rows.push_back(band_row(2, "scaling-projection", "project(g=10, 2x compute)",
                          analytics::project_scaling(10.0, 2.0), 1.828, 1.838));

  // --- 3: the 32-cell speedup table on 2/3/4/8 local A10 peers, after
  // recalibrating the protocol overhead from the two bundled anchors.
  auto anchors = load_observations(
      std::string(default_data_dir()) + "/calibration_anchors.json");
  auto fit = protocol::calibrate(anchors);
  {
    const auto& bundled = anchors.front().scenario.compute.default_comm();
    RefRow r = band_row(3, "calibration", "anchor fit matches bundled beta",
                        fit.params.beta_s - bundled.beta_s, -1e-9, 1e-9);
    r.detail = "fit " + std::to_string(fit.params.beta_s);
    rows.push_back(r);
    r = band_row(3, "calibration", "anchor fit matches bundled gamma",
                 fit.params.gamma_s_per_peer - bundled.gamma_s_per_peer,
                 -1e-9, 1e-9);
    r.detail = "fit " + std::to_string(fit.params.gamma_s_per_peer);
    rows.push_back(r);
  }

  const std::map<std::string, std::map<int, double>> speedup_table = {
      {"RN18", {{2, 1.31}, {3, 1.77}, {4, 2.07}, {8, 3.16}}},
      {"RN50", {{2, 1.28}, {3, 1.86}, {4, 2.39}, {8, 3.72}}},
      {"RN152", {{2, 1.46}, {3, 2.11}, {4, 2.69}, {8, 4.37}}},
      {"WRN101", {{2, 0.95}, {3, 1.38}, {4, 1.79}, {8, 3.01}}},
      {"CONV", {{2, 0.94}, {3, 1.39}, {4, 1.82}, {8, 3.34}}},
      {"RBase", {{2, 1.07}, {3, 1.49}, {4, 1.79}, {8, 2.38}}},
      {"RLrg", {{2, 0.95}, {3, 1.30}, {4, 1.59}, {8, 2.30}}},
      {"RXLM", {{2, 0.93}, {3, 1.28}, {4, 1.56}, {8, 2.29}}},
  };
  {
    Scenario base = load_named("lambda_conv_8");
    auto models = catalog::load_models(
        std::string(default_data_dir()) + "/models.json");
    for (const auto& [model, cells] : speedup_table) {
      Scenario sc = base;
      sc.model = models.at(model);
      sc.run.comm = fit.params;
      double baseline = sc.compute.baseline_sps("A10", model);
      double prev = 0.0;
      bool monotone = true;
      for (const auto& [n, want] : cells) {
        set_total_vms(sc, n);
        auto rep = protocol::simulate_epoch(sc);
        double speedup = analytics::speedup(rep.sps_global, baseline);
        char name[64];
        std::snprintf(name, sizeof(name), "%s speedup at %d peers",
                      model.c_str(), n);
        rows.push_back(rel_row(3, "speedup-table", name, speedup, want, 0.20));
        monotone = monotone && speedup >= prev - 1e-12;
        prev = speedup;
      }
      RefRow mono = exact_row(3, "speedup-table", model + " monotone in peers",
                              monotone ? 1.0 : 0.0, 1.0);
      mono.tolerance = "nondecreasing";
      rows.push_back(mono);
    }
  }

  // --- 4: throughput deltas between the single-zone run and its multi-zone,
  // multi-region variants.
  {
    auto sps = [](const std::string& name) {
      Scenario sc = load_named(name);
      return protocol::simulate_epoch(sc).sps_global;
    };
    double a2cv = sps("a2_cv"), b2cv = sps("b2_cv");
    double a2nlp = sps("a2_nlp"), b2nlp = sps("b2_nlp");
    double a8cv = sps("a8_cv"), c8cv = sps("c8_cv");
    RefRow r = band_row(4, "geo-deltas", "two-zone CV delta vs one-zone",
                        std::abs(b2cv - a2cv) / a2cv, 0.0, 0.10);
    r.detail = "b2_cv vs a2_cv";
    rows.push_back(r);
    r = band_row(4, "geo-deltas", "two-region NLP slowdown",
                 (a2nlp - b2nlp) / a2nlp, 0.10, 0.25);
    r.detail = "b2_nlp vs a2_nlp";
    rows.push_back(r);
    r = band_row(4, "geo-deltas", "four-continent CV slowdown",
                 (a8cv - c8cv) / a8cv, -0.001, 0.15);
    r.detail = "c8_cv vs a8_cv";
    rows.push_back(r);
  }

  // --- 5 and 6: egress accounting on the four-continent NLP run.
  {
    Scenario c8 = load_named("c8_nlp");
    auto rep = protocol::simulate_epoch(c8);
    int intra = 0, inter = 0, oce = 0;
    for (const auto& call : rep.comm.calls) {
      if (call.stage == 1) {
        ++intra;
        continue;
      }
      const auto& a = *rep.peers[call.sender].site;
      const auto& b = *rep.peers[call.receiver].site;
      if (a.continent == "OCE" || b.continent == "OCE") {
        ++oce;
      } else {
        ++inter;
      }
    }
    rows.push_back(exact_row(5, "egress-calls", "within-region calls",
                             intra, 8));
    rows.push_back(exact_row(5, "egress-calls",
                             "cross-continent calls (no OCE)", inter, 6));
    rows.push_back(exact_row(5, "egress-calls", "calls touching OCE", oce, 6));

    auto cost = costing::cost_epoch(c8, rep);
    double ext = 0.0;
    for (const auto& vm : cost.per_vm) {
      ext += vm.egress_external_usd_h;
    }
    ext /= static_cast<double>(cost.per_vm.size());
    rows.push_back(rel_row(6, "egress-costs",
                           "four-continent NLP external egress $/h per VM",
                           ext, 4.329, 0.25));
  }
  {
    Scenario aws = load_named("c8_nlp_aws");
    auto rep = protocol::simulate_epoch(aws);
    auto cost = costing::cost_epoch(aws, rep);
    double total = 0.0;
    for (const auto& vm : cost.per_vm) {
      total += vm.total_usd_h;
    }
    total /= static_cast<double>(cost.per_vm.size());
    rows.push_back(rel_row(6, "egress-costs",
                           "four-continent NLP total $/h per VM (AWS rates)",
                           total, 1.376, 0.25));
  }
  {
    Scenario d3 = load_named("d3_nlp");
    auto rep = protocol::simulate_epoch(d3);
    auto cost = costing::cost_epoch(d3, rep);
    double worst = 0.0;
    for (size_t i = 0; i < cost.per_vm.size(); ++i) {
      if (rep.peers[i].site->cloud == catalog::Cloud::AZURE) {
        worst = std::max(worst, cost.per_vm[i].egress_external_usd_h);
      }
    }
    rows.push_back(rel_row(6, "egress-costs",
                           "two-cloud NLP Azure external egress $/h per VM",
                           worst, 0.763, 0.25));
  }

  // --- 7: TCP throughput model on the measured wide-area paths. The probes
  // use bare 10 Gbit links so the explicit per-call ceiling is the only cap.
  {
    double window = RunConfig{}.tcp_window_bytes;
    netmodel::Link us{10.0, 150.80, std::nullopt};
    netmodel::Link a10{10.0, 159.05, std::nullopt};
    netmodel::Link eu{10.0, 16.73, std::nullopt};
    rows.push_back(band_row(
        7, "tcp-model", "single stream at 150.8 ms (Mbit)",
        netmodel::single_stream_gbit(us, window) * 1000.0, 50.0, 80.0));
    rows.push_back(band_row(
        7, "tcp-model", "single stream at 159.05 ms (Mbit)",
        netmodel::single_stream_gbit(a10, window) * 1000.0, 50.0, 80.0));
    rows.push_back(exact_row(
        7, "tcp-model", "80 streams under 6 Gbit ceiling",
        netmodel::aggregate_gbit(eu, 80, window, 6.0), 6.0));
    rows.push_back(exact_row(
        7, "tcp-model", "80 streams under 4 Gbit ceiling",
        netmodel::aggregate_gbit(us, 80, window, 4.0), 4.0));
  }

  // --- 8: placement-search selections on the three-offering catalog, plus
  // the published cost of the winning 8xT4 option.
  {
    const std::vector<FigOption> options = {
        {"DGX-2", {1, 0, 0}}, {"8xT4", {0, 8, 0}}, {"8xA10", {0, 0, 8}}};
    Scenario conv = load_named("fig1_conv");
    auto cheapest =
        optimizer::search(conv, Objective::MinUsdPerMillion, std::nullopt);
    auto fastest = optimizer::search(conv, Objective::MaxSps, std::nullopt);
    RefRow r = exact_row(8, "search-goldens", "CONV cheapest option is 8xT4",
                         winner_label(cheapest, options) == "8xT4" ? 1.0 : 0.0,
                         1.0);
    r.detail = "selected " + winner_label(cheapest, options);
    r.tolerance = "selection";
    rows.push_back(r);
    r = exact_row(8, "search-goldens", "CONV fastest option is 8xA10",
                  winner_label(fastest, options) == "8xA10" ? 1.0 : 0.0, 1.0);
    r.detail = "selected " + winner_label(fastest, options);
    r.tolerance = "selection";
    rows.push_back(r);

    if (cheapest.feasible) {
      const auto& best = cheapest.ranked.front();
      double vm_eg_per_1m = costing::usd_per_million_samples(
          best.cost.fleet_vm_usd_h + best.cost.fleet_egress_usd_h,
          best.epoch.sps_global);
      rows.push_back(rel_row(1, "cost-goldens", "8xT4 $/1M incl. egress",
                             vm_eg_per_1m, 1.77, 0.15));
    }

    Scenario rxlm = load_named("fig12_rxlm");
    auto nlp_cheapest =
        optimizer::search(rxlm, Objective::MinUsdPerMillion, std::nullopt);
    r = exact_row(8, "search-goldens", "RXLM cheapest option is DGX-2",
                  winner_label(nlp_cheapest, options) == "DGX-2" ? 1.0 : 0.0,
                  1.0);
    r.detail = "selected " + winner_label(nlp_cheapest, options);
    r.tolerance = "selection";
    rows.push_back(r);
  }

  return rows;
}

}  // namespace geospot::refsuite
