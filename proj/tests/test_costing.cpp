#include <algorithm>

#include "doctest.h"
#include "geospot/costing.hpp"
#include "helpers.hpp"

using namespace geospot;
using costing::CostReport;

namespace {

CostReport cost_named(const std::string& name) {
  Scenario s = testing::load_named(name);
  auto rep = protocol::simulate_epoch(s);
  return costing::cost_epoch(s, rep);
}

}  // namespace

TEST_CASE("dollars per million samples arithmetic") {
  using costing::usd_per_million_samples;
  CHECK(usd_per_million_samples(6.30, 413.0) ==
        doctest::Approx(4.237288135593221).epsilon(1e-12));
  CHECK(usd_per_million_samples(0.18, 80.0) ==
        doctest::Approx(0.625).epsilon(1e-12));
  CHECK(usd_per_million_samples(0.60, 185.0) ==
        doctest::Approx(0.900900900900901).epsilon(1e-12));
  CHECK(usd_per_million_samples(4.80, 620.6) ==
        doctest::Approx(2.1484584810398535).epsilon(1e-12));
  // the published price points sit within 1% of these
  CHECK(usd_per_million_samples(6.30, 413.0) ==
        doctest::Approx(4.24).epsilon(0.01));
  CHECK(usd_per_million_samples(0.18, 80.0) ==
        doctest::Approx(0.62).epsilon(0.01));
  CHECK(usd_per_million_samples(0.60, 185.0) ==
        doctest::Approx(0.90).epsilon(0.01));
  CHECK(usd_per_million_samples(4.80, 620.6) ==
        doctest::Approx(2.15).epsilon(0.01));
}

TEST_CASE("dataset loading cost follows the sample rate") {
  auto cv = cost_named("d1_cv");
  auto nlp = cost_named("d1_nlp");
  CHECK(cv.per_vm[0].data_usd_h ==
        doctest::Approx(0.14397425985601436).epsilon(1e-12));
  CHECK(nlp.per_vm[0].data_usd_h ==
        doctest::Approx(0.08297278633410406).epsilon(1e-12));
  // direct formula: sps * bytes/sample * $/GB, per hour
  CHECK(costing::dataload_usd_per_h(100.0, 1e5, 0.01) ==
        doctest::Approx(100.0 * 1e5 / 1e9 * 0.01 * 3600.0).epsilon(1e-12));
  CHECK(costing::dataload_usd_per_h(0.0, 1e5, 0.01) == 0.0);
}

TEST_CASE("one-zone fleet egress rate matches the reference") {
  auto report = cost_named("a8_cv");
  CHECK(report.fleet_egress_usd_h ==
        doctest::Approx(0.4012460315324552).epsilon(1e-12));
  CHECK(report.usd_per_million ==
        doctest::Approx(3.052989538944128).epsilon(1e-12));
  CHECK(report.fleet_vm_usd_h == doctest::Approx(8 * 0.18).epsilon(1e-12));
  CHECK(report.usd_per_million_vm_only <
        report.usd_per_million);  // egress and data come on top
}

TEST_CASE("four-continent egress bills match the references") {
  auto gc = cost_named("c8_nlp");
  double ext = 0.0;
  for (const auto& vm : gc.per_vm) {
    ext += vm.egress_external_usd_h;
  }
  CHECK(ext / 8.0 == doctest::Approx(4.032415783808226).epsilon(1e-12));

  auto aws = cost_named("c8_nlp_aws");
  double total = 0.0;
  for (const auto& vm : aws.per_vm) {
    total += vm.total_usd_h;
  }
  CHECK(total / 8.0 == doctest::Approx(1.1418480314465806).epsilon(1e-12));

  auto azure = cost_named("d3_nlp");
  double worst = 0.0;
  for (const auto& vm : azure.per_vm) {
    if (vm.site_id.rfind("az-", 0) == 0) {
      worst = std::max(worst, vm.egress_external_usd_h);
    }
  }
  CHECK(worst == doctest::Approx(0.7967712484698409).epsilon(1e-12));
}

TEST_CASE("per-class byte ledger separates internal from billed traffic") {
  Scenario s = testing::load_named("a8_cv");
  auto rep = protocol::simulate_epoch(s);
  auto report = costing::cost_epoch(s, rep);
  // 7 VMs share one site: their mutual chunks are internal and free
  const auto& first = report.per_vm[0];
  REQUIRE(first.egress_gb_by_class.count("internal") == 1);
  CHECK(first.egress_gb_by_class.count("inter_zone") == 1);
  // the zone-crossing VM pays for every peer it updates
  const auto& last = report.per_vm[7];
  CHECK(last.site_id == "gc-us-b");
  CHECK(last.egress_gb_by_class.count("inter_zone") == 1);
  CHECK(last.egress_usd_h > 0.0);
  // internal traffic never bills
  Scenario one_site = s;
  set_total_vms(one_site, 7);  // all VMs in the first entry's site
  auto rep7 = protocol::simulate_epoch(one_site);
  auto report7 = costing::cost_epoch(one_site, rep7);
  CHECK(report7.fleet_egress_usd_h == 0.0);
}

TEST_CASE("egress spending never drops when the payload grows") {
  // the bundled model suites ordered by gradient payload
  auto chain = [&](std::initializer_list<const char*> models) {
    Scenario base = testing::load_named("a8_cv");
    auto profiles = catalog::load_models(default_data_dir() + "/models.json");
    std::vector<double> rates;
    for (const char* m : models) {
      Scenario s = base;
      s.model = profiles.at(m);
      auto rep = protocol::simulate_epoch(s);
      rates.push_back(costing::cost_epoch(s, rep).fleet_egress_usd_h);
    }
    return rates;
  };
  auto cv = chain({"RN18", "RN50", "RN152", "WRN101", "CONV"});
  const double cv_ref[] = {0.088, 0.1177, 0.2265, 0.3666, 0.4012};
  for (size_t i = 0; i < cv.size(); ++i) {
    CHECK(cv[i] == doctest::Approx(cv_ref[i]).epsilon(1e-3));
    if (i) {
      CHECK(cv[i] >= cv[i - 1] - 1e-12);
    }
  }
  auto nlp = chain({"RBase", "RLrg", "RXLM"});
  const double nlp_ref[] = {0.9543, 1.7678, 2.1459};
  for (size_t i = 0; i < nlp.size(); ++i) {
    CHECK(nlp[i] == doctest::Approx(nlp_ref[i]).epsilon(1e-3));
    if (i) {
      CHECK(nlp[i] >= nlp[i - 1] - 1e-12);
    }
  }
}

TEST_CASE("cost components add up exactly") {
  for (const char* name : {"a8_cv", "c8_nlp", "d3_nlp", "lambda_rxlm_8"}) {
    auto report = cost_named(name);
    double vm = 0.0, egress = 0.0, data = 0.0, total = 0.0;
    for (const auto& v : report.per_vm) {
      CHECK(v.total_usd_h ==
            doctest::Approx(v.vm_usd_h + v.egress_usd_h + v.data_usd_h)
                .epsilon(1e-9));
      CHECK(v.egress_external_usd_h <= v.egress_usd_h + 1e-12);
      vm += v.vm_usd_h;
      egress += v.egress_usd_h;
      data += v.data_usd_h;
      total += v.total_usd_h;
    }
    CHECK(report.fleet_vm_usd_h == doctest::Approx(vm).epsilon(1e-9));
    CHECK(report.fleet_egress_usd_h == doctest::Approx(egress).epsilon(1e-9));
    CHECK(report.fleet_data_usd_h == doctest::Approx(data).epsilon(1e-9));
    CHECK(report.fleet_total_usd_h == doctest::Approx(total).epsilon(1e-9));
  }
}

TEST_CASE("per-million rate round-trips through the hourly burn") {
  for (const char* name : {"a8_cv", "c8_nlp", "lambda_rxlm_2"}) {
    Scenario s = testing::load_named(name);
    auto rep = protocol::simulate_epoch(s);
    auto report = costing::cost_epoch(s, rep);
    CHECK(report.usd_per_million * rep.sps_global * 3600.0 / 1e6 ==
          doctest::Approx(report.fleet_total_usd_h).epsilon(1e-9));
    CHECK(report.usd_per_million_vm_only * rep.sps_global * 3600.0 / 1e6 ==
          doctest::Approx(report.fleet_vm_usd_h).epsilon(1e-9));
  }
}

TEST_CASE("zero egress rates reduce the bill to rental plus data") {
  auto report = cost_named("lambda_rxlm_8");
  CHECK(report.fleet_egress_usd_h == 0.0);
  CHECK(report.fleet_total_usd_h ==
        doctest::Approx(report.fleet_vm_usd_h + report.fleet_data_usd_h)
            .epsilon(1e-12));
}

TEST_CASE("pricing mode switches the rental rate") {
  Scenario s = testing::load_named("a8_cv");
  auto rep = protocol::simulate_epoch(s);
  auto spot = costing::cost_epoch(s, rep, catalog::PricingMode::Spot);
  auto demand = costing::cost_epoch(s, rep, catalog::PricingMode::OnDemand);
  CHECK(spot.mode == catalog::PricingMode::Spot);
  CHECK(demand.mode == catalog::PricingMode::OnDemand);
  CHECK(spot.fleet_vm_usd_h == doctest::Approx(8 * 0.180));
  CHECK(demand.fleet_vm_usd_h == doctest::Approx(8 * 0.572));
  // egress and data are mode-independent
  CHECK(spot.fleet_egress_usd_h == doctest::Approx(demand.fleet_egress_usd_h));
  CHECK(spot.fleet_data_usd_h == doctest::Approx(demand.fleet_data_usd_h));
  // default mode comes from the scenario's run config
  auto def = costing::cost_epoch(s, rep);
  CHECK(def.mode == s.run.pricing_mode);
}
