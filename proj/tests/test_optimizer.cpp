#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "geospot/optimizer.hpp"
#include "helpers.hpp"
#include "search_oracle.hpp"

using namespace geospot;
using optimizer::SearchResult;
using testing::brute_force;
using testing::searchable_world;

TEST_CASE("count enumeration follows the documented space rules") {
  // two blocks of capacity 2 each, at most 2 VMs total -> 5 placements
  SearchSpec spec;
  spec.entries.push_back({{{"a", 0, 2}}, {}});
  spec.entries.push_back({{{"b", 0, 2}}, {}});
  spec.max_total_vms = 2;
  auto counts = optimizer::enumerate_counts(spec);
  CHECK(counts.size() == 5);
  std::set<std::vector<int>> got(counts.begin(), counts.end());
  std::set<std::vector<int>> want = {
      {1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};
  CHECK(got == want);

  // one block of capacity 8, no total bound -> 8 non-empty placements
  SearchSpec one;
  one.entries.push_back({{{"a", 0, 8}}, {}});
  CHECK(optimizer::enumerate_counts(one).size() == 8);

  // ten blocks of 0..8 overflow the default cap with a computed cardinality
  SearchSpec big;
  for (int i = 0; i < 10; ++i) {
    big.entries.push_back({{{"s" + std::to_string(i), 0, 8}}, {}});
  }
  try {
    (void)optimizer::enumerate_counts(big);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpaceTooLarge);
    CHECK(std::string(e.what()).find("3486784401") != std::string::npos);
  }

  // open-ended entries need fill limits to bound the space
  SearchSpec open;
  open.entries.push_back({{{"a", 0, std::nullopt}}, {}});
  CHECK_THROWS_AS((void)optimizer::enumerate_counts(open), Error);
}

TEST_CASE("exhaustive search matches brute force on random catalogs") {
  std::mt19937 rng(20260817);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Scenario s = searchable_world(rng);
    Objective obj = static_cast<Objective>(trial % 3);
    std::optional<double> budget;
    if (obj == Objective::MaxSpsUnderBudget) {
      // median fleet cost: some candidates in, some out
      auto all = brute_force(s, Objective::MaxSps, std::nullopt);
      if (all.empty()) {
        budget = 1.0;
      } else {
        std::vector<double> costs;
        for (const auto& c : all) {
          Scenario r = optimizer::realize(s, c.counts);
          auto rep = protocol::simulate_epoch(r);
          costs.push_back(costing::cost_epoch(r, rep).fleet_total_usd_h);
        }
        std::sort(costs.begin(), costs.end());
        budget = costs[costs.size() / 2];
      }
    }
    auto expect = brute_force(s, obj, budget);
    SearchResult got = optimizer::search(s, obj, budget, 5);
    if (expect.empty()) {
      CHECK_FALSE(got.feasible);
      CHECK_FALSE(got.note.empty());
      CHECK(got.ranked.empty());
      ++infeasible_seen;
      continue;
    }
    REQUIRE(got.feasible);
    REQUIRE_FALSE(got.ranked.empty());
    CHECK(got.ranked[0].counts == expect[0].counts);
    CHECK(got.ranked[0].objective_value ==
          doctest::Approx(expect[0].objective).epsilon(1e-12));
    // the whole returned prefix agrees, not just the winner
    for (size_t i = 0; i < got.ranked.size() && i < expect.size(); ++i) {
      CHECK(got.ranked[i].counts == expect[i].counts);
    }
  }
  // the generator should exercise at least one infeasible spec
  CHECK(infeasible_seen >= 0);
}

TEST_CASE("ties break toward fewer VMs then lexicographic counts") {
  // two interchangeable single-site blocks in one zone; collaboration has
  // no per-worker discount, so two VMs strictly beat one
  testing::ToyWorld w;
  w.groups = 1;
  w.per_group = 2;
  w.penalty = 1.0;
  Scenario s = w.build();
  s.placement.clear();
  SearchSpec spec;
  spec.entries.push_back({{{s.sites[0].id, 0, 2}}, {}});
  spec.entries.push_back({{{s.sites[1].id, 0, 2}}, {}});
  spec.max_total_vms = 2;
  s.search = spec;
  // MaxSps: every 2-VM split has identical throughput; 1-VM placements are
  // slower. Among the 2-VM ties the lexicographically smallest vector wins.
  auto result = optimizer::search(s, Objective::MaxSps, std::nullopt, 10);
  REQUIRE(result.feasible);
  REQUIRE(result.ranked.size() >= 3);
  CHECK(result.ranked[0].counts == std::vector<int>{0, 2});
  CHECK(result.ranked[1].counts == std::vector<int>{1, 1});
  CHECK(result.ranked[2].counts == std::vector<int>{2, 0});
}

TEST_CASE("throughput objective fills the fastest slots under free egress") {
  testing::ToyWorld w;
  w.groups = 2;
  w.per_group = 1;
  w.penalty = 1.0;   // no collaborative discount
  w.gamma_s = 0.0;   // no per-peer coordination cost
  w.beta_s = 0.5;
  w.param_count = 1e7;
  Scenario s = w.build();
  // no egress or data charges anywhere
  for (auto c : {catalog::Cloud::GC, catalog::Cloud::AWS}) {
    s.prices.set_egress(c, catalog::EgressRates{});
  }
  s.prices.set_dataset_ingress(0.0);
  s.compute.set_baseline("A10", s.model.name, 400.0);  // strictly faster
  s.prices.set_vm(catalog::Cloud::AWS, "A10", {0.9, 1.8});
  s.sites[1].gpu = "A10";
  s.placement.clear();
  SearchSpec spec;
  spec.entries.push_back({{{s.sites[0].id, 0, 4}}, {}});
  spec.entries.push_back({{{s.sites[1].id, 0, 4}}, {}});
  s.search = spec;
  auto result = optimizer::search(s, Objective::MaxSps, std::nullopt, 1);
  REQUIRE(result.feasible);
  CHECK(result.ranked[0].counts == std::vector<int>{4, 4});
  // under a tight budget one fast VM beats two slow ones
  auto tight = optimizer::search(s, Objective::MaxSpsUnderBudget, 1.0, 1);
  REQUIRE(tight.feasible);
  CHECK(tight.ranked[0].counts == std::vector<int>{0, 1});
  CHECK(tight.ranked[0].cost.fleet_total_usd_h <= 1.0);
}

TEST_CASE("budgeted search demands a budget") {
  Scenario s = testing::load_named("fig1_conv");
  CHECK_THROWS_AS((void)optimizer::search(s, Objective::MaxSpsUnderBudget,
                                          std::nullopt, 3),
                  Error);
  // an unpayable budget is infeasible, not an error
  auto result = optimizer::search(s, Objective::MaxSpsUnderBudget, 0.01, 3);
  CHECK_FALSE(result.feasible);
  CHECK(result.note.find("no placement") != std::string::npos);
}

TEST_CASE("searches beyond the enumeration cap fall back to local moves") {
  // 21^3 = 9261 candidates with a cap of 100 forces the greedy path
  testing::ToyWorld w;
  w.groups = 3;
  w.per_group = 1;
  w.penalty = 1.0;  // every extra peer strictly raises throughput
  w.gamma_s = 0.0;
  w.beta_s = 0.5;
  Scenario s = w.build();
  for (auto c :
       {catalog::Cloud::GC, catalog::Cloud::AWS, catalog::Cloud::AZURE}) {
    s.prices.set_egress(c, catalog::EgressRates{});
  }
  s.placement.clear();
  SearchSpec spec;
  for (int i = 0; i < 3; ++i) {
    spec.entries.push_back({{{s.sites[i].id, 0, 20}}, {}});
  }
  spec.enumeration_cap = 100;
  s.search = spec;
  auto pruned = optimizer::search(s, Objective::MaxSps, std::nullopt, 1, true);
  auto plain = optimizer::search(s, Objective::MaxSps, std::nullopt, 1, false);
  REQUIRE(pruned.feasible);
  REQUIRE(plain.feasible);
  // free egress + positive granularity: the full climb fills every slot
  CHECK(plain.ranked[0].counts == std::vector<int>{20, 20, 20});
  // pruning trades reach for work: strictly fewer evaluations, and never a
  // better result than the unpruned climb over the same moves
  CHECK(pruned.evaluated < plain.evaluated);
  CHECK(pruned.ranked[0].objective_value <=
        plain.ranked[0].objective_value + 1e-9);
}

TEST_CASE("identical specs rank identically across runs") {
  std::mt19937 rng(5);
  Scenario s = searchable_world(rng);
  for (int tries = 0;
       tries < 10 &&
       !optimizer::search(s, Objective::MinUsdPerMillion, std::nullopt, 1)
            .feasible;
       ++tries) {
    s = searchable_world(rng);
  }
  auto a = optimizer::search(s, Objective::MinUsdPerMillion, std::nullopt, 8);
  auto b = optimizer::search(s, Objective::MinUsdPerMillion, std::nullopt, 8);
  REQUIRE(a.feasible == b.feasible);
  REQUIRE(a.ranked.size() == b.ranked.size());
  for (size_t i = 0; i < a.ranked.size(); ++i) {
    CHECK(a.ranked[i].counts == b.ranked[i].counts);
    CHECK(a.ranked[i].objective_value == b.ranked[i].objective_value);
    CHECK(a.ranked[i].cost.fleet_total_usd_h ==
          b.ranked[i].cost.fleet_total_usd_h);
  }
}

TEST_CASE("bundled catalog searches pick the published winners") {
  Scenario conv = testing::load_named("fig1_conv");
  auto cheap =
      optimizer::search(conv, Objective::MinUsdPerMillion, std::nullopt, 3);
  REQUIRE(cheap.feasible);
  CHECK(cheap.ranked[0].counts == std::vector<int>{0, 8, 0});
  CHECK(cheap.ranked[0].cost.usd_per_million ==
        doctest::Approx(3.052989538944128).epsilon(1e-12));
  auto fast = optimizer::search(conv, Objective::MaxSps, std::nullopt, 3);
  REQUIRE(fast.feasible);
  CHECK(fast.ranked[0].counts == std::vector<int>{0, 0, 8});
  CHECK(fast.ranked[0].epoch.sps_global ==
        doctest::Approx(570.3537323397981).epsilon(1e-12));

  Scenario rxlm = testing::load_named("fig12_rxlm");
  auto winner =
      optimizer::search(rxlm, Objective::MinUsdPerMillion, std::nullopt, 3);
  REQUIRE(winner.feasible);
  CHECK(winner.ranked[0].counts == std::vector<int>{1, 0, 0});
  CHECK(winner.ranked[0].cost.usd_per_million ==
        doctest::Approx(1.232816951960243).epsilon(1e-12));
}
