#include <random>

#include "doctest.h"
#include "geospot/analytics.hpp"
#include "helpers.hpp"

using namespace geospot;

TEST_CASE("granularity is the compute-to-communication ratio") {
  Scenario s = testing::load_named("a8_nlp");
  auto rep = protocol::simulate_epoch(s);
  auto g = analytics::granularity(rep);
  REQUIRE(g.has_value());
  CHECK(*g == doctest::Approx(1.0521271945417896).epsilon(1e-12));
  CHECK(*g == doctest::Approx(rep.t_calc_s / rep.t_comm_s));

  // a 2xA10 CONV epoch is strongly compute-bound
  Scenario l2 = testing::load_named("lambda_conv_2");
  auto rep2 = protocol::simulate_epoch(l2);
  CHECK(*analytics::granularity(rep2) == doctest::Approx(21.6).epsilon(0.20));
}

TEST_CASE("single-peer epochs have no granularity or asymptote") {
  Scenario s = testing::load_named("a8_cv");
  set_total_vms(s, 1);
  auto rep = protocol::simulate_epoch(s);
  REQUIRE(rep.n_peers == 1);
  CHECK_FALSE(analytics::granularity(rep).has_value());
  CHECK_FALSE(analytics::granularity_incl_wait(rep).has_value());

  // no fixed part at all -> unbounded -> no asymptote
  testing::ToyWorld w;
  w.groups = 1;
  w.per_group = 1;
  w.floor_s = 0.0;
  auto solo = protocol::simulate_epoch(w.build());
  CHECK_FALSE(analytics::asymptotic_sps(solo).has_value());
}

TEST_CASE("wait-inclusive granularity charges the floor to communication") {
  testing::ToyWorld w;
  w.baseline_sps = 20000.0;  // guarantee a floor-bound epoch
  Scenario s = w.build();
  auto rep = protocol::simulate_epoch(s);
  REQUIRE(rep.t_wait_s > 0.0);
  auto strict = analytics::granularity(rep);
  auto incl = analytics::granularity_incl_wait(rep);
  REQUIRE(strict.has_value());
  REQUIRE(incl.has_value());
  CHECK(*incl < *strict);
  CHECK(*incl ==
        doctest::Approx(rep.t_calc_s / (rep.t_comm_s + rep.t_wait_s)));
}

TEST_CASE("asymptote equals throughput with compute removed") {
  Scenario s = testing::load_named("a8_cv");
  auto rep = protocol::simulate_epoch(s);
  auto cap = analytics::asymptotic_sps(rep);
  REQUIRE(cap.has_value());
  CHECK(*cap == doctest::Approx(rep.tbs / (rep.t_comm_s + rep.t_wait_s)));
  CHECK(*cap > rep.sps_global);
}

TEST_CASE("scaling projection interpolates between 1 and the factor") {
  CHECK(analytics::project_scaling(1.0, 2.0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(analytics::project_scaling(10.0, 2.0) ==
        doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK(analytics::project_scaling(5.0, 1.0) == doctest::Approx(1.0));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> gdist(1e-6, 1e6), fdist(1.0, 16.0);
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    double g = gdist(rng), f = fdist(rng);
    double p = analytics::project_scaling(g, f);
    CHECK(p > 1.0 - 1e-12);
    CHECK(p <= f + 1e-12);
  }
  // strictly increasing in granularity at fixed factor
  prev = analytics::project_scaling(1e-6, 2.0);
  for (double g = 1e-3; g < 1e6; g *= 10.0) {
    double p = analytics::project_scaling(g, 2.0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("granularity ignores the unit of time") {
  Scenario s = testing::load_named("a8_nlp");
  auto rep = protocol::simulate_epoch(s);
  auto g1 = analytics::granularity(rep);
  protocol::EpochReport scaled = rep;
  scaled.t_calc_s *= 1000.0;
  scaled.t_comm_s *= 1000.0;
  scaled.t_wait_s *= 1000.0;
  scaled.epoch_time_s *= 1000.0;
  auto g2 = analytics::granularity(scaled);
  REQUIRE(g1.has_value());
  REQUIRE(g2.has_value());
  CHECK(*g1 == doctest::Approx(*g2).epsilon(1e-15));
}

TEST_CASE("speedup composes back into the global throughput") {
  std::mt19937 rng(23);
  for (int i = 0; i < 120; ++i) {
    Scenario s = testing::random_world(rng);
    auto rep = protocol::simulate_epoch(s);
    double base = s.compute.baseline_sps(rep.peers[0].site->gpu, s.model.name);
    double su = analytics::speedup(rep.sps_global, base);
    CHECK(base * su == doctest::Approx(rep.sps_global).epsilon(1e-12));
  }
}

TEST_CASE("granularity grows strictly with the batch size") {
  Scenario s = testing::load_named("a8_cv");
  double prev = 0.0;
  for (double tbs : {4096.0, 8192.0, 16384.0, 32768.0, 65536.0}) {
    Scenario v = s;
    v.run.tbs = tbs;
    auto rep = protocol::simulate_epoch(v);
    REQUIRE(rep.t_wait_s == 0.0);
    auto g = analytics::granularity(rep);
    REQUIRE(g.has_value());
    CHECK(*g > prev);
    prev = *g;
  }
}

TEST_CASE("analyze produces one self-consistent sweep row") {
  Scenario s = testing::load_named("a8_cv");
  auto rep = protocol::simulate_epoch(s);
  auto point = analytics::analyze(s, rep);
  CHECK(point.scenario_id == "a8_cv");
  CHECK(point.n_gpus == 8);
  CHECK(point.tbs == 32768.0);
  CHECK(point.sps == doctest::Approx(rep.sps_global));
  CHECK(point.speedup == doctest::Approx(rep.sps_global / 80.0));
  CHECK(point.per_gpu == doctest::Approx(point.speedup / 8.0));
  REQUIRE(point.granularity.has_value());
  CHECK(*point.granularity ==
        doctest::Approx(rep.t_calc_s / rep.t_comm_s));
}
