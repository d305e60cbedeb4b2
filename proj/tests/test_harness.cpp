#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "laa/harness.hpp"

using namespace laa;

namespace {

RunConfig quick_cfg() {
  RunConfig cfg;
  cfg.net.noise_power = 1e-3;
  cfg.sca.restart_count = 1;
  return cfg;
}

}  // namespace

TEST_CASE("zero-power policy: queue growth and constant power") {
  RunConfig cfg = quick_cfg();
  const int users = cfg.net.dims().n_users();
  RunMetrics m = run_episode(cfg, PolicyId::zero_power(), 100);
  CHECK(m.avg_power ==
        doctest::Approx(cfg.net.num_sbs * cfg.net.static_power));
  // backlog after t slots is the arrival sum; time average ~ lambda*T/2
  double expect = cfg.env.arrival_rate * users * 101.0 / 2.0;
  CHECK(m.avg_queue == doctest::Approx(expect).epsilon(0.15));
  CHECK(m.avg_rate == doctest::Approx(0.0));
}

TEST_CASE("zero arrivals: empty queues, static power only") {
  RunConfig cfg = quick_cfg();
  cfg.env.arrival_rate = 0.0;
  RunMetrics m = run_episode(cfg, PolicyId::proposed(5.0), 100);
  CHECK(m.avg_queue == doctest::Approx(0.0));
  CHECK(m.avg_delay == doctest::Approx(0.0));
  CHECK(m.avg_power ==
        doctest::Approx(cfg.net.num_sbs * cfg.net.static_power));
}

TEST_CASE("averages equal the series means exactly") {
  RunConfig cfg = quick_cfg();
  RunMetrics m = run_episode(cfg, PolicyId::proposed(5.0), 120);
  REQUIRE(m.series.size() == 120);
  double p = 0.0, r = 0.0, q = 0.0;
  for (const SlotRecord& rec : m.series) {
    p += rec.pc_tot;
    r += rec.r_tot;
    q += rec.sum_q;
  }
  CHECK(m.avg_power == doctest::Approx(p / 120.0).epsilon(1e-12));
  CHECK(m.avg_rate == doctest::Approx(r / 120.0).epsilon(1e-12));
  CHECK(m.avg_queue == doctest::Approx(q / 120.0).epsilon(1e-12));
  CHECK(m.avg_delay ==
        doctest::Approx(m.avg_queue / m.avg_arrival).epsilon(1e-12));
  CHECK(m.avg_delay >= 0.0);
}

TEST_CASE("runs are reproducible") {
  RunConfig cfg = quick_cfg();
  RunMetrics a = run_episode(cfg, PolicyId::proposed(5.0), 60);
  RunMetrics b = run_episode(cfg, PolicyId::proposed(5.0), 60);
  CHECK(a.avg_power == b.avg_power);
  CHECK(a.avg_queue == b.avg_queue);
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    CHECK(a.series[i].pc_tot == b.series[i].pc_tot);
    CHECK(a.series[i].sum_q == b.series[i].sum_q);
  }
}

TEST_CASE("single-V sweep equals the underlying run") {
  RunConfig cfg = quick_cfg();
  TradeoffTable t = sweep_V(cfg, {5.0}, 80);
  REQUIRE(t.rows.size() == 1);
  RunMetrics m = run_episode(cfg, PolicyId::proposed(5.0), 80);
  CHECK(t.rows[0].v == doctest::Approx(5.0));
  CHECK(t.rows[0].avg_power == doctest::Approx(m.avg_power));
  CHECK(t.rows[0].avg_delay == doctest::Approx(m.avg_delay));
  CHECK(t.rows[0].avg_queue == doctest::Approx(m.avg_queue));
}

TEST_CASE("parallel and sequential sweeps agree") {
  RunConfig cfg = quick_cfg();
  TradeoffTable a = sweep_V(cfg, {2.0, 10.0}, 40, true);
  TradeoffTable b = sweep_V(cfg, {2.0, 10.0}, 40, false);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].avg_power == b.rows[i].avg_power);
    CHECK(a.rows[i].avg_queue == b.rows[i].avg_queue);
  }
}

TEST_CASE("comparing the proposed policy against itself is a tie") {
  RunConfig cfg = quick_cfg();
  ComparisonReport rep =
      compare_policies(cfg, {5.0}, 60, true, PolicyId::proposed(5.0));
  REQUIRE(rep.matched);
  CHECK(rep.matched_v == doctest::Approx(5.0));
  CHECK(rep.power_ratio == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(rep.dominance_vs.size() == 1);  // the whole (single-V) sweep
  CHECK(rep.dominance_vs[0] == doctest::Approx(5.0));
}

TEST_CASE("unstable baseline yields no matched-delay point") {
  // Proposed-vs-ZeroPower: the baseline's delay diverges far above any
  // stable sweep row and the sweep cannot bracket it.
  RunConfig cfg = quick_cfg();
  ComparisonReport rep =
      compare_policies(cfg, {2.0, 5.0}, 150, true, PolicyId::zero_power());
  CHECK_FALSE(rep.matched);
  CHECK(rep.pcmps.avg_delay > rep.proposed.rows.back().avg_delay);
}

TEST_CASE("episode length must be positive and V list non-empty") {
  RunConfig cfg = quick_cfg();
  CHECK_THROWS_AS(run_episode(cfg, PolicyId::zero_power(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_V(cfg, {}, 10), std::invalid_argument);
}

TEST_CASE("csv and json artifacts are well-formed") {
  RunConfig cfg = quick_cfg();
  RunMetrics m = run_episode(cfg, PolicyId::zero_power(), 100,
                             std::string("harness_trace_test.csv"));
  write_series_csv("harness_series_test.csv", m, 5.0);

  std::ifstream series("harness_series_test.csv");
  REQUIRE(series.good());
  std::string header;
  std::getline(series, header);
  CHECK(header == "t,V,pc_tot_w,rate_bps,sum_queue_bits");
  int rows = 0;
  for (std::string line; std::getline(series, line);) ++rows;
  CHECK(rows == 100);

  std::ifstream trace("harness_trace_test.csv");
  REQUIRE(trace.good());
  std::getline(trace, header);
  CHECK(header == "t,user,queue_bits,arrival_bits,service_bits");
  rows = 0;
  for (std::string line; std::getline(trace, line);) ++rows;
  CHECK(rows == 100 * cfg.net.dims().n_users());

  nlohmann::json j = nlohmann::json::parse(run_json(m));
  CHECK(j["avg_power_w"].get<double>() == doctest::Approx(m.avg_power));
  CHECK(j["slots"].get<int>() == 100);

  TradeoffTable t = sweep_V(cfg, {5.0}, 100);
  write_tradeoff_csv("harness_tradeoff_test.csv", t);
  std::ifstream tro("harness_tradeoff_test.csv");
  REQUIRE(tro.good());
  std::getline(tro, header);
  rows = 0;
  for (std::string line; std::getline(tro, line);) ++rows;
  CHECK(rows == 1);
  nlohmann::json tj = nlohmann::json::parse(tradeoff_json(t));
  CHECK(tj["rows"].size() == 1);

  std::remove("harness_trace_test.csv");
  std::remove("harness_series_test.csv");
  std::remove("harness_tradeoff_test.csv");
}

TEST_CASE("c0 estimate appears for runs of at least 1000 slots") {
  RunConfig cfg = quick_cfg();
  RunMetrics short_run = run_episode(cfg, PolicyId::zero_power(), 200);
  CHECK(short_run.c0_estimate == doctest::Approx(0.0));
  RunMetrics long_run = run_episode(cfg, PolicyId::zero_power(), 1000);
  // R = 0, so C0 = 0.5 * sum E[A^2]; A ~ packet * Poisson(1.25):
  // E[A^2] = packet^2 (lambda + lambda^2)
  double per_user = 1e12 * (1.25 + 1.25 * 1.25);
  CHECK(long_run.c0_estimate ==
        doctest::Approx(0.5 * per_user * cfg.net.dims().n_users())
            .epsilon(0.1));
}
