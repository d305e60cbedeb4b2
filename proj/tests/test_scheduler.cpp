#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "laa/env.hpp"
#include "laa/rates.hpp"
#include "laa/scheduler.hpp"

using namespace laa;

namespace {

NetworkConfig tiny_cfg(int k, int l, int w, int s) {
  NetworkConfig cfg;
  cfg.num_sbs = k;
  cfg.licensed_subcarriers = l;
  cfg.unlicensed_subcarriers = w;
  cfg.users_per_sbs = s;
  return cfg;
}

// Random point pushed strictly inside the relaxed feasible set.
Eigen::VectorXd random_feasible(const SlotState& st, const NetworkConfig& cfg,
                                std::mt19937_64& rng) {
  const Dims d = st.dims;
  const VarLayout lay{d};
  Eigen::VectorXd z(lay.n());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < d.nc(); ++i) {
    z[lay.xc(i)] = u(rng);
    z[lay.pc(i)] = u(rng) * z[lay.xc(i)] * cfg.total_power_cap / (d.L * d.S);
  }
  for (int i = 0; i < d.nu(); ++i) {
    z[lay.xu(i)] = u(rng);
    z[lay.pu(i)] = u(rng) * z[lay.xu(i)] * cfg.unlicensed_power_cap / d.W;
  }
  return push_interior(z, st, cfg);
}

double direct_p3(const DcObjective& obj, const Eigen::VectorXd& z,
                 const SlotState& st, const QueueVector& q,
                 const NetworkConfig& cfg,
                 const std::vector<double>& success_probs) {
  const Dims d = st.dims;
  const VarLayout lay{d};
  double pc = d.K * cfg.static_power;
  for (int i = 0; i < d.nc(); ++i)
    pc += cfg.amplifier_coeff_licensed * z[lay.pc(i)];
  for (int i = 0; i < d.nu(); ++i)
    pc += cfg.amplifier_coeff_unlicensed * z[lay.pu(i)];
  double val = cfg.control_param * pc;
  for (int k = 0; k < d.K; ++k)
    for (int s = 0; s < d.S; ++s)
      val -= (q[d.user(k, s)] / cfg.queue_scale) *
             rate_in_objective_units(z, st, cfg, success_probs, k, s);
  return val + obj.mu * obj.penalty_residual(z);
}

bool allocation_valid(const Allocation& a, const SlotState& st,
                      const NetworkConfig& cfg, std::string* why = nullptr) {
  const Dims d = st.dims;
  const double lam = cfg.big_m_value();
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (double x : a.x_c)
    if (x != 0.0 && x != 1.0) return fail("x_c not binary");
  for (double x : a.x_u)
    if (x != 0.0 && x != 1.0) return fail("x_u not binary");
  for (int i = 0; i < d.nc(); ++i) {
    if (a.p_c[i] < 0.0) return fail("p_c negative");
    if (a.p_c[i] > a.x_c[i] * lam + 1e-12) return fail("coupling C6/C7");
  }
  for (int i = 0; i < d.nu(); ++i) {
    if (a.p_u[i] < 0.0) return fail("p_u negative");
    if (a.p_u[i] > a.x_u[i] * lam + 1e-12) return fail("coupling C6/C7");
  }
  for (int k = 0; k < d.K; ++k) {
    double su = 0.0, st_total = 0.0;
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) su += a.p_u[d.uidx(k, w, s)];
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s) st_total += a.p_c[d.cidx(k, l, s)];
    st_total += su;
    if (su > cfg.unlicensed_power_cap * (1.0 + 1e-12)) return fail("C3");
    if (st_total > cfg.total_power_cap * (1.0 + 1e-12)) return fail("C2");
    for (int l = 0; l < d.L; ++l) {
      int users = 0;
      for (int s = 0; s < d.S; ++s) users += a.x_c[d.cidx(k, l, s)] > 0.5;
      if (users > 1) return fail("C5 licensed");
    }
    for (int w = 0; w < d.W; ++w) {
      int users = 0;
      for (int s = 0; s < d.S; ++s) users += a.x_u[d.uidx(k, w, s)] > 0.5;
      if (users > 1) return fail("C5 unlicensed");
    }
  }
  for (int l = 0; l < d.L; ++l)
    if (cross_tier_interference(a, st, l) >
        cfg.interference_cap * (1.0 + 1e-12))
      return fail("C4");
  return true;
}

}  // namespace

TEST_CASE("lyapunov_value closed forms") {
  CHECK(lyapunov_value({}) == doctest::Approx(0.0));
  CHECK(lyapunov_value({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(lyapunov_value({3.0, 4.0}) == doctest::Approx(12.5));
  CHECK(lyapunov_value({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(2.0));
}

TEST_CASE("drift_plus_penalty closed forms") {
  CHECK(drift_plus_penalty(0.0, 100.0, {10.0}, {5.0}) == doctest::Approx(-50.0));
  CHECK(drift_plus_penalty(2.0, 30.0, {0.0}, {0.0}) == doctest::Approx(60.0));
  CHECK(drift_plus_penalty(10.0, 27.0, {4.0, 6.0}, {2.0, 3.0}) ==
        doctest::Approx(244.0));
}

TEST_CASE("bound_constant_C0") {
  CHECK(bound_constant_C0({0.0}, {0.0}, 1000) == doctest::Approx(0.0));
  CHECK(bound_constant_C0({4.0}, {16.0}, 2000) == doctest::Approx(10.0));
  CHECK_THROWS_AS(bound_constant_C0({1.0}, {1.0}, 999), std::invalid_argument);

  // Poisson(3), packet size 1: E[A^2] = 9 + 3
  std::mt19937_64 rng(8);
  std::poisson_distribution<int> pois(3.0);
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double a = pois(rng);
    sq += a * a;
  }
  CHECK(bound_constant_C0({sq / n}, {0.0}, n) ==
        doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("dc objective at the zero point is V * K * PC_static") {
  NetworkConfig cfg;
  EnvParams env;
  SlotState st = sample_slot(env, cfg, 0);
  QueueVector q(cfg.dims().n_users(), 2e6);
  std::vector<double> ps(cfg.dims().K, 0.05);
  DcObjective obj = build_dc_objective(st, q, cfg, ps);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(obj.layout.n());
  CHECK(obj.p3_value(zero) ==
        doctest::Approx(cfg.control_param * cfg.num_sbs * cfg.static_power)
            .epsilon(1e-10));
}

TEST_CASE("dc split identity f - g = V PC - sum Q~ R~ + mu sum(x - x^2)") {
  NetworkConfig cfg;
  EnvParams env;
  env.rng_seed = 5;
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    SlotState st = sample_slot(env, cfg, t);
    QueueVector q(cfg.dims().n_users());
    std::uniform_real_distribution<double> uq(0.0, 8e6);
    for (double& v : q) v = uq(rng);
    std::vector<double> ps(cfg.dims().K, 0.08);
    DcObjective obj = build_dc_objective(st, q, cfg, ps);
    Eigen::VectorXd z = random_feasible(st, cfg, rng);
    double split = obj.p3_value(z);
    double direct = direct_p3(obj, z, st, q, cfg, ps);
    CHECK(split == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("log-ratio identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    double s = u(rng), intf = u(rng), sigma = 0.5 + u(rng);
    double lhs = std::log2(s + intf + sigma) - std::log2(intf + sigma);
    double rhs = std::log2(1.0 + s / (intf + sigma));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("gradient of g matches central finite differences") {
  NetworkConfig cfg = tiny_cfg(2, 2, 2, 2);
  EnvParams env;
  env.rng_seed = 77;
  SlotState st = sample_slot(env, cfg, 1);
  QueueVector q(cfg.dims().n_users(), 3e6);
  std::vector<double> ps(cfg.dims().K, 0.07);
  DcObjective obj = build_dc_objective(st, q, cfg, ps);
  std::mt19937_64 rng(23);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd z = random_feasible(st, cfg, rng);
    Eigen::VectorXd grad = obj.grad_g(z);
    for (int i = 0; i < z.size(); i += 7) {  // spot-check a spread of coords
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      double fd = (obj.g.value(zp) - obj.g.value(zm)) / (2.0 * h);
      CHECK(std::abs(grad[i] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("f and g pass midpoint convexity probes") {
  NetworkConfig cfg;
  EnvParams env;
  SlotState st = sample_slot(env, cfg, 4);
  QueueVector q(cfg.dims().n_users(), 5e6);
  std::vector<double> ps(cfg.dims().K, 0.06);
  DcObjective obj = build_dc_objective(st, q, cfg, ps);
  CHECK(obj.f.is_convex_form());
  CHECK(obj.g.is_convex_form());
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd a = random_feasible(st, cfg, rng);
    Eigen::VectorXd b = random_feasible(st, cfg, rng);
    Eigen::VectorXd mid = 0.5 * (a + b);
    CHECK(obj.f.value(mid) <=
          0.5 * (obj.f.value(a) + obj.f.value(b)) + 1e-9);
    CHECK(obj.g.value(mid) <=
          0.5 * (obj.g.value(a) + obj.g.value(b)) + 1e-9);
  }
}

TEST_CASE("sca_step is a no-op at its own fixed point") {
  NetworkConfig cfg = tiny_cfg(1, 1, 1, 1);
  EnvParams env;
  SlotState st = sample_slot(env, cfg, 2);
  QueueVector q{4e6};
  std::vector<double> ps{0.08};
  ScaSettings settings;
  DcObjective obj = build_dc_objective(st, q, cfg, ps);
  ConvexProblem pb = build_relaxed_constraints(st, cfg);
  Eigen::VectorXd z = sca_initial_point(st, q, cfg);
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd z_new = sca_step(obj, z, pb, settings);
    if (std::abs(obj.p3_value(z_new) - obj.p3_value(z)) <=
        1e-9 * (1.0 + std::abs(obj.p3_value(z))))
      break;
    z = std::move(z_new);
  }
  Eigen::VectorXd again = sca_step(obj, z, pb, settings);
  CHECK(std::abs(obj.p3_value(again) - obj.p3_value(z)) <=
        1e-6 * (1.0 + std::abs(obj.p3_value(z))));
}

TEST_CASE("true objective is non-increasing across sca steps") {
  NetworkConfig cfg;
  EnvParams env;
  env.rng_seed = 6;
  ScaSettings settings;
  for (int t = 0; t < 5; ++t) {
    SlotState st = sample_slot(env, cfg, t);
    QueueVector q(cfg.dims().n_users(), 4e6);
    std::vector<double> ps = slot_success_probs(st, cfg);
    DcObjective obj = build_dc_objective(st, q, cfg, ps);
    ConvexProblem pb = build_relaxed_constraints(st, cfg);
    Eigen::VectorXd z = sca_initial_point(st, q, cfg);
    double prev = obj.p3_value(z);
    for (int i = 0; i < 15; ++i) {
      z = sca_step(obj, z, pb, settings);
      double val = obj.p3_value(z);
      CHECK(val <= prev + 1e-8 * (1.0 + std::abs(prev)));
      prev = val;
    }
  }
}

TEST_CASE("backpressure regime saturates the power caps") {
  // V = 0 with a large queue: the objective is monotone decreasing in power.
  NetworkConfig cfg = tiny_cfg(1, 1, 1, 1);
  cfg.control_param = 0.0;
  EnvParams env;
  env.wifi_count_model.kind = WifiCountModel::Fixed;
  env.wifi_count_model.fixed_n = 2;
  SlotState st = sample_slot(env, cfg, 9);
  QueueVector q{5e7};
  ScaSettings settings;
  std::vector<double> ps = slot_success_probs(st, cfg);
  Allocation a = decide_allocation(st, q, cfg, settings, ps);
  double p_u_sum = a.p_u[0];
  double total = a.p_c[0] + a.p_u[0];
  CHECK(p_u_sum == doctest::Approx(cfg.unlicensed_power_cap).epsilon(0.01));
  CHECK(total == doctest::Approx(cfg.total_power_cap).epsilon(0.01));
}

TEST_CASE("zero queues give the zero allocation") {
  NetworkConfig cfg;
  EnvParams env;
  SlotState st = sample_slot(env, cfg, 3);
  QueueVector q(cfg.dims().n_users(), 0.0);
  ScaSettings settings;
  Allocation a = decide_allocation(st, q, cfg, settings);
  for (double v : a.p_c) CHECK(v == 0.0);
  for (double v : a.p_u) CHECK(v == 0.0);
  for (double v : a.x_c) CHECK(v == 0.0);
  for (double v : a.x_u) CHECK(v == 0.0);
}

TEST_CASE("decide_allocation output satisfies C2-C7 on random slots") {
  // Multi-user instance so C5 is non-trivial; modest size to keep it fast.
  NetworkConfig cfg = tiny_cfg(2, 2, 2, 2);
  EnvParams env;
  env.rng_seed = 12;
  ScaSettings settings;
  settings.restart_count = 1;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uq(0.0, 1e7);
  for (int t = 0; t < 150; ++t) {
    SlotState st = sample_slot(env, cfg, t);
    QueueVector q(cfg.dims().n_users());
    for (double& v : q) v = uq(rng);
    std::vector<double> ps = slot_success_probs(st, cfg);
    Allocation a = decide_allocation(st, q, cfg, settings, ps);
    std::string why;
    bool ok = allocation_valid(a, st, cfg, &why);
    CAPTURE(t);
    CAPTURE(why);
    CHECK(ok);
  }
}

TEST_CASE("decide_allocation is deterministic") {
  NetworkConfig cfg;
  EnvParams env;
  SlotState st = sample_slot(env, cfg, 21);
  QueueVector q(cfg.dims().n_users(), 3.3e6);
  ScaSettings settings;
  std::vector<double> ps = slot_success_probs(st, cfg);
  Allocation a = decide_allocation(st, q, cfg, settings, ps);
  Allocation b = decide_allocation(st, q, cfg, settings, ps);
  CHECK(a.p_c == b.p_c);
  CHECK(a.p_u == b.p_u);
  CHECK(a.x_c == b.x_c);
  CHECK(a.x_u == b.x_u);
}
