#include "laa/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "laa/csma.hpp"
#include "laa/rates.hpp"

namespace laa {

namespace {
constexpr double kEpsX = 1e-4;   // strict-interior margin for x
constexpr double kEpsP = 1e-9;   // strict-interior floor for p, watts
constexpr double kFixDelta = 1e-6;  // half-width of the x box after rounding
const double kLn2 = std::numbers::ln2_v<double>;
}  // namespace

Eigen::VectorXd VarLayout::pack(const Allocation& a) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n());
  for (int i = 0; i < d.nc(); ++i) {
    z[pc(i)] = a.p_c[i];
    z[xc(i)] = a.x_c[i];
  }
  for (int i = 0; i < d.nu(); ++i) {
    z[pu(i)] = a.p_u[i];
    z[xu(i)] = a.x_u[i];
  }
  return z;
}

Allocation VarLayout::unpack(const Eigen::VectorXd& z) const {
  Allocation a = Allocation::zeros(d);
  for (int i = 0; i < d.nc(); ++i) {
    a.p_c[i] = z[pc(i)];
    a.x_c[i] = z[xc(i)];
  }
  for (int i = 0; i < d.nu(); ++i) {
    a.p_u[i] = z[pu(i)];
    a.x_u[i] = z[xu(i)];
  }
  return a;
}

double DcObjective::penalty_residual(const Eigen::VectorXd& z) const {
  const Dims& d = layout.d;
  double r = 0.0;
  for (int i = 0; i < d.nc(); ++i) {
    double x = z[layout.xc(i)];
    r += x - x * x;
  }
  for (int i = 0; i < d.nu(); ++i) {
    double x = z[layout.xu(i)];
    r += x - x * x;
  }
  return r;
}

Eigen::VectorXd DcObjective::grad_g(const Eigen::VectorXd& z) const {
  Eigen::VectorXd gg = Eigen::VectorXd::Zero(layout.n());
  g.add_gradient(z, gg);
  return gg;
}

double lyapunov_value(const QueueVector& q) {
  double s = 0.0;
  for (double v : q) s += v * v;
  return 0.5 * s;
}

double drift_plus_penalty(double v, double pc_tot, const QueueVector& q,
                          const std::vector<double>& r_bits) {
  double obj = v * pc_tot;
  for (std::size_t i = 0; i < q.size(); ++i) obj -= q[i] * r_bits[i];
  return obj;
}

double bound_constant_C0(const std::vector<double>& arrival_sq_mean,
                         const std::vector<double>& service_sq_mean,
                         std::size_t n_samples) {
  if (n_samples < 1000)
    throw std::invalid_argument("bound_constant_C0: need >= 1000 slot samples");
  double c = 0.0;
  for (double a : arrival_sq_mean) c += a;
  for (double r : service_sq_mean) c += r;
  return 0.5 * c;
}

namespace {

// Affine form of the licensed log arguments, in watts.
// total row: own-link power plus every other SBS's power on subcarrier l,
// weighted by the gain toward user (k,s). intf row: the same without the
// own-link entry.
SparseRow licensed_row(const SlotState& st, const VarLayout& lay, int k, int l,
                       int s, bool include_own) {
  const Dims& d = lay.d;
  SparseRow row;
  if (include_own)
    row.add(lay.pc(d.cidx(k, l, s)),
            st.gains_licensed[d.lic_gain_idx(k, l, k, s)]);
  for (int j = 0; j < d.K; ++j) {
    if (j == k) continue;
    double g_jk = st.gains_licensed[d.lic_gain_idx(j, l, k, s)];
    for (int sj = 0; sj < d.S; ++sj)
      row.add(lay.pc(d.cidx(j, l, sj)), g_jk);
  }
  return row;
}

}  // namespace

DcObjective build_dc_objective(const SlotState& state, const QueueVector& q,
                               const NetworkConfig& cfg,
                               const std::vector<double>& success_probs,
                               double mu_override) {
  const Dims d = state.dims;
  DcObjective obj;
  obj.layout = VarLayout{d};
  obj.v = cfg.control_param;
  obj.mu = mu_override > 0.0 ? mu_override : cfg.dc_penalty_value();
  obj.rate_unit = cfg.subcarrier_bandwidth * cfg.slot_length / cfg.queue_scale;

  const int n = obj.layout.n();
  obj.f = SmoothFn(n);
  obj.g = SmoothFn(n);
  obj.f.lin = Eigen::VectorXd::Zero(n);
  obj.g.quad_diag = Eigen::VectorXd::Zero(n);
  obj.f.constant = obj.v * d.K * cfg.static_power;

  for (int i = 0; i < d.nc(); ++i) {
    obj.f.lin[obj.layout.pc(i)] = obj.v * cfg.amplifier_coeff_licensed;
    obj.f.lin[obj.layout.xc(i)] = obj.mu;
    obj.g.quad_diag[obj.layout.xc(i)] = obj.mu;
  }
  for (int i = 0; i < d.nu(); ++i) {
    obj.f.lin[obj.layout.pu(i)] = obj.v * cfg.amplifier_coeff_unlicensed;
    obj.f.lin[obj.layout.xu(i)] = obj.mu;
    obj.g.quad_diag[obj.layout.xu(i)] = obj.mu;
  }

  for (int k = 0; k < d.K; ++k) {
    for (int s = 0; s < d.S; ++s) {
      double q_scaled = q[d.user(k, s)] / cfg.queue_scale;
      if (q_scaled <= 0.0) continue;
      double coef = -q_scaled * obj.rate_unit / kLn2;
      for (int l = 0; l < d.L; ++l) {
        LogTerm total;
        total.coef = coef;
        total.a = licensed_row(state, obj.layout, k, l, s, true);
        total.b = cfg.noise_power;
        obj.f.logs.push_back(std::move(total));

        LogTerm intf;
        intf.coef = coef;
        intf.a = licensed_row(state, obj.layout, k, l, s, false);
        intf.b = cfg.noise_power;
        obj.g.logs.push_back(std::move(intf));
      }
      for (int w = 0; w < d.W; ++w) {
        double p_suc = success_probs[k];
        if (p_suc <= 0.0) continue;
        LogTerm unl;
        unl.coef = coef * p_suc;
        unl.a.add(obj.layout.pu(d.uidx(k, w, s)),
                  state.gains_unlicensed[d.uidx(k, w, s)] / cfg.noise_power);
        unl.b = 1.0;
        obj.f.logs.push_back(std::move(unl));
      }
    }
  }
  return obj;
}

ConvexProblem build_relaxed_constraints(const SlotState& state,
                                        const NetworkConfig& cfg) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  const double big_m = cfg.big_m_value();

  ConvexProblem pb;
  pb.n = lay.n();

  // p >= 0 and big-M coupling p <= x Lambda
  auto coupling = [&](int p_var, int x_var) {
    SparseRow nonneg;
    nonneg.add(p_var, -1.0);
    pb.add_row(std::move(nonneg), 0.0);
    SparseRow couple;
    couple.add(p_var, 1.0);
    couple.add(x_var, -big_m);
    pb.add_row(std::move(couple), 0.0);
  };
  for (int i = 0; i < d.nc(); ++i) coupling(lay.pc(i), lay.xc(i));
  for (int i = 0; i < d.nu(); ++i) coupling(lay.pu(i), lay.xu(i));

  for (int i = 0; i < d.nc(); ++i) pb.add_box(lay.xc(i), 0.0, 1.0);
  for (int i = 0; i < d.nu(); ++i) pb.add_box(lay.xu(i), 0.0, 1.0);

  // C2 / C3 per SBS
  for (int k = 0; k < d.K; ++k) {
    SparseRow total;
    SparseRow unl;
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s) total.add(lay.pc(d.cidx(k, l, s)), 1.0);
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) {
        total.add(lay.pu(d.uidx(k, w, s)), 1.0);
        unl.add(lay.pu(d.uidx(k, w, s)), 1.0);
      }
    pb.add_row(std::move(total), cfg.total_power_cap);
    pb.add_row(std::move(unl), cfg.unlicensed_power_cap);
  }

  // C4 per licensed subcarrier
  for (int l = 0; l < d.L; ++l) {
    SparseRow row;
    for (int k = 0; k < d.K; ++k) {
      double g = state.gains_macro[d.macro_gain_idx(k, l)];
      for (int s = 0; s < d.S; ++s) row.add(lay.pc(d.cidx(k, l, s)), g);
    }
    pb.add_row(std::move(row), cfg.interference_cap);
  }

  // C5 per subcarrier
  if (d.S > 1) {
    for (int k = 0; k < d.K; ++k) {
      for (int l = 0; l < d.L; ++l) {
        SparseRow row;
        for (int s = 0; s < d.S; ++s) row.add(lay.xc(d.cidx(k, l, s)), 1.0);
        pb.add_row(std::move(row), 1.0);
      }
      for (int w = 0; w < d.W; ++w) {
        SparseRow row;
        for (int s = 0; s < d.S; ++s) row.add(lay.xu(d.uidx(k, w, s)), 1.0);
        pb.add_row(std::move(row), 1.0);
      }
    }
  }
  return pb;
}

namespace {

// Clamp powers into the strict interior given the current x entries.
void interior_powers(Eigen::VectorXd& z, const SlotState& state,
                     const NetworkConfig& cfg) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  const double big_m = cfg.big_m_value();
  for (int i = 0; i < d.nc(); ++i) {
    double hi = 0.99 * z[lay.xc(i)] * big_m;
    z[lay.pc(i)] = std::clamp(z[lay.pc(i)], kEpsP, std::max(hi, 2.0 * kEpsP));
  }
  for (int i = 0; i < d.nu(); ++i) {
    double hi = 0.99 * z[lay.xu(i)] * big_m;
    z[lay.pu(i)] = std::clamp(z[lay.pu(i)], kEpsP, std::max(hi, 2.0 * kEpsP));
  }
  for (int k = 0; k < d.K; ++k) {
    double su = 0.0;
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) su += z[lay.pu(d.uidx(k, w, s))];
    if (su > 0.99 * cfg.unlicensed_power_cap) {
      double f = 0.99 * cfg.unlicensed_power_cap / su;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) z[lay.pu(d.uidx(k, w, s))] *= f;
    }
    double st = 0.0;
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s) st += z[lay.pc(d.cidx(k, l, s))];
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) st += z[lay.pu(d.uidx(k, w, s))];
    if (st > 0.99 * cfg.total_power_cap) {
      double f = 0.99 * cfg.total_power_cap / st;
      for (int l = 0; l < d.L; ++l)
        for (int s = 0; s < d.S; ++s) z[lay.pc(d.cidx(k, l, s))] *= f;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) z[lay.pu(d.uidx(k, w, s))] *= f;
    }
  }
  for (int l = 0; l < d.L; ++l) {
    double intf = 0.0;
    for (int k = 0; k < d.K; ++k) {
      double g = state.gains_macro[d.macro_gain_idx(k, l)];
      for (int s = 0; s < d.S; ++s) intf += z[lay.pc(d.cidx(k, l, s))] * g;
    }
    if (intf > 0.99 * cfg.interference_cap) {
      double f = 0.99 * cfg.interference_cap / intf;
      for (int k = 0; k < d.K; ++k)
        for (int s = 0; s < d.S; ++s) z[lay.pc(d.cidx(k, l, s))] *= f;
    }
  }
}

}  // namespace

Eigen::VectorXd push_interior(const Eigen::VectorXd& z_in,
                              const SlotState& state,
                              const NetworkConfig& cfg) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  Eigen::VectorXd z = z_in;

  for (int i = 0; i < d.nc(); ++i)
    z[lay.xc(i)] = std::clamp(z[lay.xc(i)], kEpsX, 1.0 - kEpsX);
  for (int i = 0; i < d.nu(); ++i)
    z[lay.xu(i)] = std::clamp(z[lay.xu(i)], kEpsX, 1.0 - kEpsX);

  if (d.S > 1) {
    for (int k = 0; k < d.K; ++k) {
      for (int l = 0; l < d.L; ++l) {
        double sx = 0.0;
        for (int s = 0; s < d.S; ++s) sx += z[lay.xc(d.cidx(k, l, s))];
        if (sx > 1.0 - kEpsX)
          for (int s = 0; s < d.S; ++s)
            z[lay.xc(d.cidx(k, l, s))] *= (1.0 - kEpsX) / sx;
      }
      for (int w = 0; w < d.W; ++w) {
        double sx = 0.0;
        for (int s = 0; s < d.S; ++s) sx += z[lay.xu(d.uidx(k, w, s))];
        if (sx > 1.0 - kEpsX)
          for (int s = 0; s < d.S; ++s)
            z[lay.xu(d.uidx(k, w, s))] *= (1.0 - kEpsX) / sx;
      }
    }
  }
  interior_powers(z, state, cfg);
  return z;
}

Eigen::VectorXd sca_step(const DcObjective& obj, const Eigen::VectorXd& prev,
                         const ConvexProblem& constraints,
                         const ScaSettings& settings) {
  SmoothFn surrogate = obj.f;
  Eigen::VectorXd gg = obj.grad_g(prev);
  if (surrogate.lin.size() == 0)
    surrogate.lin = Eigen::VectorXd::Zero(surrogate.n);
  surrogate.lin -= gg;
  surrogate.constant += -obj.g.value(prev) + gg.dot(prev);

  ConvexProblem pb = constraints;
  pb.objective = std::move(surrogate);
  SolveResult res = solve(pb, prev, settings.solver_tol, settings.solver_max_iter);
  if (pb.objective.value(res.z) > pb.objective.value(prev)) return prev;
  return res.z;
}

namespace {

// SCA outer loop; returns the final iterate and iteration count.
Eigen::VectorXd run_sca(const DcObjective& obj, const ConvexProblem& constraints,
                        Eigen::VectorXd z, const ScaSettings& settings,
                        int* iters_out) {
  double prev_val = obj.p3_value(z);
  int it = 0;
  for (; it < settings.max_outer_iters; ++it) {
    Eigen::VectorXd z_new = sca_step(obj, z, constraints, settings);
    double val = obj.p3_value(z_new);
    bool done = std::abs(prev_val - val) <=
                settings.objective_tol * (1.0 + std::abs(prev_val));
    z = std::move(z_new);
    prev_val = val;
    if (done) {
      ++it;
      break;
    }
  }
  if (iters_out) *iters_out += it;
  return z;
}

Eigen::VectorXd deterministic_start(const SlotState& state,
                                    const QueueVector& q,
                                    const NetworkConfig& cfg) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  Eigen::VectorXd z = Eigen::VectorXd::Zero(lay.n());
  for (int k = 0; k < d.K; ++k) {
    for (int l = 0; l < d.L; ++l) {
      int best_s = 0;
      double best = -1.0;
      for (int s = 0; s < d.S; ++s) {
        double score = q[d.user(k, s)] *
                       state.gains_licensed[d.lic_gain_idx(k, l, k, s)];
        if (score > best) {
          best = score;
          best_s = s;
        }
      }
      z[lay.xc(d.cidx(k, l, best_s))] = 1.0;
    }
    for (int w = 0; w < d.W; ++w) {
      int best_s = 0;
      double best = -1.0;
      for (int s = 0; s < d.S; ++s) {
        double score = q[d.user(k, s)] * state.gains_unlicensed[d.uidx(k, w, s)];
        if (score > best) {
          best = score;
          best_s = s;
        }
      }
      z[lay.xu(d.uidx(k, w, best_s))] = 1.0;
    }
    double p_u_each = 0.9 * cfg.unlicensed_power_cap / d.W;
    double p_c_each =
        0.9 * std::max(cfg.total_power_cap - cfg.unlicensed_power_cap, 0.0) /
        d.L;
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s)
        if (z[lay.xc(d.cidx(k, l, s))] > 0.0)
          z[lay.pc(d.cidx(k, l, s))] = p_c_each;
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s)
        if (z[lay.xu(d.uidx(k, w, s))] > 0.0)
          z[lay.pu(d.uidx(k, w, s))] = p_u_each;
  }
  return push_interior(z, state, cfg);
}

Eigen::VectorXd random_start(const SlotState& state, const NetworkConfig& cfg,
                             std::mt19937_64& rng) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  Eigen::VectorXd z = Eigen::VectorXd::Zero(lay.n());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, d.S - 1);
  for (int k = 0; k < d.K; ++k) {
    for (int l = 0; l < d.L; ++l)
      if (uni(rng) < 0.8) {
        int s = pick(rng);
        z[lay.xc(d.cidx(k, l, s))] = 1.0;
        z[lay.pc(d.cidx(k, l, s))] =
            uni(rng) * cfg.total_power_cap / (d.L + d.W);
      }
    for (int w = 0; w < d.W; ++w)
      if (uni(rng) < 0.8) {
        int s = pick(rng);
        z[lay.xu(d.uidx(k, w, s))] = 1.0;
        z[lay.pu(d.uidx(k, w, s))] = uni(rng) * cfg.unlicensed_power_cap / d.W;
      }
  }
  return push_interior(z, state, cfg);
}

// Round x at the threshold, keep one user per subcarrier (largest relaxed x,
// ties to the lowest user index).
std::vector<int> round_assignments(const Eigen::VectorXd& z, const Dims& d,
                                   const VarLayout& lay, double threshold) {
  std::vector<int> xb(d.nc() + d.nu(), 0);
  for (int k = 0; k < d.K; ++k) {
    for (int l = 0; l < d.L; ++l) {
      int best_s = -1;
      double best = threshold;
      for (int s = 0; s < d.S; ++s) {
        double x = z[lay.xc(d.cidx(k, l, s))];
        if (x >= best && (best_s < 0 || x > best)) {
          best = x;
          best_s = s;
        }
      }
      if (best_s >= 0) xb[d.cidx(k, l, best_s)] = 1;
    }
    for (int w = 0; w < d.W; ++w) {
      int best_s = -1;
      double best = threshold;
      for (int s = 0; s < d.S; ++s) {
        double x = z[lay.xu(d.uidx(k, w, s))];
        if (x >= best && (best_s < 0 || x > best)) {
          best = x;
          best_s = s;
        }
      }
      if (best_s >= 0) xb[d.nc() + d.uidx(k, w, best_s)] = 1;
    }
  }
  return xb;
}

}  // namespace

void pin_assignments(ConvexProblem& pb, Eigen::VectorXd& z,
                     const std::vector<int>& xb, const SlotState& state,
                     const NetworkConfig& cfg) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  const double big_m = cfg.big_m_value();
  constexpr double kInactiveCap = 1e-12;

  auto pin = [&](int p_var, int x_var, bool active) {
    double target = active ? 1.0 - kFixDelta : 0.0;
    pb.add_box(x_var, target, target + kFixDelta);
    z[x_var] = target + 0.5 * kFixDelta;
    if (active) {
      z[p_var] = std::clamp(z[p_var], kEpsP, 0.9 * big_m);
    } else {
      SparseRow cap;
      cap.add(p_var, 1.0);
      pb.add_row(std::move(cap), kInactiveCap);
      z[p_var] = 0.1 * kInactiveCap;
    }
  };
  for (int i = 0; i < d.nc(); ++i)
    pin(lay.pc(i), lay.xc(i), xb[i] != 0);
  for (int i = 0; i < d.nu(); ++i)
    pin(lay.pu(i), lay.xu(i), xb[d.nc() + i] != 0);

  // scale back inside the budgets (down-scaling keeps every pin valid)
  for (int k = 0; k < d.K; ++k) {
    double su = 0.0;
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) su += z[lay.pu(d.uidx(k, w, s))];
    if (su > 0.99 * cfg.unlicensed_power_cap) {
      double f = 0.99 * cfg.unlicensed_power_cap / su;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) z[lay.pu(d.uidx(k, w, s))] *= f;
    }
    double st = 0.0;
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s) st += z[lay.pc(d.cidx(k, l, s))];
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) st += z[lay.pu(d.uidx(k, w, s))];
    if (st > 0.99 * cfg.total_power_cap) {
      double f = 0.99 * cfg.total_power_cap / st;
      for (int l = 0; l < d.L; ++l)
        for (int s = 0; s < d.S; ++s) z[lay.pc(d.cidx(k, l, s))] *= f;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) z[lay.pu(d.uidx(k, w, s))] *= f;
    }
  }
  for (int l = 0; l < d.L; ++l) {
    double intf = 0.0;
    for (int k = 0; k < d.K; ++k) {
      double g = state.gains_macro[d.macro_gain_idx(k, l)];
      for (int s = 0; s < d.S; ++s) intf += z[lay.pc(d.cidx(k, l, s))] * g;
    }
    if (intf > 0.99 * cfg.interference_cap) {
      double f = 0.99 * cfg.interference_cap / intf;
      for (int k = 0; k < d.K; ++k)
        for (int s = 0; s < d.S; ++s) z[lay.pc(d.cidx(k, l, s))] *= f;
    }
  }
}

Eigen::VectorXd sca_initial_point(const SlotState& state, const QueueVector& q,
                                  const NetworkConfig& cfg) {
  return deterministic_start(state, q, cfg);
}

std::vector<double> slot_success_probs(const SlotState& state,
                                       const NetworkConfig& cfg) {
  std::vector<double> out(state.dims.K, 0.0);
  for (int k = 0; k < state.dims.K; ++k) {
    CoexistencePoint pt =
        solve_fixed_point(state.wifi_count[k], cfg.wifi_backoff,
                          cfg.sbs_backoff, cfg.csma_tol, cfg.csma_max_iter);
    out[k] = success_prob(pt, state.wifi_count[k]);
  }
  return out;
}

double p2_objective(const Allocation& alloc, const SlotState& state,
                    const QueueVector& q, const NetworkConfig& cfg,
                    const std::vector<double>& success_probs) {
  RatePowerBreakdown b = aggregate(alloc, state, cfg, success_probs);
  double obj = cfg.control_param * b.power_total;
  for (int u = 0; u < state.dims.n_users(); ++u)
    obj -= (q[u] / cfg.queue_scale) *
           (cfg.bits_per_slot(b.user_rate[u]) / cfg.queue_scale);
  return obj;
}

double rate_in_objective_units(const Eigen::VectorXd& z, const SlotState& state,
                               const NetworkConfig& cfg,
                               const std::vector<double>& success_probs, int k,
                               int s) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  const double unit = cfg.subcarrier_bandwidth * cfg.slot_length /
                      cfg.queue_scale / kLn2;
  double r = 0.0;
  for (int l = 0; l < d.L; ++l) {
    SparseRow total = licensed_row(state, lay, k, l, s, true);
    SparseRow intf = licensed_row(state, lay, k, l, s, false);
    r += unit * (std::log(total.dot(z) + cfg.noise_power) -
                 std::log(intf.dot(z) + cfg.noise_power));
  }
  for (int w = 0; w < d.W; ++w) {
    double snr = z[lay.pu(d.uidx(k, w, s))] *
                 state.gains_unlicensed[d.uidx(k, w, s)] / cfg.noise_power;
    r += unit * success_probs[k] * std::log1p(snr);
  }
  return r;
}

Allocation decide_allocation(const SlotState& state, const QueueVector& q,
                             const NetworkConfig& cfg,
                             const ScaSettings& settings,
                             const std::vector<double>& success_probs,
                             SlotDiag* diag) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  SlotDiag local;
  SlotDiag& dg = diag ? *diag : local;
  dg = SlotDiag{};

  if (*std::max_element(q.begin(), q.end()) <= 0.0)
    return Allocation::zeros(d);  // any positive power only adds cost

  double mu =
      settings.penalty_mu > 0.0 ? settings.penalty_mu : cfg.dc_penalty_value();
  ConvexProblem constraints = build_relaxed_constraints(state, cfg);

  std::seed_seq seq{static_cast<std::uint32_t>(settings.restart_seed),
                    static_cast<std::uint32_t>(settings.restart_seed >> 32),
                    static_cast<std::uint32_t>(state.t),
                    static_cast<std::uint32_t>(
                        static_cast<std::uint64_t>(state.t) >> 32)};
  std::mt19937_64 rng(seq);

  DcObjective obj = build_dc_objective(state, q, cfg, success_probs, mu);
  Eigen::VectorXd best;
  double best_val = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt <= settings.restart_count; ++attempt) {
    Eigen::VectorXd z0 = attempt == 0 ? deterministic_start(state, q, cfg)
                                      : random_start(state, cfg, rng);
    try {
      Eigen::VectorXd z =
          run_sca(obj, constraints, z0, settings, &dg.sca_iterations);
      double val = obj.p3_value(z);
      if (val < best_val) {
        best_val = val;
        best = std::move(z);
      }
    } catch (const std::exception&) {
      dg.solver_failed = true;
    }
    if (attempt > 0) ++dg.restarts_used;
  }
  if (best.size() == 0) {
    dg.solver_failed = true;
    return Allocation::zeros(d);
  }

  // escalate the binary penalty until sum(x - x^2) is small enough
  while (obj.penalty_residual(best) > settings.binarity_tol &&
         dg.penalty_doublings < settings.max_penalty_doublings) {
    mu *= 2.0;
    ++dg.penalty_doublings;
    obj = build_dc_objective(state, q, cfg, success_probs, mu);
    try {
      Eigen::VectorXd z = run_sca(obj, constraints,
                                  push_interior(best, state, cfg), settings,
                                  &dg.sca_iterations);
      best = std::move(z);
    } catch (const std::exception&) {
      dg.solver_failed = true;
      break;
    }
  }
  dg.final_objective = obj.p3_value(best);
  dg.penalty_residual = obj.penalty_residual(best);

  // round, then re-optimize powers with x pinned into a narrow box
  std::vector<int> xb =
      round_assignments(best, d, lay, settings.rounding_threshold);
  ConvexProblem fixed = constraints;
  Eigen::VectorXd z_fix = best;
  pin_assignments(fixed, z_fix, xb, state, cfg);
  ScaSettings fix_settings = settings;
  fix_settings.max_outer_iters = std::min(settings.max_outer_iters, 8);
  try {
    z_fix = run_sca(obj, fixed, z_fix, fix_settings, nullptr);
  } catch (const std::exception&) {
    dg.solver_failed = true;  // keep the snapped point
  }

  Allocation out = Allocation::zeros(d);
  for (int i = 0; i < d.nc(); ++i) {
    if (xb[i] && z_fix[lay.pc(i)] >= 1e-9) {
      out.x_c[i] = 1.0;
      out.p_c[i] = z_fix[lay.pc(i)];
    }
  }
  for (int i = 0; i < d.nu(); ++i) {
    if (xb[d.nc() + i] && z_fix[lay.pu(i)] >= 1e-9) {
      out.x_u[i] = 1.0;
      out.p_u[i] = z_fix[lay.pu(i)];
    }
  }

  // exact budget repair (scales are within solver tolerance of 1)
  const double shrink = 1.0 - 1e-12;
  for (int k = 0; k < d.K; ++k) {
    double su = 0.0, st = 0.0;
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) su += out.p_u[d.uidx(k, w, s)];
    if (su > cfg.unlicensed_power_cap) {
      double f = shrink * cfg.unlicensed_power_cap / su;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) out.p_u[d.uidx(k, w, s)] *= f;
    }
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s) st += out.p_c[d.cidx(k, l, s)];
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s) st += out.p_u[d.uidx(k, w, s)];
    if (st > cfg.total_power_cap) {
      double f = shrink * cfg.total_power_cap / st;
      for (int l = 0; l < d.L; ++l)
        for (int s = 0; s < d.S; ++s) out.p_c[d.cidx(k, l, s)] *= f;
      for (int w = 0; w < d.W; ++w)
        for (int s = 0; s < d.S; ++s) out.p_u[d.uidx(k, w, s)] *= f;
    }
  }
  for (int l = 0; l < d.L; ++l) {
    double intf = 0.0;
    for (int k = 0; k < d.K; ++k) {
      double g = state.gains_macro[d.macro_gain_idx(k, l)];
      for (int s = 0; s < d.S; ++s) intf += out.p_c[d.cidx(k, l, s)] * g;
    }
    if (intf > cfg.interference_cap) {
      double f = shrink * cfg.interference_cap / intf;
      for (int k = 0; k < d.K; ++k)
        for (int s = 0; s < d.S; ++s) out.p_c[d.cidx(k, l, s)] *= f;
    }
  }
  return out;
}

Allocation decide_allocation(const SlotState& state, const QueueVector& q,
                             const NetworkConfig& cfg,
                             const ScaSettings& settings, SlotDiag* diag) {
  return decide_allocation(state, q, cfg, settings,
                           slot_success_probs(state, cfg), diag);
}

}  // namespace laa
