#include "laa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "laa/rates.hpp"
#include "laa/solver.hpp"

namespace laa {

namespace {

const double kLn2 = std::numbers::ln2_v<double>;

// A_{s_k} - R_{s_k} <= 0 in objective units, with the concave
// log(interference + sigma^2) part linearized at z0.
SmoothFn rate_constraint(const SlotState& state, const NetworkConfig& cfg,
                         const std::vector<double>& success_probs,
                         const Eigen::VectorXd& z0, int k, int s,
                         double arrival_units) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  const double unit = cfg.subcarrier_bandwidth * cfg.slot_length /
                      cfg.queue_scale / kLn2;
  SmoothFn c(lay.n());
  c.lin = Eigen::VectorXd::Zero(lay.n());
  c.constant = arrival_units;
  for (int l = 0; l < d.L; ++l) {
    LogTerm total;
    total.coef = -unit;
    // own link plus cross interference; same affine form as the scheduler
    total.a.add(lay.pc(d.cidx(k, l, s)),
                state.gains_licensed[d.lic_gain_idx(k, l, k, s)]);
    SparseRow intf;
    for (int j = 0; j < d.K; ++j) {
      if (j == k) continue;
      double g_jk = state.gains_licensed[d.lic_gain_idx(j, l, k, s)];
      for (int sj = 0; sj < d.S; ++sj) {
        total.a.add(lay.pc(d.cidx(j, l, sj)), g_jk);
        intf.add(lay.pc(d.cidx(j, l, sj)), g_jk);
      }
    }
    total.b = cfg.noise_power;
    c.logs.push_back(std::move(total));

    double a0 = intf.dot(z0) + cfg.noise_power;
    c.constant += unit * (std::log(a0) - intf.dot(z0) / a0);
    for (std::size_t i = 0; i < intf.idx.size(); ++i)
      c.lin[intf.idx[i]] += unit * intf.w[i] / a0;
  }
  for (int w = 0; w < d.W; ++w) {
    if (success_probs[k] <= 0.0) continue;
    LogTerm unl;
    unl.coef = -unit * success_probs[k];
    unl.a.add(lay.pu(d.uidx(k, w, s)),
              state.gains_unlicensed[d.uidx(k, w, s)] / cfg.noise_power);
    unl.b = 1.0;
    c.logs.push_back(std::move(unl));
  }
  return c;
}

// PC_tot plus binary penalty, split into its convex pieces.
DcObjective pcmps_objective(const SlotState& state, const NetworkConfig& cfg,
                            double mu) {
  const Dims d = state.dims;
  DcObjective obj;
  obj.layout = VarLayout{d};
  obj.mu = mu;
  obj.v = 0.0;
  obj.rate_unit = cfg.subcarrier_bandwidth * cfg.slot_length / cfg.queue_scale;
  const int n = obj.layout.n();
  obj.f = SmoothFn(n);
  obj.g = SmoothFn(n);
  obj.f.lin = Eigen::VectorXd::Zero(n);
  obj.g.quad_diag = Eigen::VectorXd::Zero(n);
  obj.f.constant = d.K * cfg.static_power;
  for (int i = 0; i < d.nc(); ++i) {
    obj.f.lin[obj.layout.pc(i)] = cfg.amplifier_coeff_licensed;
    obj.f.lin[obj.layout.xc(i)] = mu;
    obj.g.quad_diag[obj.layout.xc(i)] = mu;
  }
  for (int i = 0; i < d.nu(); ++i) {
    obj.f.lin[obj.layout.pu(i)] = cfg.amplifier_coeff_unlicensed;
    obj.f.lin[obj.layout.xu(i)] = mu;
    obj.g.quad_diag[obj.layout.xu(i)] = mu;
  }
  return obj;
}

Allocation max_rate_fallback(const SlotState& state,
                             const std::vector<double>& arrivals_bits,
                             const NetworkConfig& cfg,
                             const ScaSettings& settings,
                             const std::vector<double>& success_probs) {
  NetworkConfig cfg_v0 = cfg;
  cfg_v0.control_param = 0.0;
  return decide_allocation(state, arrivals_bits, cfg_v0, settings,
                           success_probs);
}

}  // namespace

Allocation zero_power_decide(const SlotState& state) {
  return Allocation::zeros(state.dims);
}

Allocation pcmps_decide(const SlotState& state,
                        const std::vector<double>& arrivals_bits,
                        const NetworkConfig& cfg, const ScaSettings& settings,
                        const std::vector<double>& success_probs,
                        PcmpsDiag* diag) {
  const Dims d = state.dims;
  const VarLayout lay{d};
  PcmpsDiag local;
  PcmpsDiag& dg = diag ? *diag : local;
  dg = PcmpsDiag{};

  if (*std::max_element(arrivals_bits.begin(), arrivals_bits.end()) <= 0.0)
    return Allocation::zeros(d);

  // Phase I: relaxed max-rate point; if even that cannot carry the arrivals,
  // the slot is infeasible for PCMPS.
  NetworkConfig cfg_v0 = cfg;
  cfg_v0.control_param = 0.0;
  ConvexProblem base = build_relaxed_constraints(state, cfg);
  DcObjective mr_obj =
      build_dc_objective(state, arrivals_bits, cfg_v0, success_probs);
  Eigen::VectorXd z = sca_initial_point(state, arrivals_bits, cfg);
  for (int it = 0; it < settings.max_outer_iters; ++it) {
    double before = mr_obj.p3_value(z);
    z = sca_step(mr_obj, z, base, settings);
    ++dg.sca_iterations;
    double after = mr_obj.p3_value(z);
    if (std::abs(before - after) <=
        settings.objective_tol * (1.0 + std::abs(before)))
      break;
  }

  std::vector<double> needed(d.n_users(), 0.0);
  bool feasible = true;
  for (int k = 0; k < d.K && feasible; ++k)
    for (int s = 0; s < d.S; ++s) {
      double a_units = arrivals_bits[d.user(k, s)] / cfg.queue_scale;
      needed[d.user(k, s)] = a_units;
      if (a_units > 0.0 &&
          rate_in_objective_units(z, state, cfg, success_probs, k, s) <=
              a_units * (1.0 + 1e-9)) {
        feasible = false;
        break;
      }
    }
  if (!feasible) {
    dg.infeasible = true;
    return max_rate_fallback(state, arrivals_bits, cfg, settings,
                             success_probs);
  }

  // small margin on the arrivals so the exact check on the extracted binary
  // allocation cannot fail on the last few bits
  for (double& a : needed)
    if (a > 0.0) a *= 1.0 + 1e-6;

  double mu = settings.penalty_mu > 0.0
                  ? settings.penalty_mu
                  : 10.0 * cfg.total_power_cap * cfg.amplifier_coeff_licensed;
  DcObjective obj = pcmps_objective(state, cfg, mu);

  auto with_rate_constraints = [&](const ConvexProblem& skeleton,
                                   const Eigen::VectorXd& z0) {
    ConvexProblem pb = skeleton;
    for (int k = 0; k < d.K; ++k)
      for (int s = 0; s < d.S; ++s)
        if (needed[d.user(k, s)] > 0.0)
          pb.nl_constraints.push_back(rate_constraint(
              state, cfg, success_probs, z0, k, s, needed[d.user(k, s)]));
    return pb;
  };

  // SCA on min PC_tot; the surrogate constraints are re-linearized at each
  // iterate, and every surrogate-feasible point stays truly feasible.
  double prev_val = obj.p3_value(z);
  for (int it = 0; it < settings.max_outer_iters; ++it) {
    ConvexProblem pb = with_rate_constraints(base, z);
    Eigen::VectorXd z_new;
    try {
      z_new = sca_step(obj, z, pb, settings);
    } catch (const std::exception&) {
      dg.infeasible = true;
      return max_rate_fallback(state, arrivals_bits, cfg, settings,
                               success_probs);
    }
    ++dg.sca_iterations;
    double val = obj.p3_value(z_new);
    bool done =
        std::abs(prev_val - val) <= settings.objective_tol * (1.0 + prev_val);
    z = std::move(z_new);
    prev_val = val;
    if (done) break;
  }

  // Round x and re-optimize powers with x pinned, keeping the rate
  // constraints in the problem.
  std::vector<int> xb(d.nc() + d.nu(), 0);
  for (int k = 0; k < d.K; ++k) {
    for (int l = 0; l < d.L; ++l) {
      int best_s = -1;
      double best = settings.rounding_threshold;
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
      double best = settings.rounding_threshold;
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
  ConvexProblem fixed = base;
  Eigen::VectorXd z_fix = z;
  pin_assignments(fixed, z_fix, xb, state, cfg);
  // pinning may break strict rate feasibility; verify before each solve
  bool fix_ok = true;
  for (int it = 0; it < 5 && fix_ok; ++it) {
    ConvexProblem pb = with_rate_constraints(fixed, z_fix);
    bool strict = true;
    for (const auto& c : pb.nl_constraints)
      if (c.value(z_fix) >= 0.0) strict = false;
    if (!strict) {
      fix_ok = false;
      break;
    }
    try {
      z_fix = sca_step(obj, z_fix, pb, settings);
    } catch (const std::exception&) {
      fix_ok = false;
    }
    ++dg.sca_iterations;
  }
  if (!fix_ok) {
    dg.infeasible = true;
    return max_rate_fallback(state, arrivals_bits, cfg, settings,
                             success_probs);
  }

  Allocation out = Allocation::zeros(d);
  for (int i = 0; i < d.nc(); ++i)
    if (xb[i]) {
      out.x_c[i] = 1.0;
      out.p_c[i] = std::max(z_fix[lay.pc(i)], 0.0);
    }
  for (int i = 0; i < d.nu(); ++i)
    if (xb[d.nc() + i]) {
      out.x_u[i] = 1.0;
      out.p_u[i] = std::max(z_fix[lay.pu(i)], 0.0);
    }

  // final check on the binary allocation
  RatePowerBreakdown b = aggregate(out, state, cfg, success_probs);
  for (int u = 0; u < d.n_users(); ++u) {
    if (cfg.bits_per_slot(b.user_rate[u]) < arrivals_bits[u]) {
      dg.infeasible = true;
      return max_rate_fallback(state, arrivals_bits, cfg, settings,
                               success_probs);
    }
  }
  return out;
}

}  // namespace laa
