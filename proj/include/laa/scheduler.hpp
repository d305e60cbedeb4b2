#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "laa/config.hpp"
#include "laa/solver.hpp"
#include "laa/types.hpp"

namespace laa {

/// Flat variable layout used by the relaxed per-slot problems:
/// [p_c | p_u | x_c | x_u], powers in watts, x in [0,1].
struct VarLayout {
  Dims d;
  int pc(int i) const { return i; }
  int pu(int i) const { return d.nc() + i; }
  int xc(int i) const { return d.nc() + d.nu() + i; }
  int xu(int i) const { return 2 * d.nc() + d.nu() + i; }
  int n() const { return 2 * (d.nc() + d.nu()); }
  int n_powers() const { return d.nc() + d.nu(); }

  Eigen::VectorXd pack(const Allocation& a) const;
  Allocation unpack(const Eigen::VectorXd& z) const;
};

/// The per-slot objective split f - g into two convex pieces, with the
/// binary-penalty terms included (mu x in f, mu x^2 in g).
struct DcObjective {
  VarLayout layout;
  SmoothFn f;
  SmoothFn g;
  double mu = 0.0;       // penalty factor on sum(x - x^2)
  double v = 0.0;        // control parameter
  double rate_unit = 0.0;  // B * slot / queue_scale: objective units per log2

  double p3_value(const Eigen::VectorXd& z) const {
    return f.value(z) - g.value(z);
  }
  /// sum(x - x^2) over both bands.
  double penalty_residual(const Eigen::VectorXd& z) const;
  /// P2 objective (no penalty): p3_value minus mu * penalty_residual.
  double p2_value(const Eigen::VectorXd& z) const {
    return p3_value(z) - mu * penalty_residual(z);
  }
  Eigen::VectorXd grad_g(const Eigen::VectorXd& z) const;
};

/// L(Q) = 1/2 sum Q^2.
double lyapunov_value(const QueueVector& q);

/// Decision-relevant drift-plus-penalty: V * PC_tot - sum Q * R_bits.
double drift_plus_penalty(double v, double pc_tot, const QueueVector& q,
                          const std::vector<double>& r_bits);

/// C_0 = 1/2 sum_users (E[A^2] + E[R^2]), from empirical second moments.
/// Throws std::invalid_argument when n_samples < 1000.
double bound_constant_C0(const std::vector<double>& arrival_sq_mean,
                         const std::vector<double>& service_sq_mean,
                         std::size_t n_samples);

/// Build the D.C. split of the penalized per-slot problem. Queue lengths and
/// rates enter in units of cfg.queue_scale bits. mu_override > 0 replaces the
/// config's penalty default.
DcObjective build_dc_objective(const SlotState& state, const QueueVector& q,
                               const NetworkConfig& cfg,
                               const std::vector<double>& success_probs,
                               double mu_override = 0.0);

/// The relaxed feasible set (budgets C2-C4, coupling p <= x Lambda,
/// per-subcarrier C5 rows, boxes); objective left empty.
ConvexProblem build_relaxed_constraints(const SlotState& state,
                                        const NetworkConfig& cfg);

/// Move a candidate point strictly inside the relaxed feasible set.
Eigen::VectorXd push_interior(const Eigen::VectorXd& z, const SlotState& state,
                              const NetworkConfig& cfg);

/// Deterministic SCA starting point: per subcarrier, assign the user with
/// the largest Q * gain product and split the power caps uniformly.
Eigen::VectorXd sca_initial_point(const SlotState& state, const QueueVector& q,
                                  const NetworkConfig& cfg);

/// One majorize-minimize step: minimize f - linearization of g at prev over
/// the relaxed set. Returns prev unchanged if the surrogate did not improve,
/// so the true P3 objective is non-increasing across calls.
Eigen::VectorXd sca_step(const DcObjective& obj, const Eigen::VectorXd& prev,
                         const ConvexProblem& constraints,
                         const ScaSettings& settings);

/// Pin a rounded assignment for the power re-solve: narrow boxes keep x at
/// its binary value, inactive powers are capped at ~0, active powers are
/// clamped strictly inside the budgets. xb holds nc()+nu() binary entries
/// (licensed block first). Modifies the problem and the start point in place.
void pin_assignments(ConvexProblem& pb, Eigen::VectorXd& z,
                     const std::vector<int>& xb, const SlotState& state,
                     const NetworkConfig& cfg);

/// Per-slot diagnostics from decide_allocation.
struct SlotDiag {
  int sca_iterations = 0;
  int restarts_used = 0;
  int penalty_doublings = 0;
  double final_objective = 0.0;   // relaxed P3
  double penalty_residual = 0.0;  // sum(x - x^2) at convergence
  bool solver_failed = false;
};

/// Full per-slot decision: multistart SCA on the relaxed D.C. program,
/// adaptive penalty escalation, rounding to binary x with per-subcarrier
/// repair, and a final power re-solve with x fixed. Output satisfies C2-C7.
Allocation decide_allocation(const SlotState& state, const QueueVector& q,
                             const NetworkConfig& cfg,
                             const ScaSettings& settings,
                             const std::vector<double>& success_probs,
                             SlotDiag* diag = nullptr);

/// Convenience overload that solves the CSMA fixed points internally.
Allocation decide_allocation(const SlotState& state, const QueueVector& q,
                             const NetworkConfig& cfg,
                             const ScaSettings& settings,
                             SlotDiag* diag = nullptr);

/// CSMA success probability per SBS for this slot.
std::vector<double> slot_success_probs(const SlotState& state,
                                       const NetworkConfig& cfg);

/// P2 objective of a binary allocation, in objective units (V * PC_tot -
/// sum Qtilde * Rtilde); the quantity compared against the grid oracle.
double p2_objective(const Allocation& alloc, const SlotState& state,
                    const QueueVector& q, const NetworkConfig& cfg,
                    const std::vector<double>& success_probs);

/// Internal helper shared with the PCMPS baseline: per-user rate in
/// objective units as a function of the packed variable vector.
double rate_in_objective_units(const Eigen::VectorXd& z, const SlotState& state,
                               const NetworkConfig& cfg,
                               const std::vector<double>& success_probs, int k,
                               int s);

}  // namespace laa
