#pragma once

#include <vector>

#include "laa/config.hpp"
#include "laa/scheduler.hpp"
#include "laa/types.hpp"

namespace laa {

/// Reference policies; Proposed carries its control parameter V.
struct PolicyId {
  enum Kind { Proposed, Pcmps, ZeroPower } kind = Proposed;
  double v = 5.0;

  static PolicyId proposed(double v) { return {Proposed, v}; }
  static PolicyId pcmps() { return {Pcmps, 0.0}; }
  static PolicyId zero_power() { return {ZeroPower, 0.0}; }
};

struct PcmpsDiag {
  bool infeasible = false;  // arrivals not servable; max-rate fallback used
  int sca_iterations = 0;
};

/// Per-slot power minimization subject to serving this slot's arrivals:
/// min PC_tot s.t. C2-C7 and R_{s_k} >= A_{s_k}. Solved with the same
/// D.C./SCA machinery, the rate constraint convexified by the log-difference
/// split. Infeasible slots fall back to the max-rate (V = 0) allocation and
/// are flagged; the call never throws on infeasibility.
Allocation pcmps_decide(const SlotState& state,
                        const std::vector<double>& arrivals_bits,
                        const NetworkConfig& cfg, const ScaSettings& settings,
                        const std::vector<double>& success_probs,
                        PcmpsDiag* diag = nullptr);

/// Transmit nothing; queues grow by the arrivals.
Allocation zero_power_decide(const SlotState& state);

}  // namespace laa
