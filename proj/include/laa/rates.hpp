#pragma once

#include <vector>

#include "laa/config.hpp"
#include "laa/types.hpp"

namespace laa {

/// Per-user and per-band rate/power totals for one slot.
struct RatePowerBreakdown {
  std::vector<double> user_rate;  // [user(k,s)] bit/s, licensed + unlicensed
  std::vector<double> pc_licensed;    // [k] W, amplifier-scaled
  std::vector<double> pc_unlicensed;  // [k] W
  double rate_total = 0.0;  // bit/s
  double power_total = 0.0;  // W, includes K * PC_static
};

/// Shannon rate of user s_k on licensed subcarrier l, with co-channel
/// interference from the other SBSs and AWGN floor.
double licensed_rate(const Allocation& alloc, const SlotState& state,
                     const NetworkConfig& cfg, int k, int l, int s);

/// Airtime-scaled Shannon rate on unlicensed subcarrier w (no inter-SBS
/// interference: non-overlapping unlicensed channels).
double unlicensed_rate(const Allocation& alloc, const SlotState& state,
                       const NetworkConfig& cfg, double p_suc, int k, int w,
                       int s);

/// Aggregate interference at the macro user on licensed subcarrier l.
double cross_tier_interference(const Allocation& alloc, const SlotState& state,
                               int l);

/// Fill the power fields only (rates left empty / zero).
RatePowerBreakdown power_consumption(const Allocation& alloc,
                                     const NetworkConfig& cfg);

/// Full per-slot totals; success_probs has one entry per SBS.
RatePowerBreakdown aggregate(const Allocation& alloc, const SlotState& state,
                             const NetworkConfig& cfg,
                             const std::vector<double>& success_probs);

}  // namespace laa
