#include "laa/rates.hpp"

#include <cmath>
#include <numbers>

namespace laa {

namespace {
constexpr double kSnrFloor = 1e-15;  // below this, rate is exactly zero

double log2_1p(double snr) {
  if (snr < kSnrFloor) return 0.0;
  return std::log1p(snr) / std::numbers::ln2_v<double>;
}
}  // namespace

double licensed_rate(const Allocation& alloc, const SlotState& state,
                     const NetworkConfig& cfg, int k, int l, int s) {
  const Dims& d = state.dims;
  double signal = alloc.x_c[d.cidx(k, l, s)] * alloc.p_c[d.cidx(k, l, s)] *
                  state.gains_licensed[d.lic_gain_idx(k, l, k, s)];
  double interference = 0.0;
  for (int j = 0; j < d.K; ++j) {
    if (j == k) continue;
    double g_jk = state.gains_licensed[d.lic_gain_idx(j, l, k, s)];
    for (int sj = 0; sj < d.S; ++sj) {
      interference +=
          alloc.x_c[d.cidx(j, l, sj)] * alloc.p_c[d.cidx(j, l, sj)] * g_jk;
    }
  }
  return cfg.subcarrier_bandwidth *
         log2_1p(signal / (interference + cfg.noise_power));
}

double unlicensed_rate(const Allocation& alloc, const SlotState& state,
                       const NetworkConfig& cfg, double p_suc, int k, int w,
                       int s) {
  const Dims& d = state.dims;
  double signal = alloc.x_u[d.uidx(k, w, s)] * alloc.p_u[d.uidx(k, w, s)] *
                  state.gains_unlicensed[d.uidx(k, w, s)];
  return p_suc * cfg.subcarrier_bandwidth * log2_1p(signal / cfg.noise_power);
}

double cross_tier_interference(const Allocation& alloc, const SlotState& state,
                               int l) {
  const Dims& d = state.dims;
  double total = 0.0;
  for (int k = 0; k < d.K; ++k) {
    double g = state.gains_macro[d.macro_gain_idx(k, l)];
    for (int s = 0; s < d.S; ++s) {
      total += alloc.x_c[d.cidx(k, l, s)] * alloc.p_c[d.cidx(k, l, s)] * g;
    }
  }
  return total;
}

RatePowerBreakdown power_consumption(const Allocation& alloc,
                                     const NetworkConfig& cfg) {
  const Dims d = cfg.dims();
  RatePowerBreakdown out;
  out.pc_licensed.assign(d.K, 0.0);
  out.pc_unlicensed.assign(d.K, 0.0);
  for (int k = 0; k < d.K; ++k) {
    double pc = 0.0, pu = 0.0;
    for (int l = 0; l < d.L; ++l)
      for (int s = 0; s < d.S; ++s)
        pc += alloc.x_c[d.cidx(k, l, s)] * alloc.p_c[d.cidx(k, l, s)];
    for (int w = 0; w < d.W; ++w)
      for (int s = 0; s < d.S; ++s)
        pu += alloc.x_u[d.uidx(k, w, s)] * alloc.p_u[d.uidx(k, w, s)];
    out.pc_licensed[k] = cfg.amplifier_coeff_licensed * pc;
    out.pc_unlicensed[k] = cfg.amplifier_coeff_unlicensed * pu;
    out.power_total += cfg.static_power + out.pc_licensed[k] + out.pc_unlicensed[k];
  }
  return out;
}

RatePowerBreakdown aggregate(const Allocation& alloc, const SlotState& state,
                             const NetworkConfig& cfg,
                             const std::vector<double>& success_probs) {
  const Dims& d = state.dims;
  RatePowerBreakdown out = power_consumption(alloc, cfg);
  out.user_rate.assign(d.n_users(), 0.0);
  for (int k = 0; k < d.K; ++k) {
    for (int s = 0; s < d.S; ++s) {
      double r = 0.0;
      for (int l = 0; l < d.L; ++l) r += licensed_rate(alloc, state, cfg, k, l, s);
      for (int w = 0; w < d.W; ++w)
        r += unlicensed_rate(alloc, state, cfg, success_probs[k], k, w, s);
      out.user_rate[d.user(k, s)] = r;
      out.rate_total += r;
    }
  }
  return out;
}

}  // namespace laa
