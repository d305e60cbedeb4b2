#include "laa/env.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace laa {

SlotState sample_slot(const EnvParams& env, const NetworkConfig& cfg,
                      std::int64_t t) {
  const Dims d = cfg.dims();
  SlotState st;
  st.t = t;
  st.dims = d;
  st.gains_licensed.resize(static_cast<size_t>(d.K) * d.L * d.K * d.S);
  st.gains_macro.resize(static_cast<size_t>(d.K) * d.L);
  st.gains_unlicensed.resize(d.nu());
  st.arrivals.resize(d.n_users());
  st.wifi_count.resize(d.K);

  // per-(seed, t) stream so slots are addressable independently
  const std::uint64_t tt = static_cast<std::uint64_t>(t);
  std::seed_seq seq{static_cast<std::uint32_t>(env.rng_seed),
                    static_cast<std::uint32_t>(env.rng_seed >> 32),
                    static_cast<std::uint32_t>(tt),
                    static_cast<std::uint32_t>(tt >> 32)};
  std::mt19937_64 rng(seq);

  // Rayleigh amplitude fading -> exponentially distributed power gain
  std::exponential_distribution<double> own(1.0 / env.mean_gain_own);
  std::exponential_distribution<double> cross(1.0 / env.mean_gain_cross);
  std::exponential_distribution<double> macro(1.0 / env.mean_gain_macro);
  std::exponential_distribution<double> unl(1.0 / env.mean_gain_unlicensed);

  for (int j = 0; j < d.K; ++j)
    for (int l = 0; l < d.L; ++l)
      for (int k = 0; k < d.K; ++k)
        for (int s = 0; s < d.S; ++s)
          st.gains_licensed[d.lic_gain_idx(j, l, k, s)] =
              (j == k) ? own(rng) : cross(rng);
  for (int k = 0; k < d.K; ++k)
    for (int l = 0; l < d.L; ++l)
      st.gains_macro[d.macro_gain_idx(k, l)] = macro(rng);
  for (int i = 0; i < d.nu(); ++i) st.gains_unlicensed[i] = unl(rng);

  if (env.arrival_rate > 0.0 && env.packet_size > 0.0) {
    std::poisson_distribution<long> pois(env.arrival_rate / env.packet_size);
    for (int u = 0; u < d.n_users(); ++u)
      st.arrivals[u] = static_cast<double>(pois(rng)) * env.packet_size;
  } else {
    std::fill(st.arrivals.begin(), st.arrivals.end(), 0.0);
  }

  const auto& wm = env.wifi_count_model;
  if (wm.kind == WifiCountModel::Fixed) {
    std::fill(st.wifi_count.begin(), st.wifi_count.end(), wm.fixed_n);
  } else {
    std::uniform_int_distribution<int> uni(wm.uniform_min, wm.uniform_max);
    for (int k = 0; k < d.K; ++k) st.wifi_count[k] = uni(rng);
  }
  return st;
}

double update_queue(double q, double r_bits, double a_bits) {
  return std::max(q - r_bits, 0.0) + a_bits;
}

StabilityMetric stability_metric(const QueueTrace& trace) {
  const std::size_t n = trace.slots();
  if (n < 100) throw std::invalid_argument("stability_metric: trace too short");
  StabilityMetric m;
  double sum = 0.0;
  for (double q : trace.total_backlog) sum += q;
  m.time_avg_backlog = sum / static_cast<double>(n);

  // least-squares slope over the final 20% of slots
  std::size_t start = n - n / 5;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double cnt = static_cast<double>(n - start);
  for (std::size_t i = start; i < n; ++i) {
    double x = static_cast<double>(i - start);
    double y = trace.total_backlog[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = cnt * sxx - sx * sx;
  m.slope_tail = denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  return m;
}

double default_slope_epsilon(const EnvParams& env, const NetworkConfig& cfg) {
  return 0.01 * env.arrival_rate * cfg.dims().n_users();
}

}  // namespace laa
