#include "laa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "laa/rates.hpp"
#include "laa/scheduler.hpp"

namespace laa {

namespace {

using nlohmann::json;

/// Success probabilities for one slot, with the CSMA fixed point solved at
/// most once per distinct Wi-Fi count.
class CsmaCache {
 public:
  explicit CsmaCache(const NetworkConfig& cfg) : cfg_(cfg) {}

  std::vector<double> probs(const SlotState& state) {
    std::vector<double> out(state.dims.K, 0.0);
    for (int k = 0; k < state.dims.K; ++k) out[k] = lookup(state.wifi_count[k]);
    return out;
  }

 private:
  double lookup(int n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    CoexistencePoint pt =
        solve_fixed_point(n, cfg_.wifi_backoff, cfg_.sbs_backoff, cfg_.csma_tol,
                          cfg_.csma_max_iter);
    double p = success_prob(pt, n);
    cache_.emplace(n, p);
    return p;
  }

  const NetworkConfig& cfg_;
  std::map<int, double> cache_;
};

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = x.size();
  if (n < 2) {
    fit.intercept = n == 1 ? y[0] : 0.0;
    fit.r2 = 1.0;
    return fit;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) {
    fit.intercept = sy / n;
  } else {
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  double sse = 0.0, sst = 0.0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += e * e;
    sst += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.rms = std::sqrt(sse / n);
  fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  return fit;
}

}  // namespace

void fit_trends(TradeoffTable& table) {
  std::vector<double> inv_v, v, power, delay;
  for (const TradeoffRow& r : table.rows) {
    if (r.v <= 0.0) continue;
    inv_v.push_back(1.0 / r.v);
    v.push_back(r.v);
    power.push_back(r.avg_power);
    delay.push_back(r.avg_delay);
  }
  LinearFit pf = fit_line(inv_v, power);
  table.power_fit_c0 = pf.intercept;
  table.power_fit_c1 = pf.slope;
  table.power_fit_rms = pf.rms;
  LinearFit df = fit_line(v, delay);
  table.delay_fit_intercept = df.intercept;
  table.delay_fit_slope = df.slope;
  table.delay_fit_r2 = df.r2;
}

TradeoffRow metrics_to_row(const RunMetrics& m, double v, double slope_eps) {
  TradeoffRow r;
  r.v = v;
  r.avg_power = m.avg_power;
  r.avg_delay = m.avg_delay;
  r.avg_queue = m.avg_queue;
  r.avg_rate = m.avg_rate;
  r.infeasible = m.infeasible_slot_count;
  r.stable = m.stability.slope_tail <= slope_eps;
  return r;
}

namespace {

json row_json(const TradeoffRow& r) {
  return json{{"V", r.v},
              {"avg_power_w", r.avg_power},
              {"avg_delay_slots", r.avg_delay},
              {"avg_queue_bits", r.avg_queue},
              {"avg_rate_bps", r.avg_rate},
              {"infeasible_slots", r.infeasible},
              {"stable", r.stable}};
}

json table_json(const TradeoffTable& t) {
  json rows = json::array();
  for (const TradeoffRow& r : t.rows) rows.push_back(row_json(r));
  return json{{"rows", rows},
              {"power_fit", json{{"c0", t.power_fit_c0},
                                 {"c1", t.power_fit_c1},
                                 {"rms", t.power_fit_rms}}},
              {"delay_fit", json{{"intercept", t.delay_fit_intercept},
                                 {"slope", t.delay_fit_slope},
                                 {"r2", t.delay_fit_r2}}}};
}

}  // namespace

RunMetrics run_episode(const RunConfig& cfg, PolicyId policy, std::int64_t T,
                       const std::optional<std::string>& trace_path) {
  if (T <= 0) throw std::invalid_argument("episode length must be positive");
  NetworkConfig net = cfg.net;
  if (policy.kind == PolicyId::Proposed) net.control_param = policy.v;
  const Dims d = net.dims();
  const int nu = d.n_users();

  std::ofstream trace;
  if (trace_path) {
    trace.open(*trace_path);
    if (!trace) throw std::runtime_error("cannot open trace file: " + *trace_path);
    trace << "t,user,queue_bits,arrival_bits,service_bits\n";
  }

  CsmaCache csma(net);
  QueueVector q(nu, 0.0);
  std::vector<double> a_sq(nu, 0.0), r_sq(nu, 0.0);
  QueueTrace qtrace;
  RunMetrics m;
  m.series.reserve(static_cast<std::size_t>(T));

  double sum_power = 0.0, sum_rate = 0.0, sum_queue = 0.0, sum_arrival = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    SlotState state = sample_slot(cfg.env, net, t);
    std::vector<double> p_suc = csma.probs(state);

    Allocation alloc;
    bool flagged = false;
    switch (policy.kind) {
      case PolicyId::Proposed: {
        SlotDiag diag;
        alloc = decide_allocation(state, q, net, cfg.sca, p_suc, &diag);
        flagged = diag.solver_failed;
        break;
      }
      case PolicyId::Pcmps: {
        PcmpsDiag diag;
        alloc = pcmps_decide(state, state.arrivals, net, cfg.sca, p_suc, &diag);
        flagged = diag.infeasible;
        break;
      }
      case PolicyId::ZeroPower:
        alloc = zero_power_decide(state);
        break;
    }

    RatePowerBreakdown b = aggregate(alloc, state, net, p_suc);
    double slot_arrival = 0.0;
    for (int u = 0; u < nu; ++u) {
      double r_bits = net.bits_per_slot(b.user_rate[u]);
      double a_bits = state.arrivals[u];
      if (trace_path)
        trace << t << ',' << u << ',' << q[u] << ',' << a_bits << ',' << r_bits
              << '\n';
      a_sq[u] += a_bits * a_bits;
      r_sq[u] += r_bits * r_bits;
      q[u] = update_queue(q[u], r_bits, a_bits);
      slot_arrival += a_bits;
    }
    double total_q = 0.0;
    for (int u = 0; u < nu; ++u) total_q += q[u];
    qtrace.push(total_q);

    sum_power += b.power_total;
    sum_rate += b.rate_total;
    sum_queue += total_q;
    sum_arrival += slot_arrival;
    if (flagged) ++m.infeasible_slot_count;
    m.series.push_back({t, b.power_total, b.rate_total, total_q, flagged});
  }

  const double n = static_cast<double>(T);
  m.avg_power = sum_power / n;
  m.avg_rate = sum_rate / n;
  m.avg_queue = sum_queue / n;
  m.avg_arrival = sum_arrival / n;
  m.avg_delay = m.avg_arrival > 0.0 ? m.avg_queue / m.avg_arrival : 0.0;
  if (T >= 100) m.stability = stability_metric(qtrace);
  if (T >= 1000) {
    for (int u = 0; u < nu; ++u) {
      a_sq[u] /= n;
      r_sq[u] /= n;
    }
    m.c0_estimate = bound_constant_C0(a_sq, r_sq, static_cast<std::size_t>(T));
  }
  return m;
}

TradeoffTable sweep_V(const RunConfig& cfg, const std::vector<double>& v_list,
                      std::int64_t T, bool parallel) {
  if (v_list.empty()) throw std::invalid_argument("empty V list");
  const double eps = default_slope_epsilon(cfg.env, cfg.net);
  TradeoffTable table;
  table.rows.resize(v_list.size());
  if (parallel && v_list.size() > 1) {
    std::vector<std::future<RunMetrics>> futs;
    futs.reserve(v_list.size());
    for (double v : v_list)
      futs.push_back(std::async(std::launch::async, [&cfg, v, T] {
        return run_episode(cfg, PolicyId::proposed(v), T);
      }));
    for (std::size_t i = 0; i < v_list.size(); ++i)
      table.rows[i] = metrics_to_row(futs[i].get(), v_list[i], eps);
  } else {
    for (std::size_t i = 0; i < v_list.size(); ++i)
      table.rows[i] =
          metrics_to_row(run_episode(cfg, PolicyId::proposed(v_list[i]), T), v_list[i],
                 eps);
  }
  fit_trends(table);
  return table;
}

ComparisonReport compare_policies(const RunConfig& cfg,
                                  const std::vector<double>& v_list,
                                  std::int64_t T, bool parallel,
                                  PolicyId baseline) {
  ComparisonReport rep;
  std::future<RunMetrics> pcmps_fut;
  if (parallel)
    pcmps_fut = std::async(std::launch::async, [&cfg, T, baseline] {
      return run_episode(cfg, baseline, T);
    });
  rep.proposed = sweep_V(cfg, v_list, T, parallel);
  RunMetrics pcmps =
      parallel ? pcmps_fut.get() : run_episode(cfg, baseline, T);
  rep.pcmps = metrics_to_row(pcmps, 0.0, default_slope_epsilon(cfg.env, cfg.net));

  const double target = pcmps.avg_delay;
  for (const TradeoffRow& r : rep.proposed.rows)
    if (r.avg_power <= rep.pcmps.avg_power && r.avg_delay <= target)
      rep.dominance_vs.push_back(r.v);

  // Matched-delay point: closest row within 5%, else linear interpolation in
  // delay between the bracketing rows.
  const TradeoffRow* best = nullptr;
  for (const TradeoffRow& r : rep.proposed.rows) {
    if (target <= 0.0) break;
    double rel = std::abs(r.avg_delay - target) / target;
    if (rel <= 0.05 &&
        (!best || std::abs(r.avg_delay - target) <
                      std::abs(best->avg_delay - target)))
      best = &r;
  }
  if (best) {
    rep.matched = true;
    rep.matched_v = best->v;
    rep.matched_power = best->avg_power;
  } else if (target > 0.0) {
    std::vector<TradeoffRow> sorted = rep.proposed.rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const TradeoffRow& a, const TradeoffRow& b) {
                return a.avg_delay < b.avg_delay;
              });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      const TradeoffRow& lo = sorted[i];
      const TradeoffRow& hi = sorted[i + 1];
      if (lo.avg_delay <= target && target <= hi.avg_delay &&
          hi.avg_delay > lo.avg_delay) {
        double w = (target - lo.avg_delay) / (hi.avg_delay - lo.avg_delay);
        rep.matched = true;
        rep.matched_v = lo.v + w * (hi.v - lo.v);
        rep.matched_power = lo.avg_power + w * (hi.avg_power - lo.avg_power);
        break;
      }
    }
  }
  if (rep.matched && rep.pcmps.avg_power > 0.0) {
    rep.power_ratio = rep.matched_power / rep.pcmps.avg_power;
    rep.reduction_percent = 100.0 * (1.0 - rep.power_ratio);
  }
  return rep;
}

void write_series_csv(const std::string& path, const RunMetrics& metrics,
                      double v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "t,V,pc_tot_w,rate_bps,sum_queue_bits\n";
  for (const SlotRecord& r : metrics.series)
    out << r.t << ',' << v << ',' << r.pc_tot << ',' << r.r_tot << ','
        << r.sum_q << '\n';
}

void write_tradeoff_csv(const std::string& path, const TradeoffTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "V,avg_power_w,avg_delay_slots,avg_queue_bits,avg_rate_bps,"
         "infeasible_slots,stable\n";
  for (const TradeoffRow& r : table.rows)
    out << r.v << ',' << r.avg_power << ',' << r.avg_delay << ','
        << r.avg_queue << ',' << r.avg_rate << ',' << r.infeasible << ','
        << (r.stable ? 1 : 0) << '\n';
}

std::string tradeoff_json(const TradeoffTable& table) {
  return table_json(table).dump(2);
}

std::string run_json(const RunMetrics& metrics) {
  json j{{"avg_power_w", metrics.avg_power},
         {"avg_rate_bps", metrics.avg_rate},
         {"avg_queue_bits", metrics.avg_queue},
         {"avg_delay_slots", metrics.avg_delay},
         {"avg_arrival_bits_per_slot", metrics.avg_arrival},
         {"infeasible_slots", metrics.infeasible_slot_count},
         {"c0_estimate", metrics.c0_estimate},
         {"stability", json{{"time_avg_backlog_bits",
                             metrics.stability.time_avg_backlog},
                            {"slope_tail_bits_per_slot",
                             metrics.stability.slope_tail}}},
         {"slots", metrics.series.size()}};
  return j.dump(2);
}

std::string comparison_json(const ComparisonReport& report) {
  json j{{"proposed", table_json(report.proposed)},
         {"pcmps", row_json(report.pcmps)},
         {"matched", report.matched},
         {"matched_v", report.matched_v},
         {"matched_power_w", report.matched_power},
         {"power_ratio", report.power_ratio},
         {"reduction_percent", report.reduction_percent},
         {"dominance_vs", report.dominance_vs}};
  return j.dump(2);
}

}  // namespace laa
