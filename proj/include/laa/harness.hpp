#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laa/baselines.hpp"
#include "laa/config.hpp"
#include "laa/env.hpp"

namespace laa {

struct SlotRecord {
  std::int64_t t = 0;
  double pc_tot = 0.0;   // W
  double r_tot = 0.0;    // bit/s
  double sum_q = 0.0;    // bits, after the slot's queue update
  bool flagged = false;  // solver failure / PCMPS infeasible slot
};

struct RunMetrics {
  double avg_power = 0.0;    // W
  double avg_rate = 0.0;     // bit/s
  double avg_queue = 0.0;    // bits (total backlog)
  double avg_delay = 0.0;    // slots, Little's law: avg_queue / avg_arrival
  double avg_arrival = 0.0;  // bits per slot, total
  std::int64_t infeasible_slot_count = 0;
  double c0_estimate = 0.0;  // 0 when T < 1000
  StabilityMetric stability;
  std::vector<SlotRecord> series;
};

struct TradeoffRow {
  double v = 0.0;
  double avg_power = 0.0;
  double avg_delay = 0.0;
  double avg_queue = 0.0;
  double avg_rate = 0.0;
  std::int64_t infeasible = 0;
  bool stable = false;
};

struct TradeoffTable {
  std::vector<TradeoffRow> rows;
  // avg_power ~ c0 + c1 / V least-squares fit
  double power_fit_c0 = 0.0;
  double power_fit_c1 = 0.0;
  double power_fit_rms = 0.0;
  // avg_delay ~ a + b V least-squares fit
  double delay_fit_intercept = 0.0;
  double delay_fit_slope = 0.0;
  double delay_fit_r2 = 0.0;
};

struct ComparisonReport {
  TradeoffTable proposed;
  TradeoffRow pcmps;  // v field unused
  bool matched = false;
  double matched_v = 0.0;
  double matched_power = 0.0;    // proposed power at the matched-delay point
  double power_ratio = 0.0;      // matched_power / pcmps power
  double reduction_percent = 0.0;
  std::vector<double> dominance_vs;  // V values beating PCMPS in both metrics
};

/// Slot-by-slot episode: sample environment, solve the CSMA fixed points,
/// apply the policy, update queues, accumulate metrics. Deterministic for a
/// given config. trace_path, when set, dumps a per-user CSV (t,user,Q,A,R).
RunMetrics run_episode(const RunConfig& cfg, PolicyId policy, std::int64_t T,
                       const std::optional<std::string>& trace_path = {});

/// Collapse run metrics into a tradeoff row; a run is "stable" when its
/// backlog tail slope is at most stable_slope_eps.
TradeoffRow metrics_to_row(const RunMetrics& m, double v,
                           double stable_slope_eps);

/// Fill in the c0 + c1/V power fit and the linear delay fit of a table.
void fit_trends(TradeoffTable& table);

/// One proposed-policy run per V (common random numbers), plus trend fits.
TradeoffTable sweep_V(const RunConfig& cfg, const std::vector<double>& v_list,
                      std::int64_t T, bool parallel = true);

/// Proposed-vs-baseline comparison at matched delay (baseline PCMPS by
/// default; any PolicyId works, e.g. for sanity checks).
ComparisonReport compare_policies(const RunConfig& cfg,
                                  const std::vector<double>& v_list,
                                  std::int64_t T, bool parallel = true,
                                  PolicyId baseline = PolicyId::pcmps());

void write_series_csv(const std::string& path, const RunMetrics& metrics,
                      double v);
void write_tradeoff_csv(const std::string& path, const TradeoffTable& table);
std::string tradeoff_json(const TradeoffTable& table);
std::string run_json(const RunMetrics& metrics);
std::string comparison_json(const ComparisonReport& report);

}  // namespace laa
