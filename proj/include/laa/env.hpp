#pragma once

#include <cstdint>
#include <vector>

#include "laa/config.hpp"
#include "laa/types.hpp"

namespace laa {

/// Per-slot queue history plus running aggregates.
struct QueueTrace {
  std::vector<double> total_backlog;  // [t] sum over users, bits
  void push(double total) { total_backlog.push_back(total); }
  std::size_t slots() const { return total_backlog.size(); }
};

struct StabilityMetric {
  double time_avg_backlog = 0.0;  // bits, mean of total backlog
  double slope_tail = 0.0;        // bits/slot, LS slope over final 20%
};

/// Draw the slot-t environment. Deterministic given (rng_seed, t): each slot
/// gets its own stream, so slots can be sampled in any order.
SlotState sample_slot(const EnvParams& env, const NetworkConfig& cfg,
                      std::int64_t t);

/// Queue recursion: max(Q - R_bits, 0) + A.
double update_queue(double q, double r_bits, double a_bits);

/// Finite-horizon stability surrogate. Throws std::invalid_argument for
/// traces shorter than 100 slots.
StabilityMetric stability_metric(const QueueTrace& trace);

/// Default stability threshold: 1% of the total mean arrival rate per slot.
double default_slope_epsilon(const EnvParams& env, const NetworkConfig& cfg);

}  // namespace laa
