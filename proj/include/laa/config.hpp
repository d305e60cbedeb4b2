#pragma once

#include <string>
#include <vector>

#include "laa/csma.hpp"
#include "laa/types.hpp"

namespace laa {

/// Static topology, band, backoff, power-budget, and amplifier parameters.
/// Immutable value type; powers in watts (dBm only at the config boundary).
struct NetworkConfig {
  int num_sbs = 3;               // K
  int licensed_subcarriers = 2;  // L
  int unlicensed_subcarriers = 4;  // W
  int users_per_sbs = 1;         // S_k

  double subcarrier_bandwidth = 20e6;  // Hz
  double noise_power = 1e-6;           // W
  double total_power_cap = 39.810717055349734;   // W (46 dBm)
  double unlicensed_power_cap = 0.19952623149688797;  // W (23 dBm)
  double interference_cap = 1.0;  // I_M, W
  double amplifier_coeff_licensed = 1.0 / 0.35;    // xi_c
  double amplifier_coeff_unlicensed = 1.0 / 0.35;  // xi_u
  double static_power = 9.0;  // W per SBS
  double idle_power = 1.0;    // W; recorded in metrics, not part of PC_tot
  double slot_length = 0.01;  // s

  BackoffLadder wifi_backoff = BackoffLadder::binary_exponential();
  BackoffLadder sbs_backoff = BackoffLadder::binary_exponential();
  double csma_tol = 1e-10;
  int csma_max_iter = 500;

  double control_param = 5.0;  // V
  double dc_penalty = 0.0;     // mu; 0 selects the derived default
  double big_m = 0.0;          // Lambda; 0 selects P_total
  double queue_scale = 1e6;    // bits per objective unit in the drift term

  Dims dims() const {
    return Dims{num_sbs, licensed_subcarriers, unlicensed_subcarriers,
                users_per_sbs};
  }
  double big_m_value() const { return big_m > 0.0 ? big_m : total_power_cap; }
  double dc_penalty_value() const;
  /// Service in bits for a rate in bit/s over one slot.
  double bits_per_slot(double rate_bps) const { return rate_bps * slot_length; }
};

/// Per-slot random environment parameters.
struct WifiCountModel {
  enum Kind { Fixed, Uniform } kind = Uniform;
  int fixed_n = 5;
  int uniform_min = 1;
  int uniform_max = 10;
};

struct EnvParams {
  double arrival_rate = 1.25e6;  // mean bits per slot per user
  double packet_size = 1e6;      // bits per Poisson packet
  double mean_gain_own = 1.0;    // licensed own link, exp-distributed power gain
  double mean_gain_cross = 0.1;  // licensed SBS -> other cell's user
  double mean_gain_macro = 0.05; // SBS -> macro user
  double mean_gain_unlicensed = 1.0;
  WifiCountModel wifi_count_model;
  std::uint64_t rng_seed = 1;
};

/// SCA loop controls.
struct ScaSettings {
  int max_outer_iters = 50;
  double objective_tol = 1e-6;
  double rounding_threshold = 0.5;
  double penalty_mu = 0.0;  // 0 selects the config's derived default
  int restart_count = 3;    // random multistarts in addition to the deterministic one
  std::uint64_t restart_seed = 12345;
  double binarity_tol = 1e-3;
  int max_penalty_doublings = 4;
  double solver_tol = 1e-8;
  int solver_max_iter = 200;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
};

/// Report every violated NetworkConfig invariant; empty iff admissible.
ValidationReport validate_config(const NetworkConfig& cfg);

/// Full run configuration as read from an INI-style file.
struct RunConfig {
  NetworkConfig net;
  EnvParams env;
  ScaSettings sca;
};

/// Parse a key/value config file with [section] headers. Power keys accept a
/// "_dbm" suffix. Throws std::runtime_error with the offending line on error.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Render a RunConfig back to config-file text (all keys, watts variants).
std::string config_to_text(const RunConfig& cfg);

}  // namespace laa
