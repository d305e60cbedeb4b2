#include "laa/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "laa/units.hpp"

namespace laa {

double NetworkConfig::dc_penalty_value() const {
  if (dc_penalty > 0.0) return dc_penalty;
  // "sufficiently large" penalty; scaled with the power term so the x
  // quadratic dominates fractional assignments. Floor V at 1 so V=0 runs
  // still get a positive penalty.
  return 10.0 * std::max(control_param, 1.0) * total_power_cap *
         amplifier_coeff_licensed;
}

ValidationReport validate_config(const NetworkConfig& cfg) {
  ValidationReport rep;
  auto require = [&rep](bool ok, const std::string& msg) {
    if (!ok) rep.violations.push_back(msg);
  };
  require(cfg.num_sbs >= 1, "num_sbs < 1");
  require(cfg.licensed_subcarriers >= 1, "licensed_subcarriers < 1");
  require(cfg.unlicensed_subcarriers >= 1, "unlicensed_subcarriers < 1");
  require(cfg.users_per_sbs >= 1, "users_per_sbs < 1");
  require(cfg.subcarrier_bandwidth > 0.0, "subcarrier_bandwidth not positive");
  require(cfg.noise_power > 0.0, "noise_power not positive");
  require(cfg.total_power_cap > 0.0, "total_power_cap not positive");
  require(cfg.unlicensed_power_cap > 0.0, "unlicensed_power_cap not positive");
  require(cfg.unlicensed_power_cap <= cfg.total_power_cap, "P_u > P_total");
  require(cfg.interference_cap > 0.0, "interference_cap not positive");
  require(cfg.amplifier_coeff_licensed >= 1.0, "amplifier_coeff_licensed < 1");
  require(cfg.amplifier_coeff_unlicensed >= 1.0,
          "amplifier_coeff_unlicensed < 1");
  require(cfg.static_power > 0.0, "static_power not positive");
  require(cfg.slot_length > 0.0, "slot_length not positive");
  require(cfg.wifi_backoff.max_retx() >= 1, "wifi_backoff empty");
  require(cfg.sbs_backoff.max_retx() >= 1, "sbs_backoff empty");
  for (double b : cfg.wifi_backoff.mean_backoffs)
    require(b > 0.0, "wifi_backoff stage not positive");
  for (double b : cfg.sbs_backoff.mean_backoffs)
    require(b > 0.0, "sbs_backoff stage not positive");
  require(cfg.control_param >= 0.0, "control_param negative");
  require(cfg.dc_penalty >= 0.0, "dc_penalty negative");
  if (cfg.big_m != 0.0)
    require(cfg.big_m >= cfg.total_power_cap, "big_m below power cap");
  require(cfg.queue_scale > 0.0, "queue_scale not positive");
  return rep;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

struct KvMap {
  std::map<std::string, std::string> kv;  // "section.key" -> value
  std::vector<std::string> unused;

  bool get(const std::string& key, std::string& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    out = it->second;
    kv.erase(it);
    return true;
  }
  void num(const std::string& key, double& field) {
    std::string v;
    if (get(key, v)) field = std::stod(v);
  }
  void integer(const std::string& key, int& field) {
    std::string v;
    if (get(key, v)) field = std::stoi(v);
  }
  void u64(const std::string& key, std::uint64_t& field) {
    std::string v;
    if (get(key, v)) field = std::stoull(v);
  }
  // watts field, overridable by a _dbm variant
  void power(const std::string& key, double& field) {
    std::string v;
    if (get(key, v)) field = std::stod(v);
    if (get(key + "_dbm", v)) field = dbm_to_watts(std::stod(v));
  }
  void list(const std::string& key, std::vector<double>& field) {
    std::string v;
    if (get(key, v)) field = parse_list(v);
  }
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  KvMap m;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    // strip trailing comment
    size_t hash = val.find('#');
    if (hash != std::string::npos) val = trim(val.substr(0, hash));
    m.kv[section.empty() ? key : section + "." + key] = val;
  }

  RunConfig cfg;
  auto& net = cfg.net;
  m.integer("network.num_sbs", net.num_sbs);
  m.integer("network.licensed_subcarriers", net.licensed_subcarriers);
  m.integer("network.unlicensed_subcarriers", net.unlicensed_subcarriers);
  m.integer("network.users_per_sbs", net.users_per_sbs);
  m.num("network.subcarrier_bandwidth", net.subcarrier_bandwidth);
  m.power("network.noise_power", net.noise_power);
  m.power("network.total_power_cap", net.total_power_cap);
  m.power("network.unlicensed_power_cap", net.unlicensed_power_cap);
  m.power("network.interference_cap", net.interference_cap);
  m.num("network.amplifier_coeff_licensed", net.amplifier_coeff_licensed);
  m.num("network.amplifier_coeff_unlicensed", net.amplifier_coeff_unlicensed);
  {
    // 1/xi amplifier efficiency shorthand
    std::string v;
    if (m.get("network.amplifier_efficiency", v)) {
      double eff = std::stod(v);
      net.amplifier_coeff_licensed = 1.0 / eff;
      net.amplifier_coeff_unlicensed = 1.0 / eff;
    }
  }
  m.power("network.static_power", net.static_power);
  m.power("network.idle_power", net.idle_power);
  m.num("network.slot_length", net.slot_length);
  m.num("network.control_param", net.control_param);
  m.num("network.dc_penalty", net.dc_penalty);
  m.power("network.big_m", net.big_m);
  m.num("network.queue_scale", net.queue_scale);

  m.list("backoff.wifi_backoff", net.wifi_backoff.mean_backoffs);
  m.list("backoff.sbs_backoff", net.sbs_backoff.mean_backoffs);
  m.num("backoff.csma_tol", net.csma_tol);
  m.integer("backoff.csma_max_iter", net.csma_max_iter);

  auto& env = cfg.env;
  m.num("env.arrival_rate", env.arrival_rate);
  m.num("env.packet_size", env.packet_size);
  m.num("env.mean_gain_own", env.mean_gain_own);
  m.num("env.mean_gain_cross", env.mean_gain_cross);
  m.num("env.mean_gain_macro", env.mean_gain_macro);
  m.num("env.mean_gain_unlicensed", env.mean_gain_unlicensed);
  m.u64("env.rng_seed", env.rng_seed);
  {
    std::string v;
    if (m.get("env.wifi_count_model", v)) {
      if (v == "fixed")
        env.wifi_count_model.kind = WifiCountModel::Fixed;
      else if (v == "uniform")
        env.wifi_count_model.kind = WifiCountModel::Uniform;
      else
        throw std::runtime_error("env.wifi_count_model: unknown value '" + v +
                                 "'");
    }
  }
  m.integer("env.wifi_count_fixed", env.wifi_count_model.fixed_n);
  m.integer("env.wifi_count_min", env.wifi_count_model.uniform_min);
  m.integer("env.wifi_count_max", env.wifi_count_model.uniform_max);

  auto& sca = cfg.sca;
  m.integer("sca.max_outer_iters", sca.max_outer_iters);
  m.num("sca.objective_tol", sca.objective_tol);
  m.num("sca.rounding_threshold", sca.rounding_threshold);
  m.num("sca.penalty_mu", sca.penalty_mu);
  m.integer("sca.restart_count", sca.restart_count);
  m.u64("sca.restart_seed", sca.restart_seed);
  m.num("sca.binarity_tol", sca.binarity_tol);
  m.integer("sca.max_penalty_doublings", sca.max_penalty_doublings);
  m.num("sca.solver_tol", sca.solver_tol);
  m.integer("sca.solver_max_iter", sca.solver_max_iter);

  if (!m.kv.empty())
    throw std::runtime_error("unknown config key: " + m.kv.begin()->first);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  const auto& n = cfg.net;
  out << "[network]\n"
      << "num_sbs = " << n.num_sbs << "\n"
      << "licensed_subcarriers = " << n.licensed_subcarriers << "\n"
      << "unlicensed_subcarriers = " << n.unlicensed_subcarriers << "\n"
      << "users_per_sbs = " << n.users_per_sbs << "\n"
      << "subcarrier_bandwidth = " << n.subcarrier_bandwidth << "\n"
      << "noise_power = " << n.noise_power << "\n"
      << "total_power_cap = " << n.total_power_cap << "\n"
      << "unlicensed_power_cap = " << n.unlicensed_power_cap << "\n"
      << "interference_cap = " << n.interference_cap << "\n"
      << "amplifier_coeff_licensed = " << n.amplifier_coeff_licensed << "\n"
      << "amplifier_coeff_unlicensed = " << n.amplifier_coeff_unlicensed << "\n"
      << "static_power = " << n.static_power << "\n"
      << "idle_power = " << n.idle_power << "\n"
      << "slot_length = " << n.slot_length << "\n"
      << "control_param = " << n.control_param << "\n"
      << "dc_penalty = " << n.dc_penalty << "\n"
      << "big_m = " << n.big_m << "\n"
      << "queue_scale = " << n.queue_scale << "\n";
  auto list = [&out](const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  };
  out << "\n[backoff]\nwifi_backoff = ";
  list(n.wifi_backoff.mean_backoffs);
  out << "\nsbs_backoff = ";
  list(n.sbs_backoff.mean_backoffs);
  out << "\ncsma_tol = " << n.csma_tol << "\n"
      << "csma_max_iter = " << n.csma_max_iter << "\n";
  const auto& e = cfg.env;
  out << "\n[env]\n"
      << "arrival_rate = " << e.arrival_rate << "\n"
      << "packet_size = " << e.packet_size << "\n"
      << "mean_gain_own = " << e.mean_gain_own << "\n"
      << "mean_gain_cross = " << e.mean_gain_cross << "\n"
      << "mean_gain_macro = " << e.mean_gain_macro << "\n"
      << "mean_gain_unlicensed = " << e.mean_gain_unlicensed << "\n"
      << "wifi_count_model = "
      << (e.wifi_count_model.kind == WifiCountModel::Fixed ? "fixed" : "uniform")
      << "\n"
      << "wifi_count_fixed = " << e.wifi_count_model.fixed_n << "\n"
      << "wifi_count_min = " << e.wifi_count_model.uniform_min << "\n"
      << "wifi_count_max = " << e.wifi_count_model.uniform_max << "\n"
      << "rng_seed = " << e.rng_seed << "\n";
  const auto& s = cfg.sca;
  out << "\n[sca]\n"
      << "max_outer_iters = " << s.max_outer_iters << "\n"
      << "objective_tol = " << s.objective_tol << "\n"
      << "rounding_threshold = " << s.rounding_threshold << "\n"
      << "penalty_mu = " << s.penalty_mu << "\n"
      << "restart_count = " << s.restart_count << "\n"
      << "restart_seed = " << s.restart_seed << "\n"
      << "binarity_tol = " << s.binarity_tol << "\n"
      << "max_penalty_doublings = " << s.max_penalty_doublings << "\n"
      << "solver_tol = " << s.solver_tol << "\n"
      << "solver_max_iter = " << s.solver_max_iter << "\n";
  return out.str();
}

}  // namespace laa
