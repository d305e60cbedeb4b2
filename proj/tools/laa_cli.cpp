// Command-line front end: load a config, run one of the experiments, write
// CSV/JSON artifacts. Exit codes: 0 success, 1 config/usage error, 2 solver
// hard failure. LAA_LOG=debug enables progress logging on stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laa/csma.hpp"
#include "laa/harness.hpp"
#include "laa/units.hpp"

namespace fs = std::filesystem;

namespace {

bool log_enabled() {
  const char* v = std::getenv("LAA_LOG");
  return v && std::string(v) != "" && std::string(v) != "off";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[laa] " << msg << "\n";
}

laa::RunConfig load(const std::string& path, std::uint64_t* seed_override,
                    double* v_override) {
  laa::RunConfig cfg = laa::load_config(path);
  if (seed_override) cfg.env.rng_seed = *seed_override;
  if (v_override) cfg.net.control_param = *v_override;
  laa::ValidationReport rep = laa::validate_config(cfg.net);
  if (!rep.valid()) {
    for (const std::string& v : rep.violations)
      std::cerr << "config error: " << v << "\n";
    throw CLI::RuntimeError(1);
  }
  return cfg;
}

laa::PolicyId parse_policy(const std::string& name, double v) {
  if (name == "proposed") return laa::PolicyId::proposed(v);
  if (name == "pcmps") return laa::PolicyId::pcmps();
  if (name == "zero-power") return laa::PolicyId::zero_power();
  std::cerr << "config error: unknown policy '" << name << "'\n";
  throw CLI::RuntimeError(1);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LAA/Wi-Fi coexistence scheduler experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string policy_name = "proposed";
  std::vector<double> v_list;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double v_single = 0.0;
  bool v_set = false;
  std::int64_t slots = 5000;
  bool trace = false;
  int n_max = 20;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", config_path, "config file");
    if (needs_config) opt->required();
    sub->add_option("-o,--out", out_dir, "output directory");
    sub->add_option("-s,--seed", seed, "RNG seed override")
        ->each([&](const std::string&) { seed_set = true; });
    sub->add_option("-T,--slots", slots, "episode length in slots");
  };

  CLI::App* run = app.add_subcommand("run", "single episode, per-slot CSV");
  add_common(run, true);
  run->add_option("-p,--policy", policy_name,
                  "policy: proposed | pcmps | zero-power");
  run->add_option("-V", v_single, "control parameter V")
      ->each([&](const std::string&) { v_set = true; });
  run->add_flag("--trace", trace, "also write a per-user trace CSV");

  CLI::App* sweep = app.add_subcommand("sweep", "V sweep, tradeoff table");
  add_common(sweep, true);
  sweep->add_option("-V", v_list, "V values (comma separated)")
      ->required()
      ->delimiter(',');

  CLI::App* compare =
      app.add_subcommand("compare", "proposed vs PCMPS at matched delay");
  add_common(compare, true);
  compare->add_option("-V", v_list, "V values for the proposed sweep")
      ->delimiter(',');

  CLI::App* csma =
      app.add_subcommand("csma-table", "CSMA fixed points for N = 0..N_max");
  add_common(csma, false);
  csma->add_option("-N,--n-max", n_max, "largest Wi-Fi count");

  CLI::App* validate =
      app.add_subcommand("validate", "check a config file and print the report");
  add_common(validate, true);

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    std::uint64_t* seed_ptr = seed_set ? &seed : nullptr;

    if (validate->parsed()) {
      laa::RunConfig cfg = laa::load_config(config_path);
      if (seed_set) cfg.env.rng_seed = seed;
      laa::ValidationReport rep = laa::validate_config(cfg.net);
      if (rep.valid()) {
        std::cout << "valid\n";
        return 0;
      }
      for (const std::string& v : rep.violations) std::cout << v << "\n";
      return 1;
    }

    if (csma->parsed()) {
      laa::NetworkConfig net;
      if (!config_path.empty())
        net = load(config_path, seed_ptr, nullptr).net;
      std::cout << "N,tau_w,tau_l,p_w,p_l,p_suc\n";
      for (int n = 0; n <= n_max; ++n) {
        laa::CoexistencePoint pt =
            laa::solve_fixed_point(n, net.wifi_backoff, net.sbs_backoff,
                                   net.csma_tol, net.csma_max_iter);
        std::cout << n << ',' << pt.tau_w << ',' << pt.tau_l << ',' << pt.p_w
                  << ',' << pt.p_l << ',' << laa::success_prob(pt, n) << "\n";
      }
      return 0;
    }

    if (run->parsed()) {
      laa::RunConfig cfg =
          load(config_path, seed_ptr, v_set ? &v_single : nullptr);
      laa::PolicyId policy = parse_policy(policy_name, cfg.net.control_param);
      std::optional<std::string> trace_path;
      if (trace) trace_path = (fs::path(out_dir) / "trace.csv").string();
      log_line("run: T=" + std::to_string(slots));
      laa::RunMetrics m = laa::run_episode(cfg, policy, slots, trace_path);
      laa::write_series_csv((fs::path(out_dir) / "series.csv").string(), m,
                            cfg.net.control_param);
      write_file(fs::path(out_dir) / "summary.json", laa::run_json(m) + "\n");
      std::cout << laa::run_json(m) << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      laa::RunConfig cfg = load(config_path, seed_ptr, nullptr);
      log_line("sweep: " + std::to_string(v_list.size()) + " V values");
      laa::TradeoffTable table = laa::sweep_V(cfg, v_list, slots);
      laa::write_tradeoff_csv((fs::path(out_dir) / "tradeoff.csv").string(),
                              table);
      write_file(fs::path(out_dir) / "summary.json",
                 laa::tradeoff_json(table) + "\n");
      std::cout << laa::tradeoff_json(table) << "\n";
      return 0;
    }

    if (compare->parsed()) {
      laa::RunConfig cfg = load(config_path, seed_ptr, nullptr);
      if (v_list.empty()) v_list = {1, 2, 5, 10, 20, 40};
      log_line("compare: " + std::to_string(v_list.size()) + " V values");
      laa::ComparisonReport rep = laa::compare_policies(cfg, v_list, slots);
      laa::write_tradeoff_csv((fs::path(out_dir) / "tradeoff.csv").string(),
                              rep.proposed);
      write_file(fs::path(out_dir) / "summary.json",
                 laa::comparison_json(rep) + "\n");
      std::cout << laa::comparison_json(rep) << "\n";
      return 0;
    }
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const laa::FixedPointError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    // config parse / IO problems
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
