// Python bindings for the coexistence scheduler library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "laa/baselines.hpp"
#include "laa/csma.hpp"
#include "laa/harness.hpp"
#include "laa/rates.hpp"
#include "laa/scheduler.hpp"
#include "laa/units.hpp"

namespace py = pybind11;
using namespace laa;

PYBIND11_MODULE(_core, m) {
  m.doc() = "LAA/Wi-Fi coexistence scheduling and simulation core";

  m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
  m.def("watts_to_dbm", &watts_to_dbm, py::arg("watts"));

  py::class_<Dims>(m, "Dims")
      .def(py::init<>())
      .def_readwrite("K", &Dims::K)
      .def_readwrite("L", &Dims::L)
      .def_readwrite("W", &Dims::W)
      .def_readwrite("S", &Dims::S)
      .def("n_users", &Dims::n_users);

  py::class_<BackoffLadder>(m, "BackoffLadder")
      .def(py::init<>())
      .def_readwrite("mean_backoffs", &BackoffLadder::mean_backoffs)
      .def_static("binary_exponential", &BackoffLadder::binary_exponential,
                  py::arg("cw_min") = 16.0, py::arg("stages") = 5);

  py::class_<CoexistencePoint>(m, "CoexistencePoint")
      .def_readonly("tau_w", &CoexistencePoint::tau_w)
      .def_readonly("tau_l", &CoexistencePoint::tau_l)
      .def_readonly("p_w", &CoexistencePoint::p_w)
      .def_readonly("p_l", &CoexistencePoint::p_l)
      .def_readonly("residual", &CoexistencePoint::residual)
      .def_readonly("iterations", &CoexistencePoint::iterations);

  m.def("solve_fixed_point", &solve_fixed_point, py::arg("n_wifi"),
        py::arg("wifi_ladder"), py::arg("sbs_ladder"), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 500, py::arg("damping") = 0.5);
  m.def("success_prob", &success_prob, py::arg("point"), py::arg("n_wifi"));
  m.def("attempt_prob", &attempt_prob, py::arg("p"), py::arg("ladder"));

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("num_sbs", &NetworkConfig::num_sbs)
      .def_readwrite("licensed_subcarriers", &NetworkConfig::licensed_subcarriers)
      .def_readwrite("unlicensed_subcarriers",
                     &NetworkConfig::unlicensed_subcarriers)
      .def_readwrite("users_per_sbs", &NetworkConfig::users_per_sbs)
      .def_readwrite("subcarrier_bandwidth", &NetworkConfig::subcarrier_bandwidth)
      .def_readwrite("noise_power", &NetworkConfig::noise_power)
      .def_readwrite("total_power_cap", &NetworkConfig::total_power_cap)
      .def_readwrite("unlicensed_power_cap", &NetworkConfig::unlicensed_power_cap)
      .def_readwrite("interference_cap", &NetworkConfig::interference_cap)
      .def_readwrite("static_power", &NetworkConfig::static_power)
      .def_readwrite("idle_power", &NetworkConfig::idle_power)
      .def_readwrite("slot_length", &NetworkConfig::slot_length)
      .def_readwrite("control_param", &NetworkConfig::control_param)
      .def_readwrite("queue_scale", &NetworkConfig::queue_scale)
      .def("dims", &NetworkConfig::dims);

  py::class_<EnvParams>(m, "EnvParams")
      .def(py::init<>())
      .def_readwrite("arrival_rate", &EnvParams::arrival_rate)
      .def_readwrite("packet_size", &EnvParams::packet_size)
      .def_readwrite("rng_seed", &EnvParams::rng_seed);

  py::class_<ScaSettings>(m, "ScaSettings")
      .def(py::init<>())
      .def_readwrite("max_outer_iters", &ScaSettings::max_outer_iters)
      .def_readwrite("restart_count", &ScaSettings::restart_count);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("violations", &ValidationReport::violations)
      .def("valid", &ValidationReport::valid);
  m.def("validate_config", &validate_config, py::arg("cfg"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("net", &RunConfig::net)
      .def_readwrite("env", &RunConfig::env)
      .def_readwrite("sca", &RunConfig::sca);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("config_to_text", &config_to_text, py::arg("cfg"));

  py::class_<SlotState>(m, "SlotState")
      .def_readonly("t", &SlotState::t)
      .def_readonly("dims", &SlotState::dims)
      .def_readonly("gains_licensed", &SlotState::gains_licensed)
      .def_readonly("gains_macro", &SlotState::gains_macro)
      .def_readonly("gains_unlicensed", &SlotState::gains_unlicensed)
      .def_readonly("arrivals", &SlotState::arrivals)
      .def_readonly("wifi_count", &SlotState::wifi_count);
  m.def("sample_slot", &sample_slot, py::arg("env"), py::arg("cfg"),
        py::arg("t"));
  m.def("update_queue", &update_queue, py::arg("q"), py::arg("r_bits"),
        py::arg("a_bits"));

  py::class_<Allocation>(m, "Allocation")
      .def_readonly("x_c", &Allocation::x_c)
      .def_readonly("p_c", &Allocation::p_c)
      .def_readonly("x_u", &Allocation::x_u)
      .def_readonly("p_u", &Allocation::p_u);

  m.def(
      "decide_allocation",
      [](const SlotState& state, const QueueVector& q, const NetworkConfig& cfg,
         const ScaSettings& settings) {
        return decide_allocation(state, q, cfg, settings);
      },
      py::arg("state"), py::arg("queues"), py::arg("cfg"),
      py::arg("settings") = ScaSettings{});
  m.def("drift_plus_penalty", &drift_plus_penalty, py::arg("v"),
        py::arg("pc_tot"), py::arg("queues"), py::arg("r_bits"));
  m.def("lyapunov_value", &lyapunov_value, py::arg("queues"));

  py::class_<PolicyId>(m, "PolicyId")
      .def_static("proposed", &PolicyId::proposed, py::arg("v"))
      .def_static("pcmps", &PolicyId::pcmps)
      .def_static("zero_power", &PolicyId::zero_power);

  py::class_<StabilityMetric>(m, "StabilityMetric")
      .def_readonly("time_avg_backlog", &StabilityMetric::time_avg_backlog)
      .def_readonly("slope_tail", &StabilityMetric::slope_tail);

  py::class_<SlotRecord>(m, "SlotRecord")
      .def_readonly("t", &SlotRecord::t)
      .def_readonly("pc_tot", &SlotRecord::pc_tot)
      .def_readonly("r_tot", &SlotRecord::r_tot)
      .def_readonly("sum_q", &SlotRecord::sum_q)
      .def_readonly("flagged", &SlotRecord::flagged);

  py::class_<RunMetrics>(m, "RunMetrics")
      .def_readonly("series", &RunMetrics::series)
      .def_readonly("avg_power", &RunMetrics::avg_power)
      .def_readonly("avg_rate", &RunMetrics::avg_rate)
      .def_readonly("avg_queue", &RunMetrics::avg_queue)
      .def_readonly("avg_delay", &RunMetrics::avg_delay)
      .def_readonly("avg_arrival", &RunMetrics::avg_arrival)
      .def_readonly("infeasible_slot_count", &RunMetrics::infeasible_slot_count)
      .def_readonly("c0_estimate", &RunMetrics::c0_estimate)
      .def_readonly("stability", &RunMetrics::stability);

  py::class_<TradeoffRow>(m, "TradeoffRow")
      .def_readonly("v", &TradeoffRow::v)
      .def_readonly("avg_power", &TradeoffRow::avg_power)
      .def_readonly("avg_delay", &TradeoffRow::avg_delay)
      .def_readonly("avg_queue", &TradeoffRow::avg_queue)
      .def_readonly("stable", &TradeoffRow::stable);

  py::class_<TradeoffTable>(m, "TradeoffTable")
      .def_readonly("rows", &TradeoffTable::rows)
      .def_readonly("power_fit_c0", &TradeoffTable::power_fit_c0)
      .def_readonly("power_fit_c1", &TradeoffTable::power_fit_c1)
      .def_readonly("power_fit_rms", &TradeoffTable::power_fit_rms)
      .def_readonly("delay_fit_slope", &TradeoffTable::delay_fit_slope)
      .def_readonly("delay_fit_r2", &TradeoffTable::delay_fit_r2);

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("proposed", &ComparisonReport::proposed)
      .def_readonly("pcmps", &ComparisonReport::pcmps)
      .def_readonly("matched", &ComparisonReport::matched)
      .def_readonly("matched_v", &ComparisonReport::matched_v)
      .def_readonly("matched_power", &ComparisonReport::matched_power)
      .def_readonly("power_ratio", &ComparisonReport::power_ratio)
      .def_readonly("reduction_percent", &ComparisonReport::reduction_percent)
      .def_readonly("dominance_vs", &ComparisonReport::dominance_vs);

  m.def(
      "run_episode",
      [](const RunConfig& cfg, PolicyId policy, std::int64_t t) {
        py::gil_scoped_release release;
        return run_episode(cfg, policy, t);
      },
      py::arg("cfg"), py::arg("policy"), py::arg("slots"));
  m.def(
      "sweep_v",
      [](const RunConfig& cfg, const std::vector<double>& v_list,
         std::int64_t t) {
        py::gil_scoped_release release;
        return sweep_V(cfg, v_list, t);
      },
      py::arg("cfg"), py::arg("v_list"), py::arg("slots"));
  m.def(
      "compare_policies",
      [](const RunConfig& cfg, const std::vector<double>& v_list,
         std::int64_t t) {
        py::gil_scoped_release release;
        return compare_policies(cfg, v_list, t);
      },
      py::arg("cfg"), py::arg("v_list"), py::arg("slots"));
}
