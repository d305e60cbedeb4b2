"""LAA/Wi-Fi coexistence scheduling and simulation (C++ core bindings)."""

from ._core import (  # noqa: F401
    Allocation,
    BackoffLadder,
    CoexistencePoint,
    ComparisonReport,
    Dims,
    EnvParams,
    NetworkConfig,
    PolicyId,
    RunConfig,
    RunMetrics,
    ScaSettings,
    SlotState,
    SlotRecord,
    StabilityMetric,
    TradeoffRow,
    TradeoffTable,
    ValidationReport,
    attempt_prob,
    compare_policies,
    config_to_text,
    dbm_to_watts,
    decide_allocation,
    drift_plus_penalty,
    load_config,
    lyapunov_value,
    parse_config,
    run_episode,
    sample_slot,
    solve_fixed_point,
    success_prob,
    sweep_v,
    update_queue,
    validate_config,
    watts_to_dbm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
