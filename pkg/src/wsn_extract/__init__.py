"""Uncertainty-driven data collection for sensor-network control, with a mobile-sink tracking simulator."""
from .decision import (
    ContractError,
    Decision,
    Hypothesis,
    OneHotSignature,
    expected_unc_decrease,
    mean_hypothesis_uncertainty,
    select_action,
    select_sensors_exhaustive,
    select_sensors_minimum,
)
from .granules import Interval, PreconditionError, com_leq, prob_leq, unc_leq
from .grid import Grid, MessageAccounting, MetricsLedger, hop_distance
from .simulation import BatchStats, RunResult, SimConfig, run_batch, run_simulation, sweep
from .tracking import BeliefRegion, MotionParams, TrackerConfig

__all__ = [
    "BatchStats", "BeliefRegion", "ContractError", "Decision", "Grid", "Hypothesis",
    "Interval", "MessageAccounting", "MetricsLedger", "MotionParams", "OneHotSignature",
    "PreconditionError", "RunResult", "SimConfig", "TrackerConfig", "com_leq",
    "expected_unc_decrease", "hop_distance", "mean_hypothesis_uncertainty", "prob_leq",
    "run_batch", "run_simulation", "select_action", "select_sensors_exhaustive",
    "select_sensors_minimum", "sweep", "unc_leq",
]
__version__ = "0.1.0"
