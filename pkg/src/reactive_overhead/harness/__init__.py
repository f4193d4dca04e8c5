"""Scenario runs, metrics, the flooding oracle, model-vs-simulation comparison and output."""

from .compare import ComparisonReport, compare_model_vs_sim
from .config import ConfigError, ScenarioConfig, load_config, scenario1, scenario2, scenario3, scenario_points
from .oracle import OracleResult, flooding_oracle
from .output import emit_csv, emit_dat
from .runner import Metrics, RunMetrics, run_once, run_scenario

__all__ = ["ComparisonReport", "compare_model_vs_sim", "ConfigError", "ScenarioConfig", "load_config",
           "scenario1", "scenario2", "scenario3", "scenario_points", "OracleResult", "flooding_oracle",
           "emit_csv", "emit_dat", "Metrics", "RunMetrics", "run_once", "run_scenario"]
