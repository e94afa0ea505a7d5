"""Scenario configuration, presets, execution and the CLI."""

from .config import ScenarioConfig, from_dict, load_config, validate
from .presets import preset, preset_names
from .runner import CSV_FIELDS, MetricsRow, emit_csv, rows_to_csv_text, run_scenario

__all__ = [
    "CSV_FIELDS",
    "MetricsRow",
    "ScenarioConfig",
    "emit_csv",
    "from_dict",
    "load_config",
    "preset",
    "preset_names",
    "rows_to_csv_text",
    "run_scenario",
    "validate",
]
