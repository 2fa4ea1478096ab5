"""Experiment configs, grid sweeps and SVG plots."""

from .config import ExperimentConfig, load_config, load_preset, loads_config, preset_names
from .plot import plot
from .sweep import run_sweep

__all__ = [
    "ExperimentConfig",
    "load_config",
    "load_preset",
    "loads_config",
    "preset_names",
    "plot",
    "run_sweep",
]
