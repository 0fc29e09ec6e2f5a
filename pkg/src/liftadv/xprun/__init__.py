"""Sweeps, serialization, validation and the command-line interface."""
from .records import RunRecord, emit, from_csv, from_json, parse_svg, to_csv, to_json, to_svg
from .sweeps import (
    SweepSpec,
    rerun,
    run_cell,
    run_sweep,
    sweep_cdf,
    sweep_over_d,
    sweep_over_n,
    sweep_over_q,
    sweep_phase,
)
from .validate import run_validation

__all__ = ["RunRecord", "SweepSpec", "emit", "from_csv", "from_json", "parse_svg", "rerun",
           "run_cell", "run_sweep", "run_validation", "sweep_cdf", "sweep_over_d", "sweep_over_n",
           "sweep_over_q", "sweep_phase", "to_csv", "to_json", "to_svg"]
