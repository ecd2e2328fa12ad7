"""Simulation study, theory verification and report I/O."""

from .simulation import SimulationConfig, SimulationResult, CellResult, run_simulation, load_config_file
from .verification import Level, Check, VerificationReport, verify_theory
from .data_io import read_pairs
from .report import render_simulation, render_verification, render_record, simulation_frame

__all__ = [
    'SimulationConfig',
    'SimulationResult',
    'CellResult',
    'run_simulation',
    'load_config_file',
    'Level',
    'Check',
    'VerificationReport',
    'verify_theory',
    'read_pairs',
    'render_simulation',
    'render_verification',
    'render_record',
    'simulation_frame',
]
