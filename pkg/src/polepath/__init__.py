"""S-matrix pole trajectories in the complex momentum plane for potentials rotated by e^{i alpha}."""

from .potentials import Family, PotentialSpec, fixed_zero, moving_pole_function, pole_condition, s_matrix
from .tracer import EventRecord, Periodicity, PhasePoint, PoleLabel, TraceConfig, Trajectory, classify_pole, trace
from .sweep import sweep_real_strength
from .events import detect_events, seed_poles

__all__ = [
    "Family",
    "PotentialSpec",
    "fixed_zero",
    "moving_pole_function",
    "pole_condition",
    "s_matrix",
    "EventRecord",
    "Periodicity",
    "PhasePoint",
    "PoleLabel",
    "TraceConfig",
    "Trajectory",
    "classify_pole",
    "trace",
    "sweep_real_strength",
    "detect_events",
    "seed_poles",
]
