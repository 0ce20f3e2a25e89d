"""Observables computed on session ensembles."""

from .collapse import (
    AccumulatedCurve,
    Crossover,
    CrossoverReport,
    PulseReport,
    PulseResult,
    accumulated_curve,
    accumulated_curves,
    crossovers,
    pulse,
    pulse_crossover_consistency,
    scan_crossovers,
    scan_pulses,
)
from .cycles import Loop, Spectrum, cycle_loops, eigencycle_spectrum, joint_normalize, treatment_loop_strengths
from .distribution import DistanceEvolution, distance_evolution, euclidean_distance, time_average

__all__ = [
    "AccumulatedCurve",
    "Crossover",
    "CrossoverReport",
    "DistanceEvolution",
    "Loop",
    "PulseReport",
    "PulseResult",
    "Spectrum",
    "accumulated_curve",
    "accumulated_curves",
    "crossovers",
    "cycle_loops",
    "distance_evolution",
    "eigencycle_spectrum",
    "euclidean_distance",
    "joint_normalize",
    "pulse",
    "pulse_crossover_consistency",
    "scan_crossovers",
    "scan_pulses",
    "time_average",
    "treatment_loop_strengths",
]
