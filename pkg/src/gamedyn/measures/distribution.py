"""Time-averaged distributions and their distance to a prediction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import stack

REFERENCE_LENGTH = 1000
EARLY_WINDOW = (1, 200)
LATE_WINDOW = (801, 1000)


def time_average(ensemble, t0: int, t1: int) -> np.ndarray:
    """Mean profile over rounds ``t0..t1`` (inclusive) and over sessions."""
    p = stack(ensemble)
    T = p.shape[1]
    if not 1 <= t0 <= t1 <= T:
        raise ValueError(f"window ({t0}, {t1}) outside rounds 1..{T}")
    return p[:, t0 - 1 : t1].mean(axis=(0, 1))


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sqrt(((a - b) ** 2).sum()))


@dataclass(frozen=True)
class DistanceEvolution:
    early: float
    late: float
    early_window: tuple[int, int]
    late_window: tuple[int, int]

    @property
    def delta(self) -> float:
        return self.late - self.early

    def as_tuple(self) -> tuple[float, float, float]:
        return self.early, self.late, self.delta


def scaled_window(window: tuple[int, int], n_rounds: int, reference: int = REFERENCE_LENGTH) -> tuple[int, int]:
    """Map a window defined on ``reference`` rounds proportionally onto ``n_rounds``."""
    t0, t1 = window
    a = (t0 - 1) * n_rounds // reference + 1
    b = max(a, t1 * n_rounds // reference)
    return a, b


def distance_evolution(
    ensemble,
    prediction,
    early=EARLY_WINDOW,
    late=LATE_WINDOW,
    scale_windows: bool = False,
) -> DistanceEvolution:
    """Distance of the early and late window averages to ``prediction``.

    With ``scale_windows`` the windows are rescaled from a 1000-round
    reference onto the actual series length.
    """
    T = stack(ensemble).shape[1]
    if scale_windows:
        early = scaled_window(early, T)
        late = scaled_window(late, T)
    for w in (early, late):
        if w[1] > T:
            raise ValueError(
                f"window {w} exceeds the series length {T}; pass scale_windows=True for short runs"
            )
    pred = np.asarray(prediction, dtype=float)
    d0 = euclidean_distance(time_average(ensemble, *early), pred)
    d1 = euclidean_distance(time_average(ensemble, *late), pred)
    return DistanceEvolution(d0, d1, tuple(early), tuple(late))
