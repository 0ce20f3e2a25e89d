"""Eigencycle spectrum (signed areas per strategy plane) and cycle loops."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dynamics import stack
from ..game import N_PAIRS, N_STRATEGIES, N_UNIFIED, _PAIRS

_IU = (np.array([m - 1 for m, _ in _PAIRS]), np.array([n - 1 for _, n in _PAIRS]))


def area_matrix(profiles) -> np.ndarray:
    """Antisymmetric 16x16 matrix of accumulated signed areas of one trajectory.

    Entry ``[m, n]`` sums ``(rho_m dRho_n - rho_n dRho_m) / 2`` over steps.
    """
    p = np.asarray(profiles, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2:
        raise ValueError("a trajectory needs at least 2 rounds")
    x = p[:-1]
    d = np.diff(p, axis=0)
    s = x.T @ d
    return 0.5 * (s - s.T)


def normalize_values(raw) -> tuple[np.ndarray, float]:
    """Divide by the max absolute value; all-zero input stays zero."""
    raw = np.asarray(raw, dtype=float)
    peak = float(np.abs(raw).max()) if raw.size else 0.0
    if peak == 0.0:
        return np.zeros_like(raw), 0.0
    return raw / peak, peak


@dataclass(frozen=True)
class Spectrum:
    """120 eigencycle values in pair order ``x = 1..120``."""

    raw: np.ndarray
    values: np.ndarray
    normalization: float

    @classmethod
    def from_raw(cls, raw) -> Spectrum:
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (N_PAIRS,):
            raise ValueError(f"expected {N_PAIRS} raw values, got shape {raw.shape}")
        values, peak = normalize_values(raw)
        return cls(raw, values, peak)

    @property
    def degenerate(self) -> bool:
        return self.normalization == 0.0

    @property
    def entries(self) -> list[tuple[int, int, int, float]]:
        return [(x + 1, m, n, float(self.values[x])) for x, (m, n) in enumerate(_PAIRS)]

    def value(self, m: int, n: int) -> float:
        """Normalized value for the plane ``(m, n)``; sign flips for ``m > n``."""
        if m == n:
            return 0.0
        return float(self.matrix()[m - 1, n - 1])

    def matrix(self, raw: bool = False) -> np.ndarray:
        v = self.raw if raw else self.values
        out = np.zeros((N_UNIFIED, N_UNIFIED))
        out[_IU] = v
        return out - out.T

    def top(self, k: int) -> list[tuple[int, int, int, float]]:
        order = np.argsort(-np.abs(self.values), kind="stable")[:k]
        return [(int(x) + 1, *_PAIRS[x], float(self.values[x])) for x in order]


def eigencycle_spectrum(ensemble) -> Spectrum:
    """Session-averaged signed-area spectrum, normalized to max |value| = 1."""
    p = stack(ensemble)
    if p.shape[1] < 2:
        raise ValueError("each session needs at least 2 rounds")
    mean_area = np.mean([area_matrix(s) for s in p], axis=0)
    return Spectrum.from_raw(mean_area[_IU])


def joint_normalize(spectra: dict) -> dict:
    """Rescale several spectra by their common max |raw| so they are comparable."""
    peak = max((float(np.abs(s.raw).max()) for s in spectra.values()), default=0.0)
    out = {}
    for key, s in spectra.items():
        vals = s.raw / peak if peak > 0 else np.zeros_like(s.raw)
        out[key] = Spectrum(s.raw, vals, peak)
    return out


@dataclass(frozen=True)
class Loop:
    """Directed 4-cycle ``x1 -> y1 -> x2 -> y2 -> x1`` in unified indices."""

    nodes: tuple[int, int, int, int]
    edge_values: tuple[float, float, float, float]

    @property
    def strength(self) -> float:
        return float(np.mean(np.abs(self.edge_values)))

    def __str__(self) -> str:
        return "->".join(str(k) for k in (*self.nodes, self.nodes[0]))


def cycle_loops(spectrum: Spectrum, threshold: float = 0.5) -> list[Loop]:
    """Alternating X/Y 4-cycles among entries with ``|value| >= threshold``.

    A positive value for the plane ``(m, n)``, ``m < n``, is read as the
    edge ``m -> n``; a negative one as ``n -> m``.  Loops start at their
    smallest X index and are sorted by strength, strongest first.
    """
    v = spectrum.matrix()
    xs = range(1, N_STRATEGIES + 1)
    ys = range(N_STRATEGIES + 1, N_UNIFIED + 1)

    def edge(a, b):
        val = v[a - 1, b - 1]
        return val if val > 0 and abs(val) >= threshold else None

    loops = []
    for x1 in xs:
        for y1 in ys:
            e1 = edge(x1, y1)
            if e1 is None:
                continue
            for x2 in xs:
                if x2 <= x1:
                    continue
                e2 = edge(y1, x2)
                if e2 is None:
                    continue
                for y2 in ys:
                    if y2 == y1:
                        continue
                    e3, e4 = edge(x2, y2), edge(y2, x1)
                    if e3 is None or e4 is None:
                        continue
                    loops.append(Loop((x1, y1, x2, y2), (float(e1), float(e2), float(e3), float(e4))))
    loops.sort(key=lambda lp: (-lp.strength, lp.nodes))
    return loops


def loop_strength(spectrum: Spectrum, threshold: float = 0.05) -> float:
    """Mean strength of the loops found at ``threshold``, 0 if there are none."""
    loops = cycle_loops(spectrum, threshold)
    return float(np.mean([lp.strength for lp in loops])) if loops else 0.0


def treatment_loop_strengths(spectra: dict, threshold: float = 0.05, joint: bool = False) -> dict:
    """Loop strength per treatment.

    By default each spectrum keeps its own normalization; ``joint`` rescales
    all of them by their common max |raw| first.
    """
    if joint:
        spectra = joint_normalize(spectra)
    return {k: loop_strength(s, threshold) for k, s in spectra.items()}
