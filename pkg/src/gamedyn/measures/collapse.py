"""Accumulated curves, pulses of dominated strategies and crossover points."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..dynamics import SessionSeries, stack
from ..game import N_UNIFIED, role_of, unified_label
from ..stats import paired_ttest, significance_label

DEFAULT_TAU_MIN = 40
RED_ARROW_TAU = 89


def _as_array(data) -> np.ndarray:
    """(sessions, T, 16) view of a series, an ensemble or a raw array."""
    if isinstance(data, SessionSeries):
        return data.profiles[None]
    if isinstance(data, np.ndarray):
        return data[None] if data.ndim == 2 else data
    return stack(data)


@dataclass(frozen=True)
class AccumulatedCurve:
    strategy: int
    values: np.ndarray

    def at(self, t: int) -> float:
        return 0.0 if t == 0 else float(self.values[t - 1])


def accumulated_curves(data) -> np.ndarray:
    """Running sums of the session-mean profile, shape (T, 16)."""
    return np.cumsum(_as_array(data).mean(axis=0), axis=0)


def accumulated_curve(data, strategy: int) -> AccumulatedCurve:
    role_of(strategy)
    return AccumulatedCurve(strategy, accumulated_curves(data)[:, strategy - 1])


def block_label(block: tuple[int, int]) -> str:
    return f"{block[0]}-{block[1]}"


@dataclass(frozen=True)
class PulseResult:
    dominated: int
    domination: int
    block: tuple[int, int]
    psi: float
    p_value: float
    n: int
    t_statistic: float

    @property
    def label(self) -> str:
        return significance_label(self.p_value)


def _same_role(a: int, b: int) -> str:
    ra, rb = role_of(a)[0], role_of(b)[0]
    if ra != rb:
        raise ValueError(f"{unified_label(a)} and {unified_label(b)} belong to different roles")
    return ra


def pulse(ensemble, s_j: int, s_i: int, block: tuple[int, int]) -> PulseResult:
    """Surplus of ``s_j`` over ``s_i`` pooled over every round of ``block`` and every session."""
    _same_role(s_j, s_i)
    p = _as_array(ensemble)
    t0, t1 = block
    if t1 < t0:
        raise ValueError(f"empty block {block}")
    if not 1 <= t0 <= t1 <= p.shape[1]:
        raise ValueError(f"block {block} outside rounds 1..{p.shape[1]}")
    samples = (p[:, t0 - 1 : t1, s_j - 1] - p[:, t0 - 1 : t1, s_i - 1]).ravel()
    test = paired_ttest(samples)
    return PulseResult(s_j, s_i, (t0, t1), float(samples.sum()), test.p_two_sided, samples.size, test.t_statistic)


@dataclass(frozen=True)
class PulseReport:
    treatment: str
    rows: tuple[PulseResult, ...]


def _same_role_pairs(domination: dict):
    """(D-, D+) pairs of the same role."""
    for j, cj in sorted(domination.items()):
        if cj != "D-":
            continue
        for i, ci in sorted(domination.items()):
            if ci == "D+" and role_of(i)[0] == role_of(j)[0]:
                yield j, i


def scan_pulses(
    ensemble,
    domination: dict,
    block_length: int = 10,
    p_threshold: float = 0.05,
    treatment: str = "",
) -> PulseReport:
    """Significant positive pulses over consecutive blocks ``[1, L], [L+1, 2L], ...``.

    A trailing partial block is ignored.  Rows are sorted by ``psi`` descending.
    """
    p = _as_array(ensemble)
    T = p.shape[1]
    rows = []
    for j, i in _same_role_pairs(domination):
        for t0 in range(1, T - block_length + 2, block_length):
            r = pulse(p, j, i, (t0, t0 + block_length - 1))
            if r.psi > 0 and r.p_value < p_threshold:
                rows.append(r)
    rows.sort(key=lambda r: (-r.psi, r.block[0], r.dominated, r.domination))
    return PulseReport(treatment, tuple(rows))


@dataclass(frozen=True)
class Crossover:
    """Crossing of the accumulated curves of ``pair`` at round ``tau``.

    ``above`` is the strategy whose curve was higher just before ``tau``;
    ``dominated`` is the D- member of a chi- pair (None for chi+).
    """

    pair: tuple[int, int]
    tau: int
    kind: str
    above: int
    dominated: int | None = None

    @property
    def domination(self) -> int:
        if self.dominated is None:
            return self.pair[0]
        return self.pair[1] if self.dominated == self.pair[0] else self.pair[0]

    @property
    def other(self) -> int:
        return self.pair[1] if self.dominated is None else self.dominated


def crossover_kind(class_i: str, class_j: str) -> str | None:
    classes = {class_i, class_j}
    if classes == {"D+"}:
        return "chi+"
    if classes == {"D+", "D-"}:
        return "chi-"
    return None


def crossing_rounds(values_i, values_j) -> list[tuple[int, int]]:
    """``(tau, sign_before)`` for every sign change of ``values_i - values_j``.

    ``tau`` is the first round (1-based) at which the difference leaves its
    previous sign, provided the opposite sign is reached afterwards.
    """
    d = np.asarray(values_i, dtype=float) - np.asarray(values_j, dtype=float)
    sgn = np.sign(d)
    out = []
    prev = 0
    left_at = None
    for t, s in enumerate(sgn, start=1):
        if s == 0:
            if prev != 0 and left_at is None:
                left_at = t
            continue
        if prev != 0 and s != prev:
            out.append((left_at if left_at is not None else t, int(prev)))
        prev = int(s)
        left_at = None
    return out


def crossovers(
    curve_i: AccumulatedCurve,
    curve_j: AccumulatedCurve,
    class_i: str,
    class_j: str,
    tau_min: int = DEFAULT_TAU_MIN,
) -> list[Crossover]:
    """Crossings with ``tau > tau_min``; pairs of two dominated strategies give none."""
    if curve_i.values.shape != curve_j.values.shape:
        raise ValueError("curves must have equal length")
    kind = crossover_kind(class_i, class_j)
    if kind is None:
        return []
    pair = (curve_i.strategy, curve_j.strategy)
    dominated = None
    if kind == "chi-":
        dominated = curve_i.strategy if class_i == "D-" else curve_j.strategy
    return [
        Crossover(pair, tau, kind, curve_i.strategy if before > 0 else curve_j.strategy, dominated)
        for tau, before in crossing_rounds(curve_i.values, curve_j.values)
        if tau > tau_min
    ]


@dataclass(frozen=True)
class CrossoverReport:
    treatment: str
    rows: tuple[Crossover, ...]

    def red_arrows(self, tau_min: int = RED_ARROW_TAU) -> list[Crossover]:
        return [c for c in self.rows if c.kind == "chi-" and c.tau > tau_min]


def scan_crossovers(ensemble, domination: dict, tau_min: int = DEFAULT_TAU_MIN, treatment: str = "") -> CrossoverReport:
    """Crossovers of the ensemble-mean accumulated curves for every same-role pair."""
    acc = accumulated_curves(ensemble)
    rows = []
    for a, b in combinations(range(1, N_UNIFIED + 1), 2):
        if role_of(a)[0] != role_of(b)[0]:
            continue
        rows.extend(
            crossovers(
                AccumulatedCurve(a, acc[:, a - 1]),
                AccumulatedCurve(b, acc[:, b - 1]),
                domination[a],
                domination[b],
                tau_min,
            )
        )
    rows.sort(key=lambda c: (c.tau, c.pair))
    return CrossoverReport(treatment, tuple(rows))


@dataclass(frozen=True)
class ConsistencyViolation:
    dominated: int
    domination: int
    positive_until: int
    reason: str


def pulse_crossover_consistency(ensemble, domination: dict, tol: float = 1e-12) -> list[ConsistencyViolation]:
    """Check that every initial pulse is followed by a later crossing.

    For each (D-, D+) pair whose mean surplus is positive from round 1
    through round ``t*``, the dominated curve leads at ``t*``.  Once the
    dominating strategy ends up ahead, the curves must cross after ``t*``.
    A pair where the dominated strategy is still ahead at the last round is
    reported as unresolved.
    """
    mean = _as_array(ensemble).mean(axis=0)
    acc = np.cumsum(mean, axis=0)
    out = []
    for j, i in _same_role_pairs(domination):
        surplus = mean[:, j - 1] - mean[:, i - 1]
        if surplus[0] <= tol:
            continue
        neg = np.flatnonzero(surplus <= tol)
        t_star = int(neg[0]) if neg.size else surplus.size
        later = [
            tau for tau, before in crossing_rounds(acc[:, j - 1], acc[:, i - 1]) if before > 0 and tau > t_star
        ]
        if later:
            continue
        reason = "dominated curve still ahead at the last round" if acc[-1, j - 1] > acc[-1, i - 1] else "no crossing after the pulse"
        out.append(ConsistencyViolation(j, i, t_star, reason))
    return out
