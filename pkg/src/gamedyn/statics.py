"""Iterated elimination of dominated strategies and maximin equilibria."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal

import numpy as np
from scipy.optimize import linprog

from .game import N_STRATEGIES, Game, MixedProfile, expected_payoffs, unified_index

Mode = Literal["weak-pure", "weak-mixed"]

DOMINANCE_TOL = 1e-9
EQUILIBRIUM_TOL = 1e-9


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class EliminationRound:
    round: int
    role: str
    eliminated: frozenset[int]


@dataclass(frozen=True)
class IedsResult:
    """Outcome of IEDS.

    ``dominators`` maps ``(role, strategy)`` to the dominating strategy id, or
    to a tuple of ``(strategy, weight)`` pairs for a mixed dominator.
    """

    rounds: tuple[EliminationRound, ...]
    survivors_x: frozenset[int]
    survivors_y: frozenset[int]
    dominators: dict = field(default_factory=dict)
    active_at: dict = field(default_factory=dict)
    mode: str = "weak-pure"

    @property
    def n_rounds(self) -> int:
        return max((r.round for r in self.rounds), default=0)

    def eliminated(self, role: str) -> frozenset[int]:
        out: set[int] = set()
        for r in self.rounds:
            if r.role == role:
                out |= r.eliminated
        return frozenset(out)

    def round_table(self) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
        """Rows ``(round, X eliminated, Y eliminated)`` in Table-1 layout."""
        rows = []
        for k in range(1, self.n_rounds + 1):
            xs = tuple(sorted(s for r in self.rounds if r.round == k and r.role == "X" for s in r.eliminated))
            ys = tuple(sorted(s for r in self.rounds if r.round == k and r.role == "Y" for s in r.eliminated))
            rows.append((k, xs, ys))
        return rows

    @property
    def domination(self) -> dict[str, dict[int, str]]:
        return {
            "X": {s: ("D+" if s in self.survivors_x else "D-") for s in range(1, N_STRATEGIES + 1)},
            "Y": {s: ("D+" if s in self.survivors_y else "D-") for s in range(1, N_STRATEGIES + 1)},
        }


def _own_payoffs(game: Game, role: str) -> np.ndarray:
    # rows: own strategies, columns: opponent strategies
    return game.payoff_x.astype(float) if role == "X" else game.payoff_y.T.astype(float)


def weakly_dominates(row_a: np.ndarray, row_b: np.ndarray, tol: float = DOMINANCE_TOL) -> bool:
    """True if ``row_a`` is at least as good everywhere and better somewhere."""
    return bool(np.all(row_a >= row_b - tol) and np.any(row_a > row_b + tol))


def _mixed_dominator(q: np.ndarray, a: int, tol: float = DOMINANCE_TOL):
    """Mixture over the other rows of ``q`` weakly dominating row ``a``, or None."""
    k, m = q.shape
    others = [i for i in range(k) if i != a]
    if not others:
        return None
    sub = q[others]
    # maximize total slack sum_j (sigma @ sub - q[a])_j subject to sigma @ sub >= q[a]
    res = linprog(
        c=-sub.sum(axis=1),
        A_ub=-sub.T,
        b_ub=-q[a],
        A_eq=np.ones((1, len(others))),
        b_eq=[1.0],
        bounds=[(0, None)] * len(others),
        method="highs",
    )
    if res.status != 0:
        return None
    sigma = np.clip(res.x, 0.0, None)
    sigma /= sigma.sum()
    if not weakly_dominates(sigma @ sub, q[a], tol):
        return None
    return tuple((others[i], float(w)) for i, w in enumerate(sigma) if w > tol)


def ieds(game: Game, mode: Mode = "weak-pure") -> IedsResult:
    """Iterated elimination of weakly dominated strategies.

    Each round scans both roles against the active set left by the previous
    round and removes every dominated strategy simultaneously.  ``weak-mixed``
    additionally accepts mixtures of active strategies as dominators.
    """
    if mode not in ("weak-pure", "weak-mixed"):
        raise ValueError(f"unknown IEDS mode {mode!r}")
    active = {"X": list(range(1, N_STRATEGIES + 1)), "Y": list(range(1, N_STRATEGIES + 1))}
    opp = {"X": "Y", "Y": "X"}
    rounds: list[EliminationRound] = []
    dominators: dict = {}
    active_at: dict = {}
    k = 0
    while True:
        found: dict[str, set[int]] = {"X": set(), "Y": set()}
        for role in ("X", "Y"):
            own = active[role]
            cols = [s - 1 for s in active[opp[role]]]
            q = _own_payoffs(game, role)[np.ix_([s - 1 for s in own], cols)]
            for a, s in enumerate(own):
                dom = next(
                    (own[b] for b in range(len(own)) if b != a and weakly_dominates(q[b], q[a])),
                    None,
                )
                if dom is None and mode == "weak-mixed":
                    mix = _mixed_dominator(q, a)
                    if mix is not None:
                        dom = tuple((own[i], w) for i, w in mix)
                if dom is not None:
                    found[role].add(s)
                    dominators[(role, s)] = dom
                    active_at[(role, s)] = (tuple(own), tuple(active[opp[role]]))
        if not found["X"] and not found["Y"]:
            break
        k += 1
        for role in ("X", "Y"):
            if found[role]:
                rounds.append(EliminationRound(k, role, frozenset(found[role])))
                active[role] = [s for s in active[role] if s not in found[role]]
    return IedsResult(
        rounds=tuple(rounds),
        survivors_x=frozenset(active["X"]),
        survivors_y=frozenset(active["Y"]),
        dominators=dominators,
        active_at=active_at,
        mode=mode,
    )


def classify_domination(result: IedsResult) -> dict[int, str]:
    """Map every unified index 1..16 to ``'D+'`` (survivor) or ``'D-'``."""
    out = {}
    for s in range(1, N_STRATEGIES + 1):
        out[unified_index("X", s)] = "D+" if s in result.survivors_x else "D-"
        out[unified_index("Y", s)] = "D+" if s in result.survivors_y else "D-"
    return out


@dataclass(frozen=True)
class EquilibriumSolution:
    profile: MixedProfile
    value_x: float
    residual: float
    support_x: frozenset[int]
    support_y: frozenset[int]

    @property
    def value_y(self) -> float:
        return -self.value_x


def matrix_game_value(payoff: np.ndarray) -> tuple[float, np.ndarray]:
    """Value and an optimal row mixture of the zero-sum game ``payoff`` (row maximizes)."""
    a = np.asarray(payoff, dtype=float)
    k, m = a.shape
    # variables: x_1..x_k, v ; maximize v  s.t.  v - x @ a[:, j] <= 0
    c = np.zeros(k + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-a.T, np.ones((m, 1))])
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(m),
        A_eq=np.hstack([np.ones((1, k)), np.zeros((1, 1))]),
        b_eq=[1.0],
        bounds=[(0, None)] * k + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"value LP failed: {res.message} (iterations={res.nit})")
    return float(res.x[-1]), res.x[:k]


def _support_point(a: np.ndarray, support: tuple[int, ...], value: float, tol: float):
    """Row mixture supported on ``support`` guaranteeing ``value`` against every column."""
    sub = a[list(support)]
    res = linprog(
        np.zeros(len(support)),
        A_ub=-sub.T,
        b_ub=-(value - tol) * np.ones(a.shape[1]),
        A_eq=np.ones((1, len(support))),
        b_eq=[1.0],
        bounds=[(0, None)] * len(support),
        method="highs",
    )
    if res.status != 0:
        return None
    return res.x


def _polish(a: np.ndarray, support: tuple[int, ...], x_sub: np.ndarray, value: float) -> np.ndarray:
    # Re-solve the equalizing conditions on the tight columns to remove LP round-off.
    sub = a[list(support)]
    payoffs = x_sub @ sub
    tight = np.flatnonzero(np.abs(payoffs - value) < 1e-6)
    best = np.zeros(a.shape[0])
    best[list(support)] = x_sub
    if tight.size == 0:
        return best
    lhs = np.vstack([sub[:, tight].T, np.ones((1, len(support)))])
    rhs = np.concatenate([np.full(tight.size, value), [1.0]])
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if sol.min() < -1e-12:
        return best
    cand = np.zeros(a.shape[0])
    cand[list(support)] = np.clip(sol, 0.0, None)
    cand /= cand.sum()
    if (cand @ a).min() >= (best @ a).min() - 1e-15:
        return cand
    return best


def _lexmin_support_solution(a: np.ndarray, value: float, tol: float = 1e-9) -> np.ndarray:
    k = a.shape[0]
    for size in range(1, k + 1):
        for support in combinations(range(k), size):
            sub = a[list(support)]
            # quick necessary check: each column must be reachable by some supported row
            if np.any(sub.max(axis=0) < value - tol):
                continue
            x = _support_point(a, support, value, tol)
            if x is not None:
                return _polish(a, support, np.clip(x, 0.0, None) / np.clip(x, 0.0, None).sum(), value)
    raise SolverError("no support attains the game value")


def verify_equilibrium(game: Game, profile: MixedProfile) -> float:
    """Largest gain any player could get by a pure deviation (0 at a Nash equilibrium)."""
    u_x, u_y = expected_payoffs(game, profile)
    gain_x = float(u_x.max() - profile.rho_x @ u_x)
    gain_y = float(u_y.max() - profile.rho_y @ u_y)
    return max(gain_x, gain_y, 0.0)


def is_equilibrium(game: Game, profile: MixedProfile, eps: float = EQUILIBRIUM_TOL) -> bool:
    return verify_equilibrium(game, profile) <= eps


def maximin_solve(game: Game) -> EquilibriumSolution:
    """Optimal mixed strategies of the zero-sum game.

    Among optimal strategies the one with the lexicographically smallest
    support (smallest size first) is returned, which fixes a unique answer
    for degenerate games.
    """
    ax = game.payoff_x.astype(float)
    ay = game.payoff_y.T.astype(float)
    v_x, _ = matrix_game_value(ax)
    v_y, _ = matrix_game_value(ay)
    if abs(v_x + v_y) > 1e-7:
        raise SolverError(f"inconsistent values for X ({v_x}) and Y ({v_y})")
    v = 0.5 * (v_x - v_y)
    x = _lexmin_support_solution(ax, v)
    y = _lexmin_support_solution(ay, -v)
    x = x / x.sum()
    y = y / y.sum()
    profile = MixedProfile(x, y)
    residual = verify_equilibrium(game, profile)
    if residual > 1e-6:
        raise SolverError(f"maximin solution has residual {residual:.3e}")
    return EquilibriumSolution(
        profile=profile,
        value_x=float(profile.rho_x @ ax @ profile.rho_y),
        residual=residual,
        support_x=frozenset(int(i) + 1 for i in np.flatnonzero(x > 1e-12)),
        support_y=frozenset(int(j) + 1 for j in np.flatnonzero(y > 1e-12)),
    )


def survivor_subgame(game: Game, result: IedsResult) -> np.ndarray:
    """X's payoff matrix restricted to the IEDS survivors."""
    rows = sorted(result.survivors_x)
    cols = sorted(result.survivors_y)
    return game.payoff_x[np.ix_([r - 1 for r in rows], [c - 1 for c in cols])].astype(float)
