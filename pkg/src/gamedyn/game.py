"""Games, mixed profiles and the unified 16-strategy indexing.

The three embedded treatments are the normal forms of the generalized
three-card poker game with (m, n) = (2, 1), (3, 2) and (4, 2).  Entries are
stored in game points (base payoff times 6).
Three cells of treatment C are printed with a leading asterisk; the asterisk
carries no documented meaning and is ignored here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

N_STRATEGIES = 8
N_UNIFIED = 2 * N_STRATEGIES
N_PAIRS = N_UNIFIED * (N_UNIFIED - 1) // 2

SIMPLEX_TOL = 1e-12

# Payoff to player X; player Y receives the negation.
_TREATMENT_X = {
    "A": [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 1, 1, 2, 2],
        [2, -1, 2, -1, 3, 0, 3, 0],
        [2, -1, 3, 0, 4, 1, 5, 2],
        [4, 1, 1, -2, 4, 1, 1, -2],
        [4, 1, 2, -1, 5, 2, 3, 0],
        [6, 0, 3, -3, 7, 1, 4, -2],
        [6, 0, 4, -2, 8, 2, 6, 0],
    ],
    "B": [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [-2, -2, 0, 0, 0, 0, 2, 2],
        [2, -2, 2, -2, 4, 0, 4, 0],
        [0, -4, 2, -2, 4, 0, 6, 2],
        [6, 2, 2, -2, 6, 2, 2, -2],
        [4, 0, 2, -2, 6, 2, 4, 0],
        [8, 0, 4, -4, 10, 2, 6, -2],
        [6, -2, 4, -4, 10, 2, 8, 0],
    ],
    "C": [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [-2, -2, 1, 1, 1, 1, 4, 4],
        [2, -3, 2, -3, 5, 0, 5, 0],
        [0, -5, 3, -2, 6, 1, 9, 4],
        [6, 1, 1, -4, 6, 1, 1, -4],
        [4, -1, 2, -3, 7, 2, 5, 0],
        [8, -2, 3, -7, 11, 1, 6, -4],
        [6, -4, 4, -6, 12, 2, 10, 0],
    ],
}

TREATMENT_PARAMS = {"A": (2, 1), "B": (3, 2), "C": (4, 2)}


class GameValidationError(ValueError):
    """Raised for malformed or non-zero-sum game definitions."""


def _default_labels(prefix: str) -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(1, N_STRATEGIES + 1))


@dataclass(frozen=True)
class Game:
    """An 8x8 zero-sum bimatrix game.

    ``payoff_x[i, j]`` is what X earns when X plays strategy ``i + 1`` and Y
    plays ``j + 1``.  Arrays are made read-only on construction.
    """

    treatment: str
    payoff_x: np.ndarray
    payoff_y: np.ndarray
    labels_x: tuple[str, ...] = field(default_factory=lambda: _default_labels("X"))
    labels_y: tuple[str, ...] = field(default_factory=lambda: _default_labels("Y"))

    def __post_init__(self):
        px = np.array(self.payoff_x, dtype=np.int64)
        py = np.array(self.payoff_y, dtype=np.int64)
        shape = (N_STRATEGIES, N_STRATEGIES)
        if px.shape != shape or py.shape != shape:
            raise GameValidationError(
                f"payoff matrices must be {shape}, got {px.shape} and {py.shape}"
            )
        bad = np.argwhere(px + py != 0)
        if bad.size:
            i, j = bad[0]
            raise GameValidationError(
                f"game {self.treatment!r} is not zero-sum at cell "
                f"(X{i + 1}, Y{j + 1}): {px[i, j]},{py[i, j]}"
            )
        px.setflags(write=False)
        py.setflags(write=False)
        object.__setattr__(self, "payoff_x", px)
        object.__setattr__(self, "payoff_y", py)

    @property
    def n(self) -> int:
        return N_STRATEGIES


@dataclass(frozen=True)
class MixedProfile:
    """A pair of probability vectors on the 8-simplex (X side, Y side)."""

    rho_x: np.ndarray
    rho_y: np.ndarray

    def __post_init__(self):
        rx = _as_simplex(self.rho_x, "rho_x")
        ry = _as_simplex(self.rho_y, "rho_y")
        object.__setattr__(self, "rho_x", rx)
        object.__setattr__(self, "rho_y", ry)

    @classmethod
    def uniform(cls) -> MixedProfile:
        u = np.full(N_STRATEGIES, 1.0 / N_STRATEGIES)
        return cls(u, u.copy())

    @classmethod
    def pure(cls, x: int, y: int) -> MixedProfile:
        """Vertex profile for X playing ``x`` and Y playing ``y`` (1-based)."""
        rx = np.zeros(N_STRATEGIES)
        ry = np.zeros(N_STRATEGIES)
        rx[_check_strategy(x) - 1] = 1.0
        ry[_check_strategy(y) - 1] = 1.0
        return cls(rx, ry)

    @classmethod
    def from_vector(cls, v) -> MixedProfile:
        v = np.asarray(v, dtype=float)
        if v.shape != (N_UNIFIED,):
            raise ValueError(f"expected a {N_UNIFIED}-vector, got shape {v.shape}")
        return cls(v[:N_STRATEGIES], v[N_STRATEGIES:])

    def as_vector(self) -> np.ndarray:
        """Concatenated 16-vector in unified-index order."""
        return np.concatenate([self.rho_x, self.rho_y])


def _as_simplex(v, name: str, tol: float = SIMPLEX_TOL) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.shape != (N_STRATEGIES,):
        raise ValueError(f"{name} must have shape ({N_STRATEGIES},), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min() < 0.0:
        raise ValueError(f"{name} has negative or non-finite components: {arr}")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"{name} sums to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


def _check_strategy(s: int) -> int:
    if not 1 <= int(s) <= N_STRATEGIES:
        raise IndexError(f"strategy index {s} outside 1..{N_STRATEGIES}")
    return int(s)


def load_treatment(id_or_path) -> Game:
    """Return treatment ``A``, ``B`` or ``C``, or parse a custom matrix file."""
    key = str(id_or_path)
    if key.upper() in _TREATMENT_X:
        key = key.upper()
        px = np.array(_TREATMENT_X[key], dtype=np.int64)
        return Game(key, px, -px)
    path = Path(key)
    if path.is_file():
        return read_game_file(path)
    raise KeyError(f"unknown treatment {id_or_path!r}; expected A, B, C or a matrix file")


def read_game_file(path) -> Game:
    """Parse the plain-text custom game format.

    Line 1 holds the treatment name; the next 8 non-blank lines hold 8
    whitespace-separated ``a,b`` integer pairs each.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) != 1 + N_STRATEGIES:
        raise GameValidationError(
            f"{path}: expected a name line and {N_STRATEGIES} matrix rows, "
            f"found {len(lines)} non-blank lines"
        )
    name = lines[0]
    px = np.zeros((N_STRATEGIES, N_STRATEGIES), dtype=np.int64)
    py = np.zeros_like(px)
    for i, row in enumerate(lines[1:]):
        cells = row.replace(";", " ").split()
        if len(cells) != N_STRATEGIES:
            raise GameValidationError(
                f"{path}: row X{i + 1} has {len(cells)} cells, expected {N_STRATEGIES}"
            )
        for j, cell in enumerate(cells):
            try:
                a, b = (int(p.lstrip("*")) for p in cell.split(","))
            except ValueError:
                raise GameValidationError(
                    f"{path}: cannot parse cell (X{i + 1}, Y{j + 1}): {cell!r}"
                ) from None
            px[i, j], py[i, j] = a, b
    return Game(name, px, py)


def payoff(game: Game, i: int, j: int) -> tuple[int, int]:
    """Payoff pair when X plays ``i`` and Y plays ``j`` (both 1-based)."""
    i, j = _check_strategy(i), _check_strategy(j)
    return int(game.payoff_x[i - 1, j - 1]), int(game.payoff_y[i - 1, j - 1])


def expected_payoffs(game: Game, profile: MixedProfile) -> tuple[np.ndarray, np.ndarray]:
    """Expected payoff of every pure strategy against the opponent's mixture."""
    u_x = game.payoff_x @ profile.rho_y
    u_y = game.payoff_y.T @ profile.rho_x
    return u_x.astype(float), u_y.astype(float)


# Unified indexing: X1..X8 -> 1..8, Y1..Y8 -> 9..16.

def unified_index(role: str, strategy: int) -> int:
    strategy = _check_strategy(strategy)
    role = role.upper()
    if role == "X":
        return strategy
    if role == "Y":
        return N_STRATEGIES + strategy
    raise ValueError(f"role must be 'X' or 'Y', got {role!r}")


def role_of(u: int) -> tuple[str, int]:
    """Inverse of :func:`unified_index`."""
    if not 1 <= u <= N_UNIFIED:
        raise IndexError(f"unified index {u} outside 1..{N_UNIFIED}")
    return ("X", u) if u <= N_STRATEGIES else ("Y", u - N_STRATEGIES)


def unified_label(u: int, sep: str = "") -> str:
    role, s = role_of(u)
    return f"{role}{sep}{s}"


def pair_index(m: int, n: int) -> int:
    """Position 1..120 of the pair (m, n), m < n, in lexicographic order."""
    if not (1 <= m < n <= N_UNIFIED):
        raise ValueError(f"pair_index requires 1 <= m < n <= {N_UNIFIED}, got ({m}, {n})")
    before = (m - 1) * N_UNIFIED - (m - 1) * m // 2
    return before + (n - m)


def pair_from_index(x: int) -> tuple[int, int]:
    if not 1 <= x <= N_PAIRS:
        raise IndexError(f"pair index {x} outside 1..{N_PAIRS}")
    return _PAIRS[x - 1]


_PAIRS = tuple(combinations(range(1, N_UNIFIED + 1), 2))
