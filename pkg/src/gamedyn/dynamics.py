"""Two-population logit dynamics: simulation, rest points and linearization."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .game import N_STRATEGIES, N_UNIFIED, Game, MixedProfile

_N = N_STRATEGIES
PROFILE_TOL = 1e-6


@dataclass(frozen=True)
class SimConfig:
    """Parameters of the logit simulation.

    ``lam`` is the logit precision; ``payoff_scale`` multiplies the stored
    matrix entries before they enter the choice rule (``1/6`` gives base
    payoff units).
    """

    lam: float = 50.0
    dt: float = 0.02
    rounds: int = 1000
    sessions: int = 12
    payoff_scale: float = 1.0
    master_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.dt <= 1.0:
            raise ValueError(f"dt must lie in (0, 1], got {self.dt}")
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise ValueError(f"rounds must be a positive integer, got {self.rounds}")
        if int(self.sessions) != self.sessions or self.sessions < 1:
            raise ValueError(f"sessions must be a positive integer, got {self.sessions}")
        if not np.isfinite(self.payoff_scale):
            raise ValueError(f"payoff_scale must be finite, got {self.payoff_scale}")
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ValueError(f"master_seed must be a non-negative integer, got {self.master_seed}")

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "dt": self.dt,
            "rounds": int(self.rounds),
            "sessions": int(self.sessions),
            "payoff_scale": self.payoff_scale,
            "master_seed": int(self.master_seed),
        }


@dataclass(frozen=True)
class SessionSeries:
    """Round-indexed profiles of one session.

    ``profiles[t - 1]`` is the unified 16-vector of round ``t``.
    """

    session_id: int
    origin: str
    profiles: np.ndarray
    initial: np.ndarray | None = None

    def __post_init__(self):
        if self.origin not in ("simulated", "experimental"):
            raise ValueError(f"origin must be 'simulated' or 'experimental', got {self.origin!r}")
        p = np.array(self.profiles, dtype=float)
        if p.ndim != 2 or p.shape[1] != N_UNIFIED or p.shape[0] < 1:
            raise ValueError(f"profiles must have shape (T, {N_UNIFIED}), got {p.shape}")
        check_profiles(p, f"session {self.session_id}")
        p.setflags(write=False)
        object.__setattr__(self, "profiles", p)
        if self.initial is not None:
            init = np.array(self.initial, dtype=float)
            init.setflags(write=False)
            object.__setattr__(self, "initial", init)

    @property
    def n_rounds(self) -> int:
        return self.profiles.shape[0]

    def profile(self, t: int) -> MixedProfile:
        if not 1 <= t <= self.n_rounds:
            raise IndexError(f"round {t} outside 1..{self.n_rounds}")
        return MixedProfile.from_vector(self.profiles[t - 1])


def check_profiles(p: np.ndarray, where: str = "", tol: float = PROFILE_TOL) -> None:
    """Raise ``ValueError`` if any row of ``p`` is off the product of simplices."""
    if not np.all(np.isfinite(p)) or p.min() < 0.0:
        bad = int(np.argwhere(~np.isfinite(p) | (p < 0))[0, 0])
        raise ValueError(f"{where}: round {bad + 1} has negative or non-finite probabilities")
    sums = np.stack([p[:, :_N].sum(axis=1), p[:, _N:].sum(axis=1)], axis=1)
    off = np.argwhere(np.abs(sums - 1.0) > tol)
    if off.size:
        t, r = off[0]
        role = "X" if r == 0 else "Y"
        raise ValueError(f"{where}: round {t + 1} {role} probabilities sum to {sums[t, r]!r}")


def stack(ensemble) -> np.ndarray:
    """Profiles of an ensemble as an array of shape (sessions, T, 16)."""
    if not ensemble:
        raise ValueError("empty ensemble")
    lengths = {s.n_rounds for s in ensemble}
    if len(lengths) != 1:
        raise ValueError(f"sessions have unequal lengths {sorted(lengths)}")
    return np.stack([s.profiles for s in ensemble])


def logit_choice(payoffs, lam: float) -> np.ndarray:
    """Softmax of ``lam * payoffs``, evaluated after subtracting the maximum."""
    u = np.asarray(payoffs, dtype=float)
    if lam == 0.0:
        return np.full(u.shape, 1.0 / u.size)
    z = lam * (u - u.max())
    w = np.exp(z)
    return w / w.sum()


def _scaled(game: Game, cfg: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    s = cfg.payoff_scale
    return s * game.payoff_x.astype(float), s * game.payoff_y.T.astype(float)


def _choice_vector(ax: np.ndarray, ay: np.ndarray, z: np.ndarray, lam: float) -> np.ndarray:
    x, y = z[:_N], z[_N:]
    return np.concatenate([logit_choice(ax @ y, lam), logit_choice(ay @ x, lam)])


def velocity(game: Game, z, cfg: SimConfig) -> np.ndarray:
    """Continuous-time logit mean dynamic ``logit(U(z)) - z`` at the 16-vector ``z``."""
    ax, ay = _scaled(game, cfg)
    z = np.asarray(z, dtype=float)
    return _choice_vector(ax, ay, z, cfg.lam) - z


def jacobian(game: Game, z, cfg: SimConfig) -> np.ndarray:
    """Analytic Jacobian of :func:`velocity`."""
    ax, ay = _scaled(game, cfg)
    z = np.asarray(z, dtype=float)
    sx = logit_choice(ax @ z[_N:], cfg.lam)
    sy = logit_choice(ay @ z[:_N], cfg.lam)
    j = -np.eye(N_UNIFIED)
    j[:_N, _N:] = cfg.lam * (np.diag(sx) - np.outer(sx, sx)) @ ax
    j[_N:, :_N] = cfg.lam * (np.diag(sy) - np.outer(sy, sy)) @ ay
    return j


def step(game: Game, profile: MixedProfile, cfg: SimConfig) -> MixedProfile:
    """One explicit Euler step of length ``dt``; both roles move simultaneously."""
    z = profile.as_vector()
    new = _euler(*_scaled(game, cfg), z, cfg)
    return MixedProfile.from_vector(new)


def _euler(ax, ay, z, cfg: SimConfig) -> np.ndarray:
    new = (1.0 - cfg.dt) * z + cfg.dt * _choice_vector(ax, ay, z, cfg.lam)
    # remove the last-bit drift of the sums so long runs stay on the simplex
    new[:_N] /= new[:_N].sum()
    new[_N:] /= new[_N:].sum()
    return new


def session_rng(master_seed: int, session_id: int) -> np.random.Generator:
    """Independent stream for one session, keyed by ``(master_seed, session_id)``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(session_id),))
    return np.random.default_rng(ss)


def random_initial(master_seed: int, session_id: int) -> np.ndarray:
    """Uniform draw from the product of the two 8-simplices."""
    rng = session_rng(master_seed, session_id)
    ones = np.ones(_N)
    return np.concatenate([rng.dirichlet(ones), rng.dirichlet(ones)])


def simulate(game: Game, cfg: SimConfig, session_id: int, initial=None) -> SessionSeries:
    """Run one session of ``cfg.rounds`` Euler steps.

    The profile after step ``t`` is stored as round ``t``.  Without an explicit
    ``initial`` 16-vector the start is a seeded uniform draw.
    """
    if initial is None:
        z = random_initial(cfg.master_seed, session_id)
    else:
        z = MixedProfile.from_vector(initial).as_vector()
    start = z.copy()
    ax, ay = _scaled(game, cfg)
    out = np.empty((int(cfg.rounds), N_UNIFIED))
    for t in range(int(cfg.rounds)):
        z = _euler(ax, ay, z, cfg)
        out[t] = z
    return SessionSeries(session_id, "simulated", out, start)


def ensemble(game: Game, cfg: SimConfig, workers: int = 1) -> list[SessionSeries]:
    """Sessions ``1..cfg.sessions``, returned in session order for any worker count."""
    ids = range(1, int(cfg.sessions) + 1)
    if workers <= 1:
        return [simulate(game, cfg, k) for k in ids]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: simulate(game, cfg, k), ids))


@dataclass(frozen=True)
class RestPoint:
    profile: MixedProfile
    residual: float
    converged: bool
    iterations: int
    method: str


def _barycenter() -> np.ndarray:
    return np.full(N_UNIFIED, 1.0 / _N)


def _damped_iteration(ax, ay, lam, z, alpha, tol, max_iter, stall):
    best_z, best_r = z.copy(), np.inf
    since_best = 0
    for it in range(1, max_iter + 1):
        c = _choice_vector(ax, ay, z, lam)
        r = float(np.linalg.norm(c - z))
        if r < best_r:
            if r < 0.5 * best_r:
                since_best = 0
            best_z, best_r = z.copy(), r
        else:
            since_best += 1
        if r <= tol:
            return z, r, it, True
        if stall and since_best >= stall:
            return best_z, best_r, it, False
        z = (1.0 - alpha) * z + alpha * c
    return best_z, best_r, max_iter, False


def _dlogit(sigma: np.ndarray, lam: float) -> np.ndarray:
    return lam * (np.diag(sigma) - np.outer(sigma, sigma))


def _profile_from_payoff(ax, ay, v, lam):
    x = logit_choice(v, lam)
    y = logit_choice(ay @ x, lam)
    return x, y


def _newton_payoff(ax, ay, lam, v, tol=1e-13, max_iter=200):
    # Rest points correspond to zeros of H(v) = ax @ y(x(v)) - v, where v is
    # X's payoff vector; working in payoff space avoids positivity constraints.
    def h(v):
        x, y = _profile_from_payoff(ax, ay, v, lam)
        return ax @ y - v, x, y

    f, x, y = h(v)
    r = float(np.linalg.norm(f))
    for _ in range(max_iter):
        if r <= tol:
            break
        jac = ax @ _dlogit(y, lam) @ ay @ _dlogit(x, lam) - np.eye(_N)
        d = np.linalg.solve(jac, -f)
        t = 1.0
        while t > 1e-12:
            fc, xc, yc = h(v + t * d)
            rc = float(np.linalg.norm(fc))
            if rc < r:
                break
            t *= 0.5
        else:
            break
        v, f, x, y, r = v + t * d, fc, xc, yc, rc
    return v, r


def find_rest_point(
    game: Game,
    cfg: SimConfig,
    alpha: float = 0.1,
    tol: float = 1e-12,
    max_iter: int = 10**6,
    stall: int | None = 5000,
) -> RestPoint:
    """Zero of the logit velocity field.

    Damped fixed-point iteration from the barycenter is tried first.  Where it
    stalls (it can orbit forever around a focus) the point is found by Newton
    continuation in the precision parameter, starting from the uniform rest
    point at precision 0.
    """
    ax, ay = _scaled(game, cfg)
    z0 = _barycenter()
    z, r, it, ok = _damped_iteration(ax, ay, cfg.lam, z0, alpha, tol, max_iter, stall)
    if ok:
        return RestPoint(MixedProfile.from_vector(_renorm(z)), r, True, it, "damped")
    v = ax @ z0[_N:]
    for lam in np.linspace(0.0, cfg.lam, 201)[1:]:
        v, _ = _newton_payoff(ax, ay, float(lam), v)
    zc = np.concatenate(_profile_from_payoff(ax, ay, v, cfg.lam))
    rc = float(np.linalg.norm(_choice_vector(ax, ay, zc, cfg.lam) - zc))
    if rc < r:
        z, r = zc, rc
    return RestPoint(MixedProfile.from_vector(_renorm(z)), r, r <= max(tol, 1e-12), it, "continuation")


def _renorm(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, 0.0, None)
    z[:_N] /= z[:_N].sum()
    z[_N:] /= z[_N:].sum()
    return z


def tangent_basis() -> np.ndarray:
    """Orthonormal 16x14 basis of vectors whose X part and Y part each sum to 0."""
    block = np.linalg.qr(np.vstack([np.eye(_N - 1), -np.ones((1, _N - 1))]))[0]
    q = np.zeros((N_UNIFIED, 2 * (_N - 1)))
    q[:_N, : _N - 1] = block
    q[_N:, _N - 1 :] = block
    return q


@dataclass(frozen=True)
class EigenSystem:
    rest_point: MixedProfile
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    velocity_norm_at_rest: float
    jacobian: np.ndarray
    tangent_eigenvalues: np.ndarray = field(default_factory=lambda: np.empty(0, complex))


def numeric_jacobian(game: Game, z, cfg: SimConfig, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of :func:`velocity`."""
    z = np.asarray(z, dtype=float)
    j = np.empty((N_UNIFIED, N_UNIFIED))
    for k in range(N_UNIFIED):
        e = np.zeros(N_UNIFIED)
        e[k] = h
        j[:, k] = (velocity(game, z + e, cfg) - velocity(game, z - e, cfg)) / (2 * h)
    return j


def _sorted_eig(j: np.ndarray):
    vals, vecs = np.linalg.eig(j)
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order], vecs[:, order]


def linearize(game: Game, cfg: SimConfig, at: MixedProfile, h: float = 1e-6) -> EigenSystem:
    """Eigen-decomposition of the finite-difference Jacobian at a rest point."""
    z = at.as_vector()
    vnorm = float(np.linalg.norm(velocity(game, z, cfg)))
    if vnorm > 1e-6:
        raise ValueError(f"linearize needs a rest point; velocity norm there is {vnorm:.3e}")
    j = numeric_jacobian(game, z, cfg, h)
    try:
        vals, vecs = _sorted_eig(j)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigendecomposition failed (cond={np.linalg.cond(j):.3e}): {exc}") from exc
    norms = np.linalg.norm(vecs, axis=0)
    res = np.linalg.norm(j @ vecs - vecs * vals, axis=0) / norms
    if res.max() > 1e-6:
        raise np.linalg.LinAlgError(
            f"eigenpair residual {res.max():.3e} exceeds 1e-6 (cond={np.linalg.cond(j):.3e})"
        )
    q = tangent_basis()
    tvals, _ = _sorted_eig(q.T @ j @ q)
    return EigenSystem(at, vals, vecs, vnorm, j, tvals)
