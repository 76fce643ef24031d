"""Space-independent splitting models: logistic growth, then two-species Lotka-Volterra."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kinetics import ND, LotkaVolterraParams, f_i


class IntegrationError(RuntimeError):
    pass


def _rk4(rhs, y0, t0, n_steps, dt):
    t = t0 + dt * np.arange(n_steps + 1)
    y = np.empty((n_steps + 1, np.size(y0)))
    y[0] = y0
    cur = np.array(y0, dtype=float)
    for n in range(n_steps):
        k1 = rhs(cur)
        k2 = rhs(cur + 0.5 * dt * k1)
        k3 = rhs(cur + 0.5 * dt * k2)
        k4 = rhs(cur + dt * k3)
        cur = cur + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(cur)):
            raise IntegrationError(f"solution blew up at t={t[n + 1]:g}")
        y[n + 1] = cur
    return t, y


def _n_steps(span, dt):
    if not dt > 0:
        raise ValueError("dt must be positive")
    if span < 0:
        raise ValueError("integration interval must be non-negative")
    return int(round(span / dt))


def simulate_logistic(alpha: float, beta: float, U0: float, t_end: float, dt: float = 1e-3):
    """Integrate ``U' = U(alpha - beta U)`` with fixed-step RK4.

    The step is the grid ``k*dt``; ``t_end`` is rounded to the nearest grid point.

    Returns
    -------
    t, U : ndarray
    """
    if not U0 > 0:
        raise ValueError("U0 must be positive")
    n = _n_steps(t_end, dt)
    t, y = _rk4(lambda U: U * (alpha - beta * U), [U0], 0.0, n, dt)
    return t, y[:, 0]


def logistic_exact(alpha: float, beta: float, U0: float, t):
    e = np.exp(alpha * np.asarray(t))
    return alpha * U0 * e / (alpha + beta * U0 * (e - 1.0))


@dataclass(frozen=True)
class SplitScenario:
    alpha_pre: float
    beta_pre: float
    U0: float
    t_star: float
    T: float
    post_params: LotkaVolterraParams
    theta: float = 0.5

    def __post_init__(self):
        if not self.U0 > 0:
            raise ValueError("U0 must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if not 0.0 <= self.t_star < self.T:
            raise ValueError("need 0 <= t_star < T")

    @property
    def split_fractions(self):
        return self.theta, 1.0 - self.theta


@dataclass
class SplitTrajectory:
    """``U`` is the total density on the whole grid; ``U1``/``U2`` are NaN before the split."""

    t: np.ndarray
    U: np.ndarray
    U1: np.ndarray
    U2: np.ndarray
    split_index: int


def simulate_split(scenario: SplitScenario, dt: float = 1e-3) -> SplitTrajectory:
    s = scenario
    t_pre, U_pre = simulate_logistic(s.alpha_pre, s.beta_pre, s.U0, s.t_star, dt)
    U_split = U_pre[-1]
    n_post = _n_steps(s.T - t_pre[-1], dt)
    p = s.post_params

    def rhs(y):
        return np.array([f_i(1, y[0], y[1], p), f_i(2, y[0], y[1], p)])

    y0 = [s.theta * U_split, (1.0 - s.theta) * U_split]
    t_post, y = _rk4(rhs, y0, t_pre[-1], n_post, dt)

    k = t_pre.size - 1
    t = np.concatenate([t_pre[:-1], t_post])
    nan = np.full(k, np.nan)
    U1 = np.concatenate([nan, y[:, 0]])
    U2 = np.concatenate([nan, y[:, 1]])
    U = np.concatenate([U_pre[:-1], y[:, 0] + y[:, 1]])
    return SplitTrajectory(t, U, U1, U2, k)


@dataclass
class Equilibria:
    """Isolated non-negative equilibria plus an optional line ``a U1 + b U2 = c`` of them."""

    points: list = field(default_factory=list)
    continuum: tuple | None = None
    degenerate: bool = False

    def __contains__(self, pt):
        return any(np.allclose(pt, q, atol=1e-12) for q in self.points)


def equilibria(p: LotkaVolterraParams) -> Equilibria:
    (a1, a2), ((b11, b12), (b21, b22)) = p.alpha, p.beta
    if p.mode == ND:
        a, b = a1, b11
        if b == 0:
            return Equilibria([(0.0, 0.0)], degenerate=True)
        return Equilibria([(0.0, 0.0)], continuum=(1.0, 1.0, a / b))

    pts = [(0.0, 0.0)]
    if b11 != 0 and a1 / b11 > 0:
        pts.append((a1 / b11, 0.0))
    if b22 != 0 and a2 / b22 > 0:
        pts.append((0.0, a2 / b22))

    det = b11 * b22 - b12 * b21
    continuum = None
    degenerate = det == 0
    if not degenerate:
        u1 = (a1 * b22 - b12 * a2) / det
        u2 = (b11 * a2 - b21 * a1) / det
        if u1 > 0 and u2 > 0:
            pts.append((u1, u2))
    else:
        # rows proportional: either a line of interior equilibria or none
        rank_aug = np.linalg.matrix_rank(np.array([[b11, b12, a1], [b21, b22, a2]]))
        if rank_aug == 1 and (b11 or b12):
            continuum = (b11, b12, a1)
    return Equilibria(pts, continuum, degenerate)
