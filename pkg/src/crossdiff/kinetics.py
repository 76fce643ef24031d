"""Lotka-Volterra reaction terms and the environmental drift."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ND = "ND"
D = "D"


@dataclass(frozen=True)
class LotkaVolterraParams:
    """Growth rates ``alpha[i]`` and competition matrix ``beta[i][j]``.

    Mode ``"ND"`` (no differentiation after splitting) requires equal growth
    rates and a constant competition matrix; mode ``"D"`` is unrestricted.
    """

    alpha: tuple = (0.0, 0.0)
    beta: tuple = ((0.0, 0.0), (0.0, 0.0))
    mode: str = D

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(tuple(float(b) for b in row) for row in self.beta)
        if len(alpha) != 2 or len(beta) != 2 or any(len(r) != 2 for r in beta):
            raise ValueError("alpha must have 2 entries and beta must be 2x2")
        if not np.all(np.isfinite(alpha)) or not np.all(np.isfinite(beta)):
            raise ValueError("Lotka-Volterra coefficients must be finite")
        if self.mode not in (ND, D):
            raise ValueError(f"mode must be 'ND' or 'D', got {self.mode!r}")
        if self.mode == ND:
            flat = [b for row in beta for b in row]
            if alpha[0] != alpha[1] or len(set(flat)) != 1:
                raise ValueError("ND mode needs alpha_1 == alpha_2 and all beta_ij equal")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def nondifferentiated(cls, alpha: float, beta: float) -> "LotkaVolterraParams":
        return cls((alpha, alpha), ((beta, beta), (beta, beta)), ND)

    @classmethod
    def zero(cls) -> "LotkaVolterraParams":
        return cls.nondifferentiated(0.0, 0.0)

    @classmethod
    def invasion(cls) -> "LotkaVolterraParams":
        """alpha_i = 1, beta_ij = i."""
        return cls((1.0, 1.0), ((1.0, 1.0), (2.0, 2.0)), D)

    @property
    def is_zero(self) -> bool:
        return not any(self.alpha) and not any(b for row in self.beta for b in row)


def f_i(i: int, u1, u2, p: LotkaVolterraParams):
    """Reaction rate of species ``i`` (1 or 2)."""
    if i not in (1, 2):
        raise ValueError("species index must be 1 or 2")
    a = p.alpha[i - 1]
    b1, b2 = p.beta[i - 1]
    ui = u1 if i == 1 else u2
    return ui * (a - (b1 * u1 + b2 * u2))


def F(u1, u2, p: LotkaVolterraParams):
    return f_i(1, u1, u2, p) + f_i(2, u1, u2, p)


def F1_F2(u, r, p: LotkaVolterraParams):
    """Reaction terms of the total-density / fraction formulation.

    ``F2 = r(1-r)(f1/(ru) - f2/((1-r)u))`` is evaluated in cancelled form,
    so ``r`` in ``{0, 1}`` needs no special casing.
    """
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(u <= 0):
        raise ValueError("total density must be positive")
    u1, u2 = r * u, (1.0 - r) * u
    F1 = F(u1, u2, p)
    (a1, a2), ((b11, b12), (b21, b22)) = p.alpha, p.beta
    g1 = a1 - b11 * u1 - b12 * u2
    g2 = a2 - b21 * u1 - b22 * u2
    F2 = r * (1.0 - r) * (g1 - g2)
    if F1.ndim == 0:
        return float(F1), float(F2)
    return F1, F2


@dataclass(frozen=True)
class DriftField:
    """Environmental drift ``q(t, x)``, required to vanish on the boundary."""

    q: Callable = field(default=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)))
    is_zero: bool = True

    @classmethod
    def zero(cls) -> "DriftField":
        return cls()

    @classmethod
    def from_function(cls, q: Callable) -> "DriftField":
        return cls(q=q, is_zero=False)

    def nodal(self, t: float, x: np.ndarray) -> np.ndarray:
        if self.is_zero:
            return np.zeros_like(x)
        return np.broadcast_to(np.asarray(self.q(t, x), dtype=float), x.shape).copy()

    def check_boundary(self, t: float, a: float, b: float, atol: float = 1e-12) -> None:
        ends = self.nodal(t, np.array([a, b]))
        if np.any(np.abs(ends) > atol):
            raise ValueError(f"drift must vanish on the boundary, got q={ends} at t={t}")
