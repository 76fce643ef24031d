"""Barenblatt-based segregated exact solution and the initial data of both experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh_fe import Mesh, NodalField

SQRT12 = np.sqrt(12.0)
BARENBLATT_MASS = 8.0 / 3.0 * SQRT12


@dataclass(frozen=True)
class BarenblattParams:
    """Time offset ``t_star``, initial contact point ``x0`` and half-length ``L`` of (-L, L)."""

    t_star: float = 0.01
    x0: float = -0.25
    L: float = 2.0

    def __post_init__(self):
        if not self.t_star > 0:
            raise ValueError("t_star must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not abs(self.x0) < support_radius(0.0, self):
            raise ValueError("x0 must lie inside the initial support")

    def horizon_ok(self, T: float) -> bool:
        """True when the support stays strictly inside (-L, L) on [0, T]."""
        return support_radius(T, self) < self.L


def support_radius(t, p: BarenblattParams):
    return SQRT12 * np.cbrt(t + p.t_star)


def barenblatt(t, x, p: BarenblattParams):
    """Porous-medium source solution shifted by ``t_star``; keeps extended-precision input."""
    dtype = np.result_type(np.asarray(t).dtype, np.asarray(x).dtype, np.float64)
    s = np.asarray(t, dtype=dtype) + dtype.type(p.t_star)
    x = np.asarray(x, dtype=dtype)
    third = dtype.type(1) / 3
    out = 2 * s ** (-third) * np.maximum(1 - x**2 * s ** (-2 * third) / 12, 0)
    if out.ndim == 0:
        return float(out) if dtype == np.float64 else out[()]
    return out


def eta(t, p: BarenblattParams):
    """Position of the contact point."""
    return p.x0 * np.cbrt(1.0 + np.asarray(t, dtype=float) / p.t_star)


def segregated_solution(t, x, p: BarenblattParams):
    """``(u1, u2) = (H(x - eta) B, H(eta - x) B)`` with ``H(0) = 1/2``."""
    B = barenblatt(t, x, p)
    d = np.asarray(x, dtype=float) - eta(t, p)
    u1 = np.heaviside(d, 0.5) * B
    u2 = np.heaviside(-d, 0.5) * B
    if np.ndim(u1) == 0:
        return float(u1), float(u2)
    return u1, u2


def experiment1_initial(mesh: Mesh):
    """Gaussian patch of the invading species over a uniform background."""
    x = mesh.nodes
    u10 = 0.22 * np.exp(-((x - 0.25) ** 2) / 0.001)
    return NodalField(mesh, u10), NodalField(mesh, 0.45 - u10)


def experiment2_initial(mesh: Mesh, p: BarenblattParams):
    """Segregated Barenblatt data and the matching species fraction.

    The fraction is ``H(x - x0)``, the zero-regularization limit of
    ``u10 / (u10 + u20)``; nodes on ``x0`` get 1/2.
    """
    x = mesh.nodes
    u10, u20 = segregated_solution(0.0, x, p)
    r0 = np.heaviside(x - p.x0, 0.5)
    return NodalField(mesh, u10), NodalField(mesh, u20), NodalField(mesh, r0)
