"""Oscillation measure, errors against exact solutions and conservation monitors."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional

import numpy as np

from .mesh_fe import NodalField, lumped_product

DENOM_FLOOR = 1e-14


@dataclass
class DiagnosticsRecord:
    time: float
    osc_u: float
    mass_u1: float
    mass_u2: float
    min_u: float
    max_u: float
    rel_l2_err: Optional[float] = None
    inner_iters: int = 0

    def as_dict(self):
        return asdict(self)


CSV_COLUMNS = ("t", "osc_u", "mass_u1", "mass_u2", "min_u", "max_u", "rel_l2_err", "inner_iters")
assert len(CSV_COLUMNS) == len(fields(DiagnosticsRecord))


def osc(u: NodalField) -> float:
    """``h * sum |diff(sign(diff(u)))|`` on a uniform mesh, with ``sign(0) = 0``."""
    mesh = u.mesh
    if not mesh.is_uniform():
        raise ValueError("osc is only defined on uniform meshes")
    s = np.sign(np.diff(u.values))
    return float(mesh.element_sizes[0] * np.abs(np.diff(s)).sum())


def lumped_norm(u: NodalField) -> float:
    return float(np.sqrt(lumped_product(u, u)))


def relative_l2_error(u: NodalField, exact: Callable, t: float) -> float:
    """Lumped L2 distance to the interpolant of ``exact(t, .)``, relative to its norm.

    Falls back to the absolute distance if the exact norm is below 1e-14.
    """
    ref = NodalField(u.mesh, exact(t, u.mesh.nodes))
    num = lumped_norm(u - ref)
    den = lumped_norm(ref)
    return num if den < DENOM_FLOOR else num / den


def discrete_mass(u: NodalField) -> float:
    return float(np.dot(u.mesh.lumped_weights, u.values))
