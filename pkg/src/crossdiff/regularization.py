"""Truncation to ``[eps, 1/eps]`` and its elementwise midpoint lift."""

from __future__ import annotations

import numpy as np

from .mesh_fe import NodalField


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps


def lambda_eps(s, eps: float):
    """Clip ``s`` to ``[eps, 1/eps]``. Works on scalars and arrays."""
    eps = check_eps(eps)
    out = np.clip(s, eps, 1.0 / eps)
    return float(out) if np.ndim(out) == 0 else out


def Lambda_eps(z, eps: float) -> np.ndarray:
    """Per-element truncated midpoint value of a P1 field.

    ``z`` may be a :class:`NodalField` or a raw nodal array.
    """
    values = z.values if isinstance(z, NodalField) else np.asarray(z, dtype=float)
    return lambda_eps(0.5 * (values[:-1] + values[1:]), eps)
