"""P1 finite elements on a one-dimensional mesh.

Nodal fields, the mass-lumped inner product, Lagrange interpolation,
elementwise gradients and the banded linear algebra shared by both solvers.
Banded matrices are kept in diagonal-ordered storage: ``ab[bw + i - j, j]``
holds ``A[i, j]`` for ``|i - j| <= bw``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg.lapack import dgbtrf, dgbtrs


class MeshMismatchError(ValueError):
    pass


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class Mesh:
    """Strictly increasing node partition of an interval."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a mesh needs at least 2 nodes")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("mesh nodes must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, a: float, b: float, n_nodes: int) -> "Mesh":
        return cls(np.linspace(a, b, n_nodes))

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def element_sizes(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def h(self) -> float:
        """Largest element size."""
        return float(self.element_sizes.max())

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @property
    def lumped_weights(self) -> np.ndarray:
        """Integrals of the nodal hat functions."""
        h = self.element_sizes
        w = np.zeros(self.n_nodes)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        return w

    def quasi_uniformity(self) -> float:
        h = self.element_sizes
        return float(h.max() / h.min())

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        h = self.element_sizes
        return bool(np.all(np.abs(h - h.mean()) <= rtol * h.mean()))

    def same_as(self, other: "Mesh") -> bool:
        return self is other or (
            self.n_nodes == other.n_nodes and np.array_equal(self.nodes, other.nodes)
        )


@dataclass(frozen=True, eq=False)
class NodalField:
    """Coefficients of a continuous piecewise-linear function on ``mesh``."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.n_nodes,):
            raise ValueError(
                f"field has shape {values.shape}, mesh has {self.mesh.n_nodes} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, mesh: Mesh, c: float) -> "NodalField":
        return cls(mesh, np.full(mesh.n_nodes, float(c)))

    def __add__(self, other: "NodalField") -> "NodalField":
        _check_same_mesh(self, other)
        return NodalField(self.mesh, self.values + other.values)

    def __sub__(self, other: "NodalField") -> "NodalField":
        _check_same_mesh(self, other)
        return NodalField(self.mesh, self.values - other.values)

    def __mul__(self, c: float) -> "NodalField":
        return NodalField(self.mesh, c * self.values)

    __rmul__ = __mul__


def _check_same_mesh(a: NodalField, b: NodalField) -> None:
    if not a.mesh.same_as(b.mesh):
        raise MeshMismatchError("fields live on different meshes")


def lumped_product(a: NodalField, b: NodalField) -> float:
    """Discrete inner product ``(a, b)^h``, the integral of the interpolant of ``a*b``."""
    _check_same_mesh(a, b)
    return float(np.dot(a.mesh.lumped_weights, a.values * b.values))


def interpolate(f: Callable[[np.ndarray], np.ndarray], mesh: Mesh) -> NodalField:
    """Lagrange interpolant of ``f``; ``f`` is called on the node array."""
    values = np.asarray(f(mesh.nodes), dtype=float)
    if values.ndim == 0:
        values = np.full(mesh.n_nodes, float(values))
    if not np.all(np.isfinite(values)):
        raise ValueError("interpolated function is not finite at every node")
    return NodalField(mesh, values)


def element_gradient(u: NodalField) -> np.ndarray:
    return np.diff(u.values) / u.mesh.element_sizes


def assemble_weighted_stiffness(weight, mesh: Mesh) -> np.ndarray:
    """Tridiagonal matrix of ``(weight * dx phi_j, dx phi_i)`` for a piecewise-constant weight.

    Returned in diagonal-ordered form of shape ``(3, n_nodes)``: row 0 the
    superdiagonal, row 1 the diagonal, row 2 the subdiagonal.
    """
    weight = np.asarray(weight, dtype=float)
    if weight.shape != (mesh.n_elements,):
        raise ValueError(
            f"need one weight per element ({mesh.n_elements}), got shape {weight.shape}"
        )
    k = weight / mesh.element_sizes
    ab = np.zeros((3, mesh.n_nodes))
    ab[1, :-1] += k
    ab[1, 1:] += k
    ab[0, 1:] = -k
    ab[2, :-1] = -k
    return ab


def tridiag_to_dense(ab: np.ndarray) -> np.ndarray:
    n = ab.shape[1]
    return np.diag(ab[1]) + np.diag(ab[0, 1:], 1) + np.diag(ab[2, :-1], -1)


def add_block(band: np.ndarray, tri: np.ndarray, row_species: int, col_species: int,
              n_species: int = 2) -> None:
    """Add a tridiagonal block into a node-interleaved band matrix in place.

    Unknown ``s`` at node ``j`` sits at global index ``n_species*j + s``.
    """
    bw = (band.shape[0] - 1) // 2
    a, b, m = row_species, col_species, n_species
    d = a - b
    band[bw + d, b::m] += tri[1]
    band[bw - m + d, m + b::m] += tri[0, 1:]
    band[bw + m + d, b:band.shape[1] - m:m] += tri[2, :-1]


def interleave(fields) -> np.ndarray:
    return np.column_stack(fields).ravel()


def deinterleave(x: np.ndarray, n_species: int = 2):
    return tuple(x[s::n_species].copy() for s in range(n_species))


@dataclass
class BandedSystem:
    """Square banded system ``A x = rhs`` with equal lower and upper bandwidth."""

    bandwidth: int
    rows: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.bandwidth < 1:
            raise ValueError("bandwidth must be >= 1")
        if self.rows.shape != (2 * self.bandwidth + 1, self.rhs.size):
            raise ValueError("band storage does not match bandwidth and rhs length")

    @property
    def dim(self) -> int:
        return self.rhs.size

    @classmethod
    def from_dense(cls, A, rhs, bandwidth: int) -> "BandedSystem":
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("matrix must be square")
        rows = np.zeros((2 * bandwidth + 1, n))
        for off in range(-bandwidth, bandwidth + 1):
            diag = np.diagonal(A, -off)
            if off >= 0:
                rows[bandwidth + off, : n - off] = diag
            else:
                rows[bandwidth + off, -off:] = diag
        outside = np.triu(A, bandwidth + 1) + np.tril(A, -bandwidth - 1)
        if np.any(outside != 0):
            raise ValueError("matrix has entries outside the band")
        return cls(bandwidth, rows, rhs)

    def to_dense(self) -> np.ndarray:
        bw, n = self.bandwidth, self.dim
        A = np.zeros((n, n))
        for off in range(-bw, bw + 1):
            if off >= 0:
                A += np.diag(self.rows[bw + off, : n - off], -off)
            else:
                A += np.diag(self.rows[bw + off, -off:], -off)
        return A

    def matvec(self, x: np.ndarray) -> np.ndarray:
        bw, n = self.bandwidth, self.dim
        y = np.zeros(n)
        for off in range(-bw, bw + 1):
            # off = i - j
            if off >= 0:
                y[off:] += self.rows[bw + off, : n - off] * x[: n - off]
            else:
                y[: n + off] += self.rows[bw + off, -off:] * x[-off:]
        return y


PIVOT_RTOL = 1e-14


def solve_banded(system: BandedSystem) -> np.ndarray:
    """Banded LU with partial pivoting (LAPACK ``gbtrf``/``gbtrs``).

    Raises
    ------
    SingularSystemError
        If a pivot falls below ``1e-14 * max|A|``.
    """
    bw, n = system.bandwidth, system.dim
    scale = np.abs(system.rows).max()
    if scale == 0.0 or not np.isfinite(scale):
        raise SingularSystemError("matrix is zero or not finite")
    work = np.zeros((3 * bw + 1, n), order="F")
    work[bw:] = system.rows
    lu, piv, info = dgbtrf(work, bw, bw, overwrite_ab=1)
    if info < 0:
        raise ValueError(f"gbtrf: illegal argument {-info}")
    pivots = np.abs(lu[2 * bw])
    if info > 0 or pivots.min() < PIVOT_RTOL * scale:
        raise SingularSystemError(
            f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} * max|A| = {PIVOT_RTOL * scale:.3e}"
        )
    x, info = dgbtrs(lu, bw, bw, system.rhs.reshape(-1, 1), piv)
    if info != 0:
        raise ValueError(f"gbtrs failed with info={info}")
    return x[:, 0]
