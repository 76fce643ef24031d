"""Semi-implicit P1 scheme for the viscosity-regularized two-species system.

Each time step solves, by fixed-point iteration, the coupled linear system

    (u_i^k - u_i^{n-1}, chi)^h / tau
      + (1 + delta/2) (A_i dx(u_1^k + u_2^k), dx chi)
      + delta/2 ((A_1 + A_2) dx u_i^k, dx chi)
      + (q A_i, dx chi)
      = (alpha_i u_i^k - lam(u_i^{k-1}) (beta_i1 lam(u_1^{n-1}) + beta_i2 lam(u_2^{n-1})), chi)^h

with ``A_i`` the truncated midpoint value of ``u_i^{k-1}`` on each element.
Unknowns are interleaved node by node, giving a band of half-width 3.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .diagnostics import DiagnosticsRecord, discrete_mass, osc, relative_l2_error
from .kinetics import DriftField, LotkaVolterraParams
from .mesh_fe import (
    BandedSystem,
    Mesh,
    NodalField,
    add_block,
    assemble_weighted_stiffness,
    deinterleave,
    interleave,
    solve_banded,
)
from .regularization import Lambda_eps, check_eps, lambda_eps

log = logging.getLogger(__name__)

POSITIVITY_FLOOR = -1e-10


class FixedPointError(RuntimeError):
    """Inner iteration hit ``max_inner`` without meeting the tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
        self.trajectory = None


@dataclass(frozen=True)
class SchemeParams:
    tau: float
    T: float
    delta: float = 0.0
    eps: float = 1e-10
    tol: float = 1e-8
    max_inner: int = 100

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.T >= 0:
            raise ValueError("T must be non-negative")
        if not self.delta >= 0:
            raise ValueError("delta must be non-negative")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_inner < 1:
            raise ValueError("max_inner must be >= 1")
        check_eps(self.eps)

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.tau))


@dataclass(frozen=True)
class PdeltaState:
    u1: NodalField
    u2: NodalField
    time: float = 0.0
    inner_iterations_used: tuple = ()

    @property
    def mesh(self) -> Mesh:
        return self.u1.mesh

    @property
    def u(self) -> NodalField:
        return self.u1 + self.u2


@dataclass
class StepInfo:
    iterations: int
    residual: float
    previous_iterate: tuple  # (u1^{k-1}, u2^{k-1}) of the accepted iterate


@dataclass
class Trajectory:
    """Snapshots at requested times plus one diagnostics record per time step."""

    mesh: Mesh
    snapshot_times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    records: list = field(default_factory=list)
    step_infos: list = field(default_factory=list)
    r_min: Optional[float] = None
    r_max: Optional[float] = None

    @property
    def final(self):
        return self.snapshots[-1]


def transport_load(mesh: Mesh, q_nodal: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Nodal vector of ``(pi(q) * weight, dx phi_m)`` for piecewise-constant ``weight``."""
    c = 0.5 * (q_nodal[:-1] + q_nodal[1:]) * weight
    out = np.zeros(mesh.n_nodes)
    out[:-1] -= c
    out[1:] += c
    return out


def _competition(i, u_prev_iter, u1_old, u2_old, lv, eps):
    b1, b2 = lv.beta[i]
    return lambda_eps(u_prev_iter, eps) * (b1 * lambda_eps(u1_old, eps) + b2 * lambda_eps(u2_old, eps))


def assemble_pdelta(mesh, u1_old, u2_old, u1_k, u2_k, p, lv, q_nodal) -> BandedSystem:
    """Coupled linear system for one inner iteration (raw nodal arrays in, interleaved system out)."""
    n = mesh.n_nodes
    w = mesh.lumped_weights
    A = (Lambda_eps(u1_k, p.eps), Lambda_eps(u2_k, p.eps))
    K = [assemble_weighted_stiffness(a, mesh) for a in A]
    Ks = K[0] + K[1]
    cross = 1.0 + 0.5 * p.delta
    band = np.zeros((7, 2 * n))
    for i in range(2):
        for j in range(2):
            add_block(band, cross * K[i], i, j)
        block = 0.5 * p.delta * Ks
        block[1] += w / p.tau - lv.alpha[i] * w
        add_block(band, block, i, i)

    olds = (u1_old, u2_old)
    iters = (u1_k, u2_k)
    rhs = []
    for i in range(2):
        r = w * olds[i] / p.tau
        r -= w * _competition(i, iters[i], u1_old, u2_old, lv, p.eps)
        if q_nodal is not None:
            r -= transport_load(mesh, q_nodal, A[i])
        rhs.append(r)
    return BandedSystem(3, band, interleave(rhs))


def pdelta_step(state: PdeltaState, p: SchemeParams, lv: LotkaVolterraParams,
                q: DriftField = DriftField(), return_info: bool = False):
    """Advance one time step; iterate until ``max_i |u_i^k - u_i^{k-1}|_inf < tol``.

    Raises
    ------
    FixedPointError
        After ``p.max_inner`` iterations without convergence.
    """
    mesh = state.mesh
    t_new = state.time + p.tau
    q_nodal = None if q.is_zero else q.nodal(t_new, mesh.nodes)
    u1_old, u2_old = state.u1.values, state.u2.values
    u1_k, u2_k = u1_old, u2_old
    residual = np.inf
    for k in range(1, p.max_inner + 1):
        system = assemble_pdelta(mesh, u1_old, u2_old, u1_k, u2_k, p, lv, q_nodal)
        u1_new, u2_new = deinterleave(solve_banded(system))
        residual = max(np.abs(u1_new - u1_k).max(), np.abs(u2_new - u2_k).max())
        prev = (u1_k, u2_k)
        u1_k, u2_k = u1_new, u2_new
        if residual < p.tol:
            break
    else:
        raise FixedPointError(
            f"no convergence at t={t_new:g} after {p.max_inner} iterations "
            f"(residual {residual:.3e})",
            residual,
        )
    if min(u1_k.min(), u2_k.min()) < POSITIVITY_FLOOR:
        log.debug("negative density %.3e at t=%g", min(u1_k.min(), u2_k.min()), t_new)
    new = PdeltaState(
        NodalField(mesh, u1_k),
        NodalField(mesh, u2_k),
        t_new,
        state.inner_iterations_used + (k,),
    )
    if return_info:
        return new, StepInfo(k, float(residual), prev)
    return new


def summed_system_residual(old: PdeltaState, new: PdeltaState, previous_iterate,
                           p: SchemeParams, lv: LotkaVolterraParams,
                           q: DriftField = DriftField()) -> float:
    """Residual of ``u1 + u2`` in the single-density scheme with diffusion ``1 + delta``.

    Assembled independently of :func:`assemble_pdelta`; only meaningful for
    non-differentiated kinetics, where the two species equations add up to
    one equation for the total density. Normalised by ``1 + |rhs|_inf``.
    """
    mesh = old.mesh
    w = mesh.lumped_weights
    u1_k, u2_k = previous_iterate
    A = Lambda_eps(u1_k, p.eps) + Lambda_eps(u2_k, p.eps)
    K = (1.0 + p.delta) * assemble_weighted_stiffness(A, mesh)
    K[1] += w / p.tau - lv.alpha[0] * w
    u1_old, u2_old = old.u1.values, old.u2.values
    rhs = w * (u1_old + u2_old) / p.tau
    beta = lv.beta[0][0]
    rhs -= w * beta * (lambda_eps(u1_k, p.eps) + lambda_eps(u2_k, p.eps)) * (
        lambda_eps(u1_old, p.eps) + lambda_eps(u2_old, p.eps)
    )
    if not q.is_zero:
        rhs -= transport_load(mesh, q.nodal(new.time, mesh.nodes), A)
    u = new.u1.values + new.u2.values
    Ku = K[1] * u
    Ku[:-1] += K[0, 1:] * u[1:]
    Ku[1:] += K[2, :-1] * u[:-1]
    return float(np.abs(Ku - rhs).max() / (1.0 + np.abs(rhs).max()))


def snapshot_indices(times, p: SchemeParams):
    n = p.n_steps
    out = {}
    for t in times:
        if t < -1e-12 or t > p.T + 1e-12:
            raise ValueError(f"snapshot time {t} outside [0, T]")
        out.setdefault(min(int(round(t / p.tau)), n), float(t))
    return out


def pdelta_record(state: PdeltaState, exact: Optional[Callable] = None,
                  iters: int = 0) -> DiagnosticsRecord:
    u = state.u
    return DiagnosticsRecord(
        time=state.time,
        osc_u=osc(u),
        mass_u1=discrete_mass(state.u1),
        mass_u2=discrete_mass(state.u2),
        min_u=float(min(state.u1.values.min(), state.u2.values.min())),
        max_u=float(u.values.max()),
        rel_l2_err=None if exact is None else relative_l2_error(u, exact, state.time),
        inner_iters=iters,
    )


def pdelta_run(mesh: Mesh, initial, p: SchemeParams, lv: LotkaVolterraParams,
               q: DriftField = DriftField(), snapshot_times=None,
               exact: Optional[Callable] = None, keep_step_info: bool = False) -> Trajectory:
    """Uniform time stepping from ``initial = (u1_0, u2_0)`` up to ``p.T``.

    ``exact(t, x)``, if given, is the exact total density used for the error column.
    A failing step re-raises with the partial trajectory attached as ``exc.trajectory``.
    """
    u10, u20 = initial
    state = PdeltaState(u10, u20, 0.0)
    if snapshot_times is None:
        snapshot_times = [0.0, p.T]
    wanted = snapshot_indices(snapshot_times, p)
    traj = Trajectory(mesh)
    traj.records.append(pdelta_record(state, exact))
    if 0 in wanted:
        traj.snapshot_times.append(wanted[0])
        traj.snapshots.append(state)
    for n in range(1, p.n_steps + 1):
        try:
            new, info = pdelta_step(state, p, lv, q, return_info=True)
        except Exception as exc:
            exc.trajectory = traj
            raise
        new = PdeltaState(new.u1, new.u2, n * p.tau, new.inner_iterations_used)
        if keep_step_info:
            traj.step_infos.append((state, new, info))
        state = new
        traj.records.append(pdelta_record(state, exact, info.iterations))
        if n in wanted:
            traj.snapshot_times.append(wanted[n])
            traj.snapshots.append(state)
    return traj
