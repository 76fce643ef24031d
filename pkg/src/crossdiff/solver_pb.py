"""P1 scheme for the total-density / species-fraction formulation.

Unknowns are the total density ``u`` and the fraction ``r`` of species 1.
Per inner iteration two scalar tridiagonal systems are solved,

    (u^k - u^{n-1}, chi)^h / tau + (A dx u^k, dx chi) + (q A, dx chi) = (F1(u^{k-1}, r^{k-1}), chi)^h
    (r^k - r^{n-1}, chi)^h / tau + delta_B (dx r^k, dx chi) - <transport> = (F2(u^{k-1}, r^{k-1}), chi)^h

with ``A`` the truncated midpoint value of ``u^{k-1}``. The transport term
``((dx u^{k-1} + q) dx r^{k-1}, chi)`` is lumped at the nodes using recovered
nodal gradients (``transport_form="chi"``); ``"grad-chi"`` instead pairs the
elementwise product with ``dx chi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .diagnostics import DiagnosticsRecord, discrete_mass, osc, relative_l2_error
from .kinetics import DriftField, F1_F2, LotkaVolterraParams
from .mesh_fe import BandedSystem, Mesh, NodalField, assemble_weighted_stiffness, solve_banded
from .regularization import Lambda_eps, lambda_eps
from .solver_pdelta import (
    FixedPointError,
    SchemeParams,
    StepInfo,
    Trajectory,
    snapshot_indices,
    transport_load,
)

TRANSPORT_FORMS = ("chi", "grad-chi")
R_BAND = 1e-2


class FractionRangeError(RuntimeError):
    def __init__(self, message):
        super().__init__(message)
        self.trajectory = None


@dataclass(frozen=True)
class PbState:
    u: NodalField
    r: NodalField
    time: float = 0.0
    inner_iterations_used: tuple = ()

    @property
    def mesh(self) -> Mesh:
        return self.u.mesh

    @property
    def u1(self) -> NodalField:
        return NodalField(self.mesh, self.r.values * self.u.values)

    @property
    def u2(self) -> NodalField:
        return NodalField(self.mesh, self.u.values - self.r.values * self.u.values)


def nodal_gradient(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    """Mean of the adjacent element gradients; one-sided at the two end nodes."""
    g = np.diff(values) / mesh.element_sizes
    out = np.empty(mesh.n_nodes)
    out[0], out[-1] = g[0], g[-1]
    out[1:-1] = 0.5 * (g[:-1] + g[1:])
    return out


def transport_term(mesh, u_k, r_k, q_nodal, form="chi") -> np.ndarray:
    """Nodal load of ``((dx u + q) dx r, chi)`` (or ``dx chi``), to be added to the rhs."""
    if form == "chi":
        c = nodal_gradient(mesh, u_k) * nodal_gradient(mesh, r_k)
        if q_nodal is not None:
            c += q_nodal * nodal_gradient(mesh, r_k)
        return mesh.lumped_weights * c
    if form == "grad-chi":
        gu = np.diff(u_k) / mesh.element_sizes
        gr = np.diff(r_k) / mesh.element_sizes
        if q_nodal is not None:
            gu = gu + 0.5 * (q_nodal[:-1] + q_nodal[1:])
        c = gu * gr * mesh.element_sizes
        out = np.zeros(mesh.n_nodes)
        out[:-1] -= c
        out[1:] += c
        return out
    raise ValueError(f"transport_form must be one of {TRANSPORT_FORMS}, got {form!r}")


def reaction_terms(u_k, r_k, lv: LotkaVolterraParams, eps: float):
    if lv.is_zero:
        z = np.zeros_like(u_k)
        return z, z
    return F1_F2(lambda_eps(u_k, eps), lambda_eps(r_k, eps), lv)


def pb_step(state: PbState, p: SchemeParams, lv: LotkaVolterraParams,
            q: DriftField = DriftField(), delta_b: Optional[float] = None,
            transport_form: str = "chi", return_info: bool = False):
    """One time step; ``delta_b`` defaults to ``p.delta``.

    Stops when ``max(|u^k - u^{k-1}|_inf, |r^k - r^{k-1}|_inf) < tol``.
    """
    mesh = state.mesh
    delta_b = p.delta if delta_b is None else delta_b
    w = mesh.lumped_weights
    t_new = state.time + p.tau
    q_nodal = None if q.is_zero else q.nodal(t_new, mesh.nodes)
    u_old, r_old = state.u.values, state.r.values

    r_mat = delta_b * assemble_weighted_stiffness(np.ones(mesh.n_elements), mesh)
    r_mat[1] += w / p.tau

    u_k, r_k = u_old, r_old
    residual = np.inf
    for k in range(1, p.max_inner + 1):
        A = Lambda_eps(u_k, p.eps)
        u_mat = assemble_weighted_stiffness(A, mesh)
        u_mat[1] += w / p.tau
        F1, F2 = reaction_terms(u_k, r_k, lv, p.eps)
        u_rhs = w * (u_old / p.tau + F1)
        if q_nodal is not None:
            u_rhs -= transport_load(mesh, q_nodal, A)
        r_rhs = w * (r_old / p.tau + F2) + transport_term(mesh, u_k, r_k, q_nodal, transport_form)

        u_new = solve_banded(BandedSystem(1, u_mat, u_rhs))
        r_new = solve_banded(BandedSystem(1, r_mat, r_rhs))
        residual = max(np.abs(u_new - u_k).max(), np.abs(r_new - r_k).max())
        prev = (u_k, r_k)
        u_k, r_k = u_new, r_new
        if residual < p.tol:
            break
    else:
        raise FixedPointError(
            f"no convergence at t={t_new:g} after {p.max_inner} iterations "
            f"(residual {residual:.3e})",
            residual,
        )
    new = PbState(NodalField(mesh, u_k), NodalField(mesh, r_k), t_new,
                  state.inner_iterations_used + (k,))
    if return_info:
        return new, StepInfo(k, float(residual), prev)
    return new


def pb_record(state: PbState, exact: Optional[Callable] = None, iters: int = 0) -> DiagnosticsRecord:
    u = state.u
    return DiagnosticsRecord(
        time=state.time,
        osc_u=osc(u),
        mass_u1=discrete_mass(state.u1),
        mass_u2=discrete_mass(state.u2),
        min_u=float(u.values.min()),
        max_u=float(u.values.max()),
        rel_l2_err=None if exact is None else relative_l2_error(u, exact, state.time),
        inner_iters=iters,
    )


def pb_run(mesh: Mesh, initial, p: SchemeParams, lv: LotkaVolterraParams,
           q: DriftField = DriftField(), delta_b: Optional[float] = None,
           transport_form: str = "chi", snapshot_times=None,
           exact: Optional[Callable] = None, check_r_range: bool = False) -> Trajectory:
    """Time loop from ``initial = (u0, r0)``.

    Snapshots are :class:`PbState`; species are recovered nodewise through
    ``state.u1`` and ``state.u2``. The range of ``r`` is always tracked in
    ``traj.r_min``/``traj.r_max``; with ``check_r_range`` the run also fails
    once ``r`` leaves ``[-0.01, 1.01]``.
    """
    if transport_form not in TRANSPORT_FORMS:
        raise ValueError(f"transport_form must be one of {TRANSPORT_FORMS}")
    u0, r0 = initial
    state = PbState(u0, r0, 0.0)
    if snapshot_times is None:
        snapshot_times = [0.0, p.T]
    wanted = snapshot_indices(snapshot_times, p)
    traj = Trajectory(mesh)
    traj.r_min, traj.r_max = float(r0.values.min()), float(r0.values.max())
    traj.records.append(pb_record(state, exact))
    if 0 in wanted:
        traj.snapshot_times.append(wanted[0])
        traj.snapshots.append(state)
    for n in range(1, p.n_steps + 1):
        try:
            new, info = pb_step(state, p, lv, q, delta_b, transport_form, return_info=True)
            r = new.r.values
            traj.r_min = min(traj.r_min, float(r.min()))
            traj.r_max = max(traj.r_max, float(r.max()))
            if check_r_range and (r.min() < -R_BAND or r.max() > 1.0 + R_BAND):
                raise FractionRangeError(
                    f"fraction left [{-R_BAND}, {1 + R_BAND}] at t={new.time:g}: "
                    f"min {r.min():.3e}, max {r.max():.3e}"
                )
        except Exception as exc:
            exc.trajectory = traj
            raise
        state = PbState(new.u, new.r, n * p.tau, new.inner_iterations_used)
        traj.records.append(pb_record(state, exact, info.iterations))
        if n in wanted:
            traj.snapshot_times.append(wanted[n])
            traj.snapshots.append(state)
    return traj
