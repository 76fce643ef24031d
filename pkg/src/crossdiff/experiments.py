"""Experiment configuration and the batch runner behind the ``pde`` subcommand."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .diagnostics import CSV_COLUMNS
from .exact_solutions import (
    BarenblattParams,
    barenblatt,
    experiment1_initial,
    experiment2_initial,
)
from .kinetics import D, DriftField, LotkaVolterraParams
from .mesh_fe import Mesh, NodalField, interpolate
from .solver_pb import TRANSPORT_FORMS, pb_run
from .solver_pdelta import SchemeParams, pdelta_run

log = logging.getLogger(__name__)

EXPERIMENTS = ("invasion", "barenblatt", "custom")
SCHEMES = ("pdelta", "pb")
STANDARD_NODES = (101, 301, 501)

# the invasion horizon is a free choice; T=5 keeps the front inside the domain
DEFAULTS = {
    "invasion": {"tau": 1e-3, "T": 5.0},
    "barenblatt": {"tau": 1e-4, "T": 0.15},
    "custom": {"tau": 1e-3, "T": 1.0},
}

SNAPSHOT_COLUMNS = ("t", "x", "u1", "u2", "u", "r")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = "barenblatt"
    scheme: str = "both"
    mesh_nodes: list = field(default_factory=lambda: list(STANDARD_NODES))
    tau: Optional[float] = None
    T: Optional[float] = None
    delta: Optional[float] = None  # None: h**2
    delta_b: Optional[float] = None  # None: 2 h**2
    eps: float = 1e-10
    tol: float = 1e-8
    max_inner: int = 100
    snapshot_times: Optional[list] = None  # None: 0, T/4, T/2, 3T/4, T
    output_dir: str = "out"
    transport_form: str = "chi"
    strict_r_range: bool = False
    # barenblatt
    t_star: float = 0.01
    x0: float = -0.25
    L: float = 2.0
    # custom
    domain: tuple = (-2.0, 2.0)
    u1_expr: str = "0.0"
    u2_expr: str = "0.0"
    alpha: tuple = (0.0, 0.0)
    beta: tuple = (0.0, 0.0, 0.0, 0.0)
    lv_mode: str = D

    def resolved(self) -> "ExperimentConfig":
        """Fill defaults and validate; raises :class:`ConfigError`."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.scheme not in SCHEMES + ("both",):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.transport_form not in TRANSPORT_FORMS:
            raise ConfigError(f"unknown transport form {self.transport_form!r}")
        d = DEFAULTS[self.experiment]
        tau = d["tau"] if self.tau is None else float(self.tau)
        T = d["T"] if self.T is None else float(self.T)
        if not tau > 0 or not T >= 0:
            raise ConfigError("need tau > 0 and T >= 0")
        nodes = [int(n) for n in self.mesh_nodes]
        if not nodes or any(n < 3 for n in nodes):
            raise ConfigError("every mesh needs at least 3 nodes")
        snaps = self.snapshot_times
        if snaps is None:
            snaps = sorted({0.0, T / 4, T / 2, 3 * T / 4, T})
        snaps = [float(s) for s in snaps]
        if any(s < 0 or s > T + 1e-12 for s in snaps):
            raise ConfigError("snapshot times must lie in [0, T]")
        if not 0 < self.eps < 1:
            raise ConfigError("eps must lie in (0, 1)")
        if not self.tol > 0 or self.max_inner < 1:
            raise ConfigError("need tol > 0 and max_inner >= 1")
        if self.experiment == "barenblatt":
            try:
                bp = BarenblattParams(self.t_star, self.x0, self.L)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if not bp.horizon_ok(T):
                raise ConfigError(f"Barenblatt support reaches the boundary before T={T}")
        if self.experiment == "custom":
            a, b = self.domain
            if not a < b:
                raise ConfigError("domain must satisfy a < b")
            self.lotka_volterra()
        return replace(self, tau=tau, T=T, mesh_nodes=nodes, snapshot_times=snaps)

    @property
    def schemes(self):
        return SCHEMES if self.scheme == "both" else (self.scheme,)

    @property
    def interval(self):
        if self.experiment == "barenblatt":
            return (-self.L, self.L)
        if self.experiment == "invasion":
            return (-2.0, 2.0)
        return tuple(self.domain)

    def lotka_volterra(self) -> LotkaVolterraParams:
        if self.experiment == "invasion":
            return LotkaVolterraParams.invasion()
        if self.experiment == "barenblatt":
            return LotkaVolterraParams.zero()
        b = tuple(self.beta)
        try:
            return LotkaVolterraParams(tuple(self.alpha), (b[:2], b[2:]), self.lv_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def delta_for(self, mesh: Mesh):
        h = mesh.h
        delta = h * h if self.delta is None else float(self.delta)
        delta_b = 2 * h * h if self.delta_b is None else float(self.delta_b)
        return delta, delta_b


def _eval_profile(expr: str, x: np.ndarray) -> np.ndarray:
    names = {k: getattr(np, k) for k in ("exp", "sin", "cos", "tanh", "abs", "sqrt",
                                           "maximum", "minimum", "where", "heaviside", "pi")}
    names["x"] = x
    return np.broadcast_to(eval(expr, {"__builtins__": {}}, names), x.shape).astype(float)


def initial_data(cfg: ExperimentConfig, mesh: Mesh):
    """``(u1_0, u2_0, r_0)`` on ``mesh``; ``r_0`` is the fraction of species 1."""
    if cfg.experiment == "barenblatt":
        return experiment2_initial(mesh, BarenblattParams(cfg.t_star, cfg.x0, cfg.L))
    if cfg.experiment == "invasion":
        u1, u2 = experiment1_initial(mesh)
    else:
        u1 = interpolate(lambda x: _eval_profile(cfg.u1_expr, x), mesh)
        u2 = interpolate(lambda x: _eval_profile(cfg.u2_expr, x), mesh)
    u = u1.values + u2.values
    r = np.divide(u1.values, u, out=np.full_like(u, 0.5), where=u > 0)
    return u1, u2, NodalField(mesh, r)


def exact_total(cfg: ExperimentConfig):
    if cfg.experiment != "barenblatt":
        return None
    bp = BarenblattParams(cfg.t_star, cfg.x0, cfg.L)
    return lambda t, x: barenblatt(t, x, bp)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def write_snapshots(path: Path, traj, scheme: str) -> None:
    x = traj.mesh.nodes
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SNAPSHOT_COLUMNS)
        for t, s in zip(traj.snapshot_times, traj.snapshots):
            u1, u2 = s.u1.values, s.u2.values
            u = s.u.values
            r = s.r.values if scheme == "pb" else [None] * x.size
            for j in range(x.size):
                wr.writerow([_fmt(t), _fmt(x[j]), _fmt(u1[j]), _fmt(u2[j]), _fmt(u[j]), _fmt(r[j])])


def write_diagnostics(path: Path, traj) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for rec in traj.records:
            wr.writerow([_fmt(v) for v in asdict(rec).values()])


def run_single(cfg: ExperimentConfig, scheme: str, n_nodes: int, q: DriftField = DriftField()):
    """Run one (scheme, mesh) pair of a resolved config; returns the trajectory."""
    mesh = Mesh.uniform(*cfg.interval, n_nodes)
    delta, delta_b = cfg.delta_for(mesh)
    lv = cfg.lotka_volterra()
    u1, u2, r0 = initial_data(cfg, mesh)
    exact = exact_total(cfg)
    if scheme == "pdelta":
        p = SchemeParams(cfg.tau, cfg.T, delta, cfg.eps, cfg.tol, cfg.max_inner)
        return pdelta_run(mesh, (u1, u2), p, lv, q, cfg.snapshot_times, exact)
    p = SchemeParams(cfg.tau, cfg.T, delta_b, cfg.eps, cfg.tol, cfg.max_inner)
    return pb_run(mesh, (u1 + u2, r0), p, lv, q, delta_b, cfg.transport_form,
                  cfg.snapshot_times, exact, cfg.strict_r_range)


def manifest(cfg: ExperimentConfig, scheme: str, n_nodes: int) -> dict:
    mesh = Mesh.uniform(*cfg.interval, n_nodes)
    delta, delta_b = cfg.delta_for(mesh)
    lv = cfg.lotka_volterra()
    out = {
        "version": __version__,
        "experiment": cfg.experiment,
        "scheme": scheme,
        "nodes": n_nodes,
        "domain_a": cfg.interval[0],
        "domain_b": cfg.interval[1],
        "h": mesh.h,
        "tau": cfg.tau,
        "T": cfg.T,
        "n_steps": int(round(cfg.T / cfg.tau)),
        "delta": delta if scheme == "pdelta" else None,
        "delta_b": delta_b if scheme == "pb" else None,
        "eps": cfg.eps,
        "tol": cfg.tol,
        "max_inner": cfg.max_inner,
        "snapshot_times": ",".join(_fmt(t) for t in cfg.snapshot_times),
        "transport_form": cfg.transport_form if scheme == "pb" else None,
        "strict_r_range": cfg.strict_r_range if scheme == "pb" else None,
        "alpha": ",".join(_fmt(a) for a in lv.alpha),
        "beta": ",".join(_fmt(b) for row in lv.beta for b in row),
        "lv_mode": lv.mode,
        "drift": "zero",
    }
    if cfg.experiment == "barenblatt":
        out.update(t_star=cfg.t_star, x0=cfg.x0, L=cfg.L)
    if cfg.experiment == "custom":
        out.update(u1_expr=cfg.u1_expr, u2_expr=cfg.u2_expr)
    return out


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run every (scheme, mesh) pair and write snapshots, diagnostics and a manifest for each.

    Returns 0 on success and 1 if any solver run failed (partial output is
    still written and flagged ``"status": "failed"`` in its manifest).
    """
    cfg = cfg.resolved()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for scheme in cfg.schemes:
        for n in cfg.mesh_nodes:
            tag = f"{scheme}_n{n}"
            meta = manifest(cfg, scheme, n)
            try:
                traj = run_single(cfg, scheme, n)
                meta.update(status="ok", error=None)
            except Exception as exc:
                traj = getattr(exc, "trajectory", None)
                if traj is None:
                    raise
                log.error("%s failed: %s", tag, exc)
                meta.update(status="failed", error=str(exc))
                status = 1
            meta["steps_completed"] = len(traj.records) - 1
            if scheme == "pb":
                meta.update(r_min=traj.r_min, r_max=traj.r_max)
            write_snapshots(out / f"snapshots_{tag}.csv", traj, scheme)
            write_diagnostics(out / f"diagnostics_{tag}.csv", traj)
            with open(out / f"manifest_{tag}.json", "w") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)
                fh.write("\n")
            log.info("%s: %d steps, status %s", tag, meta["steps_completed"], meta["status"])
    return status
