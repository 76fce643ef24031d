"""Command-line entry point: ``crossdiff pde ...`` and ``crossdiff ode ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    run_experiment,
)
from .kinetics import D, ND, LotkaVolterraParams
from .ode_models import SplitScenario, simulate_logistic, simulate_split
from .solver_pb import TRANSPORT_FORMS


def _floats(s: str):
    return [float(v) for v in s.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossdiff", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    pde = sub.add_parser("pde", help="run the finite-element experiments")
    pde.add_argument("--experiment", choices=EXPERIMENTS, default="barenblatt")
    pde.add_argument("--scheme", choices=("pdelta", "pb", "both"), default="both")
    pde.add_argument("--nodes", type=int, action="append",
                     help="node count of a uniform mesh (repeatable; default 101 301 501)")
    pde.add_argument("--tau", type=float)
    pde.add_argument("--T", type=float)
    pde.add_argument("--delta", type=float, help="default: h^2")
    pde.add_argument("--delta-b", type=float, help="default: 2 h^2")
    pde.add_argument("--eps", type=float, default=1e-10)
    pde.add_argument("--tol", type=float, default=1e-8)
    pde.add_argument("--max-inner", type=int, default=100)
    pde.add_argument("--snapshots", type=_floats,
                     help="comma-separated output times (default 0,T/4,T/2,3T/4,T)")
    pde.add_argument("--out", default="out")
    pde.add_argument("--transport-form", choices=TRANSPORT_FORMS, default="chi")
    pde.add_argument("--strict-r-range", action="store_true",
                     help="fail a pb run once r leaves [-0.01, 1.01]")
    pde.add_argument("--t-star", type=float, default=0.01)
    pde.add_argument("--x0", type=float, default=-0.25)
    pde.add_argument("--L", type=float, default=2.0)
    pde.add_argument("--domain", type=float, nargs=2, default=(-2.0, 2.0))
    pde.add_argument("--u1", default="0.0", help="custom: numpy expression in x")
    pde.add_argument("--u2", default="0.0", help="custom: numpy expression in x")
    pde.add_argument("--alpha", type=float, nargs=2, default=(0.0, 0.0))
    pde.add_argument("--beta", type=float, nargs=4, default=(0.0, 0.0, 0.0, 0.0),
                     metavar=("B11", "B12", "B21", "B22"))
    pde.add_argument("--lv-mode", choices=(ND, D), default=D)

    ode = sub.add_parser("ode", help="integrate the space-independent splitting models")
    ode.add_argument("--model", choices=("logistic", "split"), default="logistic")
    ode.add_argument("--alpha", type=float, default=1.0)
    ode.add_argument("--beta", type=float, default=1.0)
    ode.add_argument("--U0", type=float, default=0.1)
    ode.add_argument("--T", type=float, default=10.0)
    ode.add_argument("--dt", type=float, default=1e-3)
    ode.add_argument("--t-star", type=float, default=1.0)
    ode.add_argument("--theta", type=float, default=0.5,
                     help="fraction of U(t*) assigned to species 1")
    ode.add_argument("--mode", choices=(ND, D), default=ND)
    ode.add_argument("--post-alpha", type=float, nargs=2)
    ode.add_argument("--post-beta", type=float, nargs=4, metavar=("B11", "B12", "B21", "B22"))
    ode.add_argument("--every", type=int, default=1, help="write every n-th step")
    ode.add_argument("--out", help="CSV path (default stdout)")
    return parser


def pde_config(args) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=args.experiment,
        scheme=args.scheme,
        mesh_nodes=args.nodes or [101, 301, 501],
        tau=args.tau,
        T=args.T,
        delta=args.delta,
        delta_b=args.delta_b,
        eps=args.eps,
        tol=args.tol,
        max_inner=args.max_inner,
        snapshot_times=args.snapshots,
        output_dir=args.out,
        transport_form=args.transport_form,
        strict_r_range=args.strict_r_range,
        t_star=args.t_star,
        x0=args.x0,
        L=args.L,
        domain=tuple(args.domain),
        u1_expr=args.u1,
        u2_expr=args.u2,
        alpha=tuple(args.alpha),
        beta=tuple(args.beta),
        lv_mode=args.lv_mode,
    )


def run_ode(args, stream) -> None:
    fmt = "{:.17g}".format
    wr = csv.writer(stream, lineterminator="\n")
    if args.model == "logistic":
        t, U = simulate_logistic(args.alpha, args.beta, args.U0, args.T, args.dt)
        wr.writerow(["t", "U"])
        for k in range(0, t.size, args.every):
            wr.writerow([fmt(t[k]), fmt(U[k])])
        return

    if args.mode == ND:
        post = LotkaVolterraParams.nondifferentiated(args.alpha, args.beta)
    else:
        if args.post_alpha is None or args.post_beta is None:
            raise ValueError("--mode D needs --post-alpha and --post-beta")
        b = args.post_beta
        post = LotkaVolterraParams(tuple(args.post_alpha), (b[:2], b[2:]), D)
    sc = SplitScenario(args.alpha, args.beta, args.U0, args.t_star, args.T, post, args.theta)
    traj = simulate_split(sc, args.dt)
    header = ["t", "U1", "U2", "U1_plus_U2"]
    ref = None
    if args.mode == ND:
        header.append("U_logistic")
        ref = simulate_logistic(args.alpha, args.beta, args.U0, traj.t[-1], args.dt)[1]
    wr.writerow(header)
    for k in range(traj.split_index, traj.t.size, args.every):
        row = [fmt(traj.t[k]), fmt(traj.U1[k]), fmt(traj.U2[k]), fmt(traj.U1[k] + traj.U2[k])]
        if ref is not None:
            row.append(fmt(ref[k]))
        wr.writerow(row)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "pde":
            return run_experiment(pde_config(args))
        if args.out:
            with open(args.out, "w", newline="") as fh:
                run_ode(args, fh)
        else:
            run_ode(args, sys.stdout)
        return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
