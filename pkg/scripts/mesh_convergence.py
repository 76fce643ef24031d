"""Print final-time errors, oscillation averages and iteration counts for both schemes.

Uses the Barenblatt experiment, where the exact solution is known.
"""

import argparse
import time

import numpy as np

from crossdiff.experiments import STANDARD_NODES, ExperimentConfig, run_single


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, nargs="+", default=list(STANDARD_NODES))
    ap.add_argument("--T", type=float, default=0.15)
    args = ap.parse_args()
    cfg = ExperimentConfig(experiment="barenblatt", mesh_nodes=args.nodes, T=args.T).resolved()
    print(f"{'scheme':>7} {'nodes':>6} {'rel_l2_err':>11} {'osc_avg':>8} {'min_u':>10} {'max_it':>6} {'sec':>5}")
    for scheme in ("pdelta", "pb"):
        prev = None
        for n in cfg.mesh_nodes:
            start = time.perf_counter()
            traj = run_single(cfg, scheme, n)
            sec = time.perf_counter() - start
            recs = traj.records
            err = recs[-1].rel_l2_err
            t = np.array([r.time for r in recs])
            osc_avg = np.trapezoid([r.osc_u for r in recs], t) / t[-1]
            rate = "" if prev is None else f"  order {np.log(prev[0] / err) / np.log(n / prev[1]):.2f}"
            print(f"{scheme:>7} {n:>6} {err:>11.3e} {osc_avg:>8.4f} {min(r.min_u for r in recs):>10.3e} "
                  f"{max(r.inner_iters for r in recs):>6} {sec:>5.1f}{rate}")
            prev = (err, n)


if __name__ == "__main__":
    main()
