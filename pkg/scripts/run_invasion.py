"""Invasion run: a Gaussian patch of species 1 inside a uniform species-2 background."""

import argparse

from crossdiff.experiments import STANDARD_NODES, ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/invasion")
    ap.add_argument("--nodes", type=int, nargs="+", default=list(STANDARD_NODES))
    ap.add_argument("--T", type=float, default=5.0)
    args = ap.parse_args()
    cfg = ExperimentConfig(experiment="invasion", mesh_nodes=args.nodes, T=args.T,
                           output_dir=args.out)
    raise SystemExit(run_experiment(cfg))


if __name__ == "__main__":
    main()
