"""Contact-inhibition run against the segregated Barenblatt solution on the three standard meshes."""

import argparse

from crossdiff.experiments import STANDARD_NODES, ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/barenblatt")
    ap.add_argument("--nodes", type=int, nargs="+", default=list(STANDARD_NODES))
    args = ap.parse_args()
    cfg = ExperimentConfig(experiment="barenblatt", mesh_nodes=args.nodes, output_dir=args.out)
    raise SystemExit(run_experiment(cfg))


if __name__ == "__main__":
    main()
