"""Observable traces for heat-bath sweeps and Swendsen-Wang steps from the same start."""

import argparse

from rcmodel.duality import self_dual_point
from rcmodel.exact import RCParams
from rcmodel.graph import build_box_lattice
from rcmodel.samplers import mixing_probe, rows_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--side", type=int, default=16)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--p", type=float, default=None, help="defaults to the self-dual point")
    ap.add_argument("--dynamics", choices=["sw", "heat_bath"], default="sw")
    ap.add_argument("--observable", default="magnetization")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--replicas", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    p = self_dual_point(args.q) if args.p is None else args.p
    g = build_box_lattice(2, [args.side, args.side])
    rows = mixing_probe(g, RCParams(p, float(args.q)), args.dynamics, args.observable, args.steps,
                        args.replicas, args.seed)
    print(rows_to_csv(rows, [f"seed={args.seed}", f"p={p!r}", f"dynamics={args.dynamics}"]), end="")


if __name__ == "__main__":
    main()
