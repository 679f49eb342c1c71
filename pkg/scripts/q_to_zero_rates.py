"""TV to the q -> 0 limit measures along a q grid, with the ratio TV / sqrt(q) for the tree regime."""

import argparse

import numpy as np

from rcmodel.graph import build_box_lattice, build_complete_graph, cycle_graph
from rcmodel.limits import Regime, q_to_zero_convergence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qs", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    args = ap.parse_args()
    graphs = {"triangle": cycle_graph(3), "square": cycle_graph(4), "k4": build_complete_graph(4),
              "box2x3": build_box_lattice(2, [2, 3])}
    regimes = [Regime("fixed_p", 0.5), Regime("ust"), Regime("forest"), Regime("alpha", 2.0)]
    print("graph,regime,q,tv,tv_over_sqrt_q")
    for name, g in graphs.items():
        for r in regimes:
            for q, tv in zip(args.qs, q_to_zero_convergence(g, r, args.qs)):
                print(f"{name},{r.kind},{q:g},{tv:.6g},{tv / np.sqrt(q):.4f}")


if __name__ == "__main__":
    main()
