"""Exact outer-circuit probabilities on the wired box B(1) against the circuit bound, over q."""

import argparse

from rcmodel.circuits import outer_circuit_bound_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, nargs="+", default=[2.0, 10.0, 25.72, 26.0, 30.0, 100.0, 1000.0])
    args = ap.parse_args()
    print("q,length,probability,bound,ratio,holds")
    for q in args.q:
        _, rows = outer_circuit_bound_check(1, q)
        for r in rows:
            print(f"{q:g},{r.length},{r.probability:.6e},{r.bound:.6e},{r.probability / r.bound:.4f},{r.holds}")


if __name__ == "__main__":
    main()
