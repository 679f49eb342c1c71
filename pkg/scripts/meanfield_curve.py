"""Mean-field giant fraction on K_n against the fixed-point prediction, over a lambda grid."""

import argparse

import numpy as np

from rcmodel.meanfield import MeanFieldParams, lambda_c, results_to_csv, simulate_Kn, theta_mean_field


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, default=4.0)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--burn-in", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--prediction-only", action="store_true")
    args = ap.parse_args()
    lc = lambda_c(args.q)
    lams = np.round(np.linspace(0.5 * lc, 1.5 * lc, 11), 6)
    if args.prediction_only:
        print("lambda,theta_prediction")
        for lam in lams:
            print(f"{lam},{theta_mean_field(lam, args.q):.6f}")
        return
    dyn = "sw" if float(args.q).is_integer() else "heat_bath"
    results = [simulate_Kn(MeanFieldParams(args.n, float(lam), args.q), dyn, args.burn_in, args.samples,
                           args.seed + i) for i, lam in enumerate(lams)]
    print(results_to_csv(results, [f"seed={args.seed}", f"lambda_c={lc!r}", f"dynamics={dyn}"]), end="")


if __name__ == "__main__":
    main()
