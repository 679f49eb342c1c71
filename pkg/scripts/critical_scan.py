"""Edge density and boundary-connection proxy across p around the self-dual point."""

import argparse

import numpy as np

from rcmodel.duality import self_dual_point
from rcmodel.estimators import SamplerSpec, critical_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, default=2.0)
    ap.add_argument("--sides", type=int, nargs="+", default=[8, 16])
    ap.add_argument("--width", type=float, default=0.1)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--boundary", default="free")
    ap.add_argument("--sampler", default="sw")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    ps = self_dual_point(args.q) + np.linspace(-args.width, args.width, args.points)
    ps = np.clip(ps, 0.0, 1.0)
    spec = SamplerSpec(args.sampler, burn_in=100)
    print(critical_scan(args.q, ps, args.sides, args.samples, args.seed, spec, args.boundary,
                        workers=args.workers), end="")


if __name__ == "__main__":
    main()
