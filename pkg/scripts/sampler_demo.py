"""Sample Cayley pairs over a fixed D and confirm each one closes triangles."""

import argparse

import numpy as np

from cayleyset.cayley import cayley_gamma, quadric_residual, sample_cayley
from cayleyset.dynamics import random_start_points, triangle_closure
from cayleyset.elliptic import j_from_sigma
from cayleyset.pencil import ConicPair


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", default="1,2,3", help="diagonal of D")
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)

    D = np.diag([complex(v) for v in args.d.split(",")])
    print(f"{'k':>3} {'|gamma|':>10} {'quadric':>10} {'closure':>10}  j")
    for k, C in enumerate(sample_cayley(D, seed=args.seed, count=args.count)):
        pair = ConicPair(C, D).normalized()
        starts = random_start_points(pair, seed=args.seed + k, count=5)
        closure = max(triangle_closure(pair, p) for p in starts)
        print(
            f"{k:>3} {abs(cayley_gamma(pair)):10.1e} {quadric_residual(D, C):10.1e}"
            f" {closure:10.1e}  {j_from_sigma(pair.sigma):.6g}"
        )


if __name__ == "__main__":
    main()
