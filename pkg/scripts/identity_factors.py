"""Measure the constants relating the cubic Weyl contractions on random samples.

For each n prints the spread of W2 / W1 and of the omega contraction against
2 W1 + W2 / 2, where W1 = W_ijkl W_ipkq W_pjql and W2 = W_ijkl W_klpq W_pqij.
A constant ratio signals an exact identity in that dimension.
"""

import argparse

import numpy as np

from curvpinch.decomposition import omega_sides
from curvpinch.tensor_core import frob_norm_sq, random_weyl_like, weyl_cubic_1, weyl_cubic_2


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", type=int, nargs="+", default=[4, 5, 6, 7])
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    for n in args.dims:
        w = random_weyl_like(n, np.random.default_rng([args.seed, n]), args.samples)
        c1, c2 = weyl_cubic_1(w), weyl_cubic_2(w)
        contraction, omsq = omega_sides(w)
        q = c2 / c1
        rel = (contraction + 2 * c1 + 0.5 * c2) / frob_norm_sq(w, 4) ** 1.5
        print(
            f"n={n}: W2/W1 in [{q.min():.12f}, {q.max():.12f}]; "
            f"max |omega term + (2 W1 + W2/2)| / |W|^3 = {np.abs(rel).max():.2e}; "
            f"|omega|^2 / (8(n-1)|W|^2) = {np.mean(omsq / (8 * (n - 1) * frob_norm_sq(w, 4))):.15f}"
        )


if __name__ == "__main__":
    main()
