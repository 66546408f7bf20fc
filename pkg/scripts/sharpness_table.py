"""Empirical maxima of every inequality ratio over n = 4..6 with the default search settings."""

import argparse
import time
from dataclasses import dataclass, field, replace

from curvpinch import inequalities as ineq
from curvpinch import sharpness as sh
from curvpinch.report import rows_to_csv


@dataclass
class SharpnessExperiment:
    dims: tuple = (4, 5, 6)
    targets: tuple = tuple(sh.TARGETS)
    search: sh.SearchConfig = field(default_factory=lambda: sh.SearchConfig("okumura", 4))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dims", type=int, nargs="+", default=[4, 5, 6])
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write the table here as CSV")
    args = p.parse_args()
    exp = SharpnessExperiment(dims=tuple(args.dims))
    base = replace(exp.search, restarts=args.restarts, max_iters=args.iters, seed=args.seed)

    rows = []
    for target in exp.targets:
        for n in exp.dims:
            t0 = time.perf_counter()
            res = sh.maximize_ratio(replace(base, inequality_id=target, dim=n))
            row = {"target": target, "n": n, "best_ratio": res.best_ratio, "converged": res.converged,
                   "seconds": round(time.perf_counter() - t0, 2)}
            if target == "tachibana":
                # the attained value of 2 W1 + W2/2 over |W|^3, independent of C(n)
                row["cubic_sup"] = res.best_ratio * ineq.C(n)
            rows.append(row)
            print(", ".join(f"{k}={v}" for k, v in row.items()), flush=True)
    if args.csv:
        cols = ["target", "n", "best_ratio", "converged", "seconds", "cubic_sup"]
        with open(args.csv, "w") as fh:
            fh.write(rows_to_csv(rows, cols))


if __name__ == "__main__":
    main()
