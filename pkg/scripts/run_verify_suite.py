"""Seeded batch verification over a dimension range; writes a canonical JSON report."""

import argparse
import logging
import time
from dataclasses import asdict, dataclass

from curvpinch import suite
from curvpinch.report import dumps_canonical


@dataclass
class VerifyExperiment:
    dims: tuple = tuple(range(4, 11))
    samples: int = 100_000
    identity_samples: int = 10_000
    seed: int = 20240601
    workers: int = 1
    out: str = "verify_report.json"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    cfg = VerifyExperiment()
    for key, val in asdict(cfg).items():
        kind = int if isinstance(val, (int, tuple)) else str
        p.add_argument(f"--{key.replace('_', '-')}", type=kind, nargs="+" if isinstance(val, tuple) else None,
                       default=val)
    cfg = VerifyExperiment(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in vars(p.parse_args()).items()})
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    t0 = time.perf_counter()
    rows = suite.run_all(cfg.dims, cfg.samples, cfg.seed, cfg.identity_samples, workers=cfg.workers)
    elapsed = time.perf_counter() - t0
    for r in rows:
        key = "max_ratio" if r["kind"] == "inequality" else "max_deviation"
        print(f"{r['id']:28s} n={r['dim']:<3d} {key}={r[key]:.6g} violations={r['violations']}")
    print(f"{suite.count_violations(rows)} violations in {elapsed:.1f}s")
    with open(cfg.out, "w") as fh:
        fh.write(dumps_canonical({"config": asdict(cfg), "rows": rows, "seconds": elapsed}) + "\n")


if __name__ == "__main__":
    main()
