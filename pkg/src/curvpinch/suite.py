"""Seeded batch verification of every inequality and identity.

Samples are drawn chunk by chunk from a handful of named streams (trace-free
symmetric T, Weyl-like W, symmetric S, curvature Rm). Chunk ``c`` of stream
``s`` at dimension ``n`` uses ``SeedSequence([seed, n, s, c])``, so suites
reading the same stream see the same samples and results do not depend on
how dimensions are spread over worker processes.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import inequalities as ineq
from .decomposition import DECOMP_TOL, decompose, omega_sides, tvu_norm_sides
from .tensor_core import (
    IDENTITY_TOL,
    cubic_ricci_sides,
    frob_norm_sq,
    random_curvature,
    random_sym,
    random_traceless_sym,
    random_weyl_like,
    tensor_to_dict,
)

log = logging.getLogger(__name__)

DEFAULT_DIMS = tuple(range(4, 11))


#: independent sample streams; suites reading the same stream share its samples
STREAMS = {"T": 0, "W": 1, "S": 2, "Rm": 3}


def _draw(stream: str, rng, n: int, k: int) -> np.ndarray:
    if stream == "T":
        return random_traceless_sym(n, rng, k)
    if stream == "W":
        return random_weyl_like(n, rng, k)
    if stream == "S":
        return random_sym(n, rng, k)
    return random_curvature(n, rng, k)


class _OmegaCache:
    """omega_sides per W block within one chunk; three suites read the same blocks in turn."""

    def __init__(self):
        self.entries = {}

    def clear(self):
        self.entries.clear()

    def __call__(self, W):
        key = (W.__array_interface__["data"][0], W.shape, W.strides)
        # the stored array keeps its buffer alive, so the address cannot be reused within a chunk
        if key not in self.entries:
            self.entries[key] = (W, omega_sides(W))
        return self.entries[key][1]


def _omega_cubic_sides(W, omega=omega_sides):
    contraction, _ = omega(W)
    return ineq.tachibana_value(W), contraction, frob_norm_sq(W, 4) ** 1.5


def _omega_cubic_negated_sides(W, omega=omega_sides):
    contraction, _ = omega(W)
    return ineq.tachibana_value(W), -contraction, frob_norm_sq(W, 4) ** 1.5


def _omega_norm_sides(W, omega=omega_sides):
    n = W.shape[-1]
    _, omsq = omega(W)
    wsq = frob_norm_sq(W, 4)
    return omsq, 8.0 * (n - 1) * wsq, wsq


def _tvu_sides(key):
    def sides(T):
        return tvu_norm_sides(T)[key]

    return sides


def _pythagoras_sides(Rm):
    parts = decompose(Rm).parts()
    total = frob_norm_sq(Rm, 4)
    return total, sum(frob_norm_sq(p, 4) for p in parts), total


def _crude_sides(W):
    return ineq.tachibana_sides(W, constant=ineq.CRUDE_C)


@dataclass(frozen=True)
class Suite:
    suite_id: str
    kind: str  # "inequality" or "identity"
    inputs: tuple
    sides: Callable
    tol: float
    dims: tuple | None = None
    note: str = ""
    #: cap on the number of samples evaluated in one vectorized call
    batch_elems: float = 2e7
    #: sides accept an ``omega`` keyword for the per-run omega cache
    uses_omega: bool = False

    def applies(self, n: int) -> bool:
        return self.dims is None or n in self.dims

    def max_batch(self, n: int) -> int:
        return max(1, int(self.batch_elems // n**4))



INEQUALITY_SUITES = (
    Suite("okumura", "inequality", ("T",), ineq.okumura_sides, ineq.INEQ_TOL),
    Suite("huisken", "inequality", ("W", "T"), ineq.huisken_sides, ineq.INEQ_TOL),
    Suite("prop_alg", "inequality", ("W", "T"), ineq.prop_alg_sides, ineq.INEQ_TOL),
    Suite("tachibana", "inequality", ("W",), ineq.tachibana_sides, ineq.INEQ_TOL),
    Suite("tachibana_crude", "inequality", ("W",), _crude_sides, ineq.INEQ_TOL),
    Suite("eigen_bound", "inequality", ("W",), ineq.eigen_sides, ineq.INEQ_TOL),
)

IDENTITY_SUITES = (
    Suite("kn_rewrite", "identity", ("W", "T"), ineq.kn_rewrite_sides, ineq.IDENT_TOL),
    Suite("tvu_kn_square", "identity", ("T",), _tvu_sides("kn_square"), DECOMP_TOL),
    Suite("tvu_v_norm", "identity", ("T",), _tvu_sides("v_norm"), DECOMP_TOL),
    Suite("tvu_u_norm", "identity", ("T",), _tvu_sides("u_norm"), DECOMP_TOL),
    Suite("tvu_t_plus_v", "identity", ("T",), _tvu_sides("t_plus_v"), DECOMP_TOL),
    Suite("omega_cubic", "identity", ("W",), _omega_cubic_sides, DECOMP_TOL, note="positive sign",
          batch_elems=2e5, uses_omega=True),
    Suite("omega_cubic_negated", "identity", ("W",), _omega_cubic_negated_sides, DECOMP_TOL, note="negative sign",
          batch_elems=2e5, uses_omega=True),
    Suite("omega_norm", "identity", ("W",), _omega_norm_sides, DECOMP_TOL, batch_elems=2e5, uses_omega=True),
    Suite("five_dim_identity", "identity", ("W",), ineq.five_dim_sides, ineq.IDENT_TOL, dims=(5,),
          note="factor 4"),
    Suite("five_dim_identity_factor2", "identity", ("W",), ineq.five_dim_sides_observed, ineq.IDENT_TOL,
          dims=(5,), note="factor 2"),
    Suite("combined_norm", "identity", ("W", "T"), ineq.combined_norm_sides, ineq.IDENT_TOL),
    Suite("cubic_ricci", "identity", ("S",), cubic_ricci_sides, IDENTITY_TOL),
    Suite("weyl_pythagoras", "identity", ("Rm",), _pythagoras_sides, DECOMP_TOL),
)

ALL_SUITES = {s.suite_id: s for s in INEQUALITY_SUITES + IDENTITY_SUITES}


def chunk_rows(n: int) -> int:
    """Samples drawn per stream per chunk."""
    return max(200, min(4000, int(2e7 // n**4)))


class _Accumulator:
    def __init__(self, suite: Suite, n: int, samples: int):
        self.suite = suite
        self.n = n
        self.samples = samples
        self.seen = 0
        self.violations = 0
        self.best = -np.inf
        self.best_lhs = 0.0
        self.best_rhs = 0.0
        self.witness = None

    @property
    def remaining(self) -> int:
        return self.samples - self.seen

    def update(self, inputs: dict, omega=None) -> None:
        suite = self.suite
        extra = {"omega": omega} if suite.uses_omega and omega is not None else {}
        out = suite.sides(*inputs.values(), **extra)
        lhs, rhs = np.asarray(out[0], dtype=float), np.asarray(out[1], dtype=float)
        if suite.kind == "inequality":
            safe = np.where(rhs > 0, rhs, 1.0)
            score = np.where(rhs > 0, lhs / safe, np.where(lhs > 0, np.inf, 0.0))
            bad = (lhs > rhs * (1.0 + suite.tol)) & ~((lhs == 0) & (rhs == 0))
        else:
            scale = np.abs(np.asarray(out[2], dtype=float))
            denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), scale)
            score = np.where(denom > 0, np.abs(lhs - rhs) / np.where(denom > 0, denom, 1.0), 0.0)
            bad = score > suite.tol
        self.seen += len(lhs)
        self.violations += int(bad.sum())
        worst = int(np.argmax(score))
        # strict comparison keeps the earliest sample on ties
        if score[worst] > self.best:
            self.best = float(score[worst])
            self.best_lhs = float(lhs[worst])
            self.best_rhs = float(rhs[worst])
            self.witness = {name: tensor_to_dict(arr[worst]) for name, arr in inputs.items()}

    def summary(self) -> dict:
        suite = self.suite
        out = {
            "id": suite.suite_id,
            "kind": suite.kind,
            "dim": self.n,
            "samples": self.seen,
            "violations": self.violations,
            "tolerance": suite.tol,
            "worst_lhs": self.best_lhs,
            "worst_rhs": self.best_rhs,
            ("max_ratio" if suite.kind == "inequality" else "max_deviation"): self.best,
        }
        if suite.note:
            out["note"] = suite.note
        if self.violations:
            out["worst_witness"] = self.witness
        return out


def run_dimension(n: int, samples: int, identity_samples: int, seed: int, suites=None) -> list[dict]:
    """Run the chosen suites at one dimension, chunk by chunk."""
    chosen = [ALL_SUITES[s] for s in (suites or ALL_SUITES)]
    accs = [
        _Accumulator(s, n, samples if s.kind == "inequality" else identity_samples)
        for s in chosen
        if s.applies(n)
    ]
    total = max((a.samples for a in accs), default=0)
    k = chunk_rows(n)
    omega = _OmegaCache()
    for c, start in enumerate(range(0, total, k)):
        rows = min(k, total - start)
        cache: dict[str, np.ndarray] = {}
        omega.clear()

        def stream(name: str) -> np.ndarray:
            if name not in cache:
                rng = np.random.default_rng(np.random.SeedSequence([seed, n, STREAMS[name], c]))
                cache[name] = _draw(name, rng, n, rows)
            return cache[name]

        for acc in accs:
            take = min(rows, acc.remaining)
            step = acc.suite.max_batch(n)
            for lo in range(0, take, step):
                hi = min(take, lo + step)
                acc.update({name: stream(name)[lo:hi] for name in acc.suite.inputs}, omega)
    for acc in accs:
        log.info("%s n=%d score=%.6g violations=%d", acc.suite.suite_id, n, acc.best, acc.violations)
    return [a.summary() for a in accs]


def _run_dimension_args(args):
    return run_dimension(*args)


def run_all(dims=DEFAULT_DIMS, samples: int = 1000, seed: int = 0, identity_samples: int | None = None,
            suites=None, workers: int = 1) -> list[dict]:
    """Every applicable suite for every dimension; output ordered by suite, then dimension."""
    identity_samples = samples if identity_samples is None else identity_samples
    jobs = [(n, samples, identity_samples, seed, suites) for n in dims]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_dim = list(pool.map(_run_dimension_args, jobs))
    else:
        per_dim = [run_dimension(*job) for job in jobs]
    order = {sid: i for i, sid in enumerate(ALL_SUITES)}
    flat = [row for rows in per_dim for row in rows]
    return sorted(flat, key=lambda r: (order[r["id"]], r["dim"]))


def count_violations(rows: list[dict]) -> int:
    return sum(r["violations"] for r in rows)
