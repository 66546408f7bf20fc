"""Projected gradient ascent of inequality ratios over unit tensors.

Each tensor space (trace-free symmetric matrices, Weyl-like tensors) is
parametrized by an orthonormal basis, so the Frobenius norm of a tensor is
the Euclidean norm of its coordinates and every iterate stays in the space
by construction. The gradient of the ratio is taken by central finite
differences over all basis directions at once.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import inequalities as ineq
from .tensor_core import PreconditionError, random_weyl_like, tensor_to_dict

log = logging.getLogger(__name__)


class InequalityViolation(RuntimeError):
    """A search iterate beat the claimed constant; carries the offending tensors."""

    def __init__(self, inequality_id: str, dim: int, ratio: float, witness: dict):
        super().__init__(f"{inequality_id} ratio {ratio:.17g} exceeds 1 at n={dim}")
        self.inequality_id = inequality_id
        self.dim = dim
        self.ratio = ratio
        self.witness = witness


@dataclass(frozen=True)
class SearchConfig:
    inequality_id: str
    dim: int
    restarts: int = 64
    max_iters: int = 500
    step_size: float = 0.05
    fd_step: float = 1e-5
    seed: int = 0
    tolerance: float = 1e-9
    #: stop a restart once the tangential gradient norm drops below this
    grad_tol: float = 1e-8
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise PreconditionError("restarts and max_iters must be >= 1")
        if not (self.step_size > 0 and self.fd_step > 0):
            raise PreconditionError("step_size and fd_step must be positive")
        if self.inequality_id not in TARGETS:
            raise PreconditionError(f"unknown inequality {self.inequality_id!r}; choose from {sorted(TARGETS)}")
        if self.dim < 4 and TARGETS[self.inequality_id].needs_weyl:
            raise PreconditionError("Weyl targets need n >= 4")
        if self.dim < 3:
            raise PreconditionError("dimension must be >= 3")


@dataclass
class SharpnessResult:
    inequality_id: str
    dim: int
    best_ratio: float
    argmax: dict
    iters_used: int
    converged: bool
    best_restart: int
    restart_ratios: list = field(default_factory=list)
    empirical: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# bases


def traceless_basis(n: int) -> np.ndarray:
    """Orthonormal basis of trace-free symmetric n x n matrices, shape (n(n+1)/2 - 1, n, n)."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = 1 / math.sqrt(2)
            out.append(e)
    # orthonormal sum-zero vectors: the columns of a QR of the centering matrix
    q, _ = np.linalg.qr(np.eye(n) - 1.0 / n)
    for k in range(n - 1):
        out.append(np.diag(q[:, k]))
    return np.array(out)


def weyl_dimension(n: int) -> int:
    return n * n * (n * n - 1) // 12 - n * (n + 1) // 2


@lru_cache(maxsize=None)
def weyl_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the Weyl space from the SVD of random Weyl tensors."""
    d = weyl_dimension(n)
    rng = np.random.default_rng(np.random.SeedSequence([n, 0x57E1]))
    samples = random_weyl_like(n, rng, d + 20).reshape(d + 20, n**4)
    _, s, vt = np.linalg.svd(samples, full_matrices=False)
    if s[d - 1] < 1e-8 * s[0] or (len(s) > d and s[d] > 1e-8 * s[0]):
        raise RuntimeError(f"Weyl space rank at n={n} is not {d}")
    basis = vt[:d].reshape(d, n, n, n, n)
    basis.setflags(write=False)
    return basis


def _basis(kind: str, n: int) -> np.ndarray:
    return weyl_basis(n) if kind == "W" else traceless_basis(n)


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class Target:
    blocks: tuple
    sides: Callable
    #: "joint": one unit sphere over all coordinates; "product": one sphere per block
    sphere: str = "product"

    @property
    def needs_weyl(self) -> bool:
        return "W" in self.blocks


def _prop_alg_w0_sides(t):
    w = np.zeros(t.shape[:-2] + (t.shape[-1],) * 4)
    return ineq.prop_alg_sides(w, t)


TARGETS = {
    "okumura": Target(("T",), ineq.okumura_sides),
    "huisken": Target(("W", "T"), ineq.huisken_sides),
    # the value mixes degree (1, 2) and (0, 3) terms in (W, T): only joint scaling leaves the ratio fixed
    "prop_alg": Target(("W", "T"), ineq.prop_alg_sides, sphere="joint"),
    "prop_alg_W0": Target(("T",), _prop_alg_w0_sides),
    "tachibana": Target(("W",), ineq.tachibana_sides),
    "eigen_bound": Target(("W",), ineq.eigen_sides),
}


class _Problem:
    """Coordinates <-> tensors and the batched ratio for one (target, n)."""

    def __init__(self, inequality_id: str, n: int):
        self.inequality_id = inequality_id
        self.n = n
        self.target = TARGETS[inequality_id]
        self.bases = [_basis(kind, n) for kind in self.target.blocks]
        self.sizes = [len(b) for b in self.bases]
        self.splits = np.cumsum(self.sizes)[:-1]
        self.size = int(sum(self.sizes))

    def tensors(self, x: np.ndarray) -> list[np.ndarray]:
        """Coordinates of shape (..., size) to a list of tensors, one per block."""
        return [np.tensordot(part, b, axes=(-1, 0)) for part, b in zip(np.split(x, self.splits, axis=-1), self.bases)]

    def sides(self, x: np.ndarray):
        return self.target.sides(*self.tensors(x))

    def ratio(self, x: np.ndarray) -> np.ndarray:
        return self._ratio_of(self.tensors(x))

    def _ratio_of(self, tensors) -> np.ndarray:
        lhs, rhs = self.target.sides(*tensors)
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        return np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.nan)

    def project(self, x: np.ndarray) -> np.ndarray:
        if self.target.sphere == "joint":
            return x / np.linalg.norm(x)
        parts = [p / np.linalg.norm(p) for p in np.split(x, self.splits)]
        return np.concatenate(parts)

    def tangent(self, x: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Remove the radial component(s) of g at x."""
        if self.target.sphere == "joint":
            return g - np.dot(g, x) * x
        xs = np.split(x, self.splits)
        gs = np.split(g, self.splits)
        return np.concatenate([gp - np.dot(gp, xp) * xp for gp, xp in zip(gs, xs)])

    def gradient(self, x: np.ndarray, h: float) -> np.ndarray:
        """Central-difference gradient in all coordinates.

        Moving coordinate a of block k by h moves tensor k by h * basis_k[a],
        so the perturbed tensors are built directly and evaluated as a batch.
        """
        base = self.tensors(x)
        out = []
        for k, b in enumerate(self.bases):
            vals = []
            for sign in (1.0, -1.0):
                args = [
                    base[j] + sign * h * b if j == k else np.broadcast_to(base[j], (len(b),) + base[j].shape)
                    for j in range(len(base))
                ]
                vals.append(self._ratio_of(args))
            out.append((vals[0] - vals[1]) / (2.0 * h))
        return np.concatenate(out)

    def witness(self, x: np.ndarray) -> dict:
        return {kind: tensor_to_dict(t) for kind, t in zip(self.target.blocks, self.tensors(x))}

    def random_start(self, rng: np.random.Generator) -> np.ndarray:
        while True:
            x = self.project(rng.standard_normal(self.size))
            r = float(self.ratio(x))
            if math.isfinite(r):
                return x


def fd_directional(f: Callable, x: np.ndarray, v: np.ndarray, h: float) -> float:
    """Central difference (f(x + h v) - f(x - h v)) / 2h."""
    return float((f(x + h * v) - f(x - h * v)) / (2.0 * h))


def _check(problem: _Problem, cfg: SearchConfig, x: np.ndarray, r: float) -> None:
    if r > 1.0 + cfg.tolerance:
        raise InequalityViolation(cfg.inequality_id, cfg.dim, r, problem.witness(x))


def ascend(problem: _Problem, cfg: SearchConfig, x: np.ndarray, on_step: Callable | None = None):
    """One restart. Returns (best_ratio, best_x, iters_used, converged, best_history).

    ``on_step(x, ratio)`` is called on every projected iterate.
    """
    r = float(problem.ratio(x))
    _check(problem, cfg, x, r)
    best, best_x = r, x
    history = [best]
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = problem.tangent(x, problem.gradient(x, cfg.fd_step))
        if np.linalg.norm(g) < cfg.grad_tol:
            converged = True
            it -= 1
            break
        x = problem.project(x + cfg.step_size * g)
        r = float(problem.ratio(x))
        if on_step is not None:
            on_step(x, r)
        _check(problem, cfg, x, r)
        if r > best:
            best, best_x = r, x
        history.append(best)
    return best, best_x, it, converged, history


def _run_restart(args):
    cfg, k = args
    problem = _Problem(cfg.inequality_id, cfg.dim)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, cfg.dim, k]))
    best, x, iters, converged, _ = ascend(problem, cfg, problem.random_start(rng))
    return best, x, iters, converged


def maximize_ratio(cfg: SearchConfig) -> SharpnessResult:
    """Best ratio over all restarts; raises InequalityViolation if any iterate exceeds 1 + tolerance."""
    jobs = [(cfg, k) for k in range(cfg.restarts)]
    if cfg.workers > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(_run_restart, jobs))
    else:
        runs = [_run_restart(job) for job in jobs]
    # lowest restart index wins ties
    k_best = max(range(len(runs)), key=lambda k: (runs[k][0], -k))
    best, x, iters, converged = runs[k_best]
    problem = _Problem(cfg.inequality_id, cfg.dim)
    log.info("%s n=%d best ratio %.12f (restart %d)", cfg.inequality_id, cfg.dim, best, k_best)
    return SharpnessResult(
        inequality_id=cfg.inequality_id,
        dim=cfg.dim,
        best_ratio=best,
        argmax=problem.witness(x),
        iters_used=iters,
        converged=converged,
        best_restart=k_best,
        restart_ratios=[r[0] for r in runs],
    )


def equality_witness(inequality_id: str, n: int) -> np.ndarray:
    """diag(1, ..., 1, -(n-1)) at unit norm, for the targets where it is extremal."""
    if inequality_id not in ("okumura", "prop_alg_W0"):
        raise PreconditionError(f"no analytic witness registered for {inequality_id!r}")
    d = np.ones(n)
    d[-1] = -(n - 1)
    return np.diag(d / np.linalg.norm(d))


def witness_ratio(inequality_id: str, n: int) -> float:
    t = equality_witness(inequality_id, n)
    lhs, rhs = TARGETS[inequality_id].sides(t)
    return float(lhs / rhs)
