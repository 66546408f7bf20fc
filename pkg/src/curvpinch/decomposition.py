"""Weyl / traceless-Ricci / scalar split and the T + V + U split of Ric0 KN Ric0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .report import VerificationReport
from .tensor_core import (
    PreconditionError,
    frob_norm_sq,
    inner4,
    kulkarni_nomizu,
    require_trace_free,
    require_traceless,
    ricci_contract,
    trace,
    traceless,
)

#: relative tolerance for the decomposition identities
DECOMP_TOL = 1e-11


@dataclass(frozen=True)
class CurvDecomposition:
    weyl: np.ndarray
    ricci_part: np.ndarray
    scalar_part: np.ndarray

    def parts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.weyl, self.ricci_part, self.scalar_part

    def reconstruct(self) -> np.ndarray:
        return self.weyl + self.ricci_part + self.scalar_part


@dataclass(frozen=True)
class TVUDecomposition:
    t_part: np.ndarray
    v_part: np.ndarray
    u_part: np.ndarray

    def parts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.t_part, self.v_part, self.u_part


def decompose(rm) -> CurvDecomposition:
    """Split Rm into W + Ric0 KN g / (n-2) + R g KN g / (2n(n-1))."""
    rm = np.asarray(rm, dtype=float)
    n = rm.shape[-1]
    if n < 3:
        raise PreconditionError("the Weyl decomposition needs n >= 3")
    g = np.eye(n)
    ric = ricci_contract(rm)
    r = trace(ric)
    ricci_part = kulkarni_nomizu(traceless(ric), g) / (n - 2)
    scalar_part = (r / (2.0 * n * (n - 1)))[..., None, None, None, None] * kulkarni_nomizu(g, g)
    return CurvDecomposition(rm - ricci_part - scalar_part, ricci_part, scalar_part)


def weyl_projection(t4) -> np.ndarray:
    """Weyl part via a single product: W = Rm - P KN g with P = (Ric - R g / (2(n-1))) / (n-2)."""
    t4 = np.asarray(t4, dtype=float)
    n = t4.shape[-1]
    if n < 3:
        raise PreconditionError("the Weyl decomposition needs n >= 3")
    ric = ricci_contract(t4)
    p = (ric - (trace(ric) / (2.0 * (n - 1)))[..., None, None] * np.eye(n)) / (n - 2)
    return t4 - kulkarni_nomizu(p, np.eye(n))


def _v_u(t):
    n = t.shape[-1]
    g = np.eye(n)
    gg = kulkarni_nomizu(g, g)
    norm_sq = frob_norm_sq(t, 2)[..., None, None, None, None]
    t2 = t @ t
    v = -2.0 / (n - 2) * kulkarni_nomizu(t2, g) + 2.0 / (n * (n - 2)) * norm_sq * gg
    u = -1.0 / (n * (n - 1)) * norm_sq * gg
    return v, u


def tvu_decompose(t, check: bool = True) -> TVUDecomposition:
    """Orthogonal split T KN T = T-part + V + U for trace-free symmetric T.

    V and U are given in closed form; the totally trace-free part is the
    remainder.
    """
    t = np.asarray(t, dtype=float)
    if check:
        require_traceless(t)
    v, u = _v_u(t)
    return TVUDecomposition(kulkarni_nomizu(t, t) - v - u, v, u)


def tvu_norm_sides(t) -> dict[str, tuple]:
    """(lhs, rhs, scale) for the four squared-norm identities of the split."""
    t = np.asarray(t, dtype=float)
    n = t.shape[-1]
    parts = tvu_decompose(t, check=False)
    t4 = frob_norm_sq(t, 2) ** 2
    t2sq = frob_norm_sq(t @ t, 2)
    knsq = frob_norm_sq(kulkarni_nomizu(t, t), 4)
    tp, vp, up = (frob_norm_sq(p, 4) for p in parts.parts())
    scale = t4
    return {
        "kn_square": (knsq, 8.0 * t4 - 8.0 * t2sq, scale),
        "v_norm": (vp, 16.0 / (n - 2) * t2sq - 16.0 / (n * (n - 2)) * t4, scale),
        "u_norm": (up, 8.0 / (n * (n - 1)) * t4, scale),
        "t_plus_v": (tp + n / 2.0 * vp, 8.0 * (n - 2) / (n - 1) * t4, scale),
    }


def tvu_norm_identities(t, tol: float = DECOMP_TOL) -> VerificationReport:
    """All four squared-norm identities; the report carries the worst one."""
    t = np.asarray(t, dtype=float)
    require_traceless(t)
    reports = {
        key: VerificationReport.identity(key, t.shape[-1], float(l), float(r), tol, scale=float(s))
        for key, (l, r, s) in tvu_norm_sides(t).items()
    }
    worst = max(reports.values(), key=lambda rep: rep.deviation)
    details = {k: {"lhs": rep.lhs, "rhs": rep.rhs, "deviation": rep.deviation} for k, rep in reports.items()}
    return VerificationReport.identity(
        "tvu_norms",
        t.shape[-1],
        worst.lhs,
        worst.rhs,
        tol,
        scale=float(frob_norm_sq(t) ** 2),
        witness={"T": t},
        details=details,
    )


# ---------------------------------------------------------------------------
# Tachibana-type two-forms


def omega_tensor(w, p: int, q: int, r: int, s: int) -> np.ndarray:
    """The skew n x n matrix omega^(pqrs) built from a single Weyl tensor."""
    w = np.asarray(w, dtype=float)
    n = w.shape[-1]
    g = np.eye(n)
    half = (
        np.outer(w[:, q, r, s], g[:, p])
        + np.outer(w[p, :, r, s], g[:, q])
        + np.outer(w[p, q, :, s], g[:, r])
        + np.outer(w[p, q, r, :], g[:, s])
    )
    return half - half.T


def omega_all(w) -> np.ndarray:
    """All omega^(pqrs)_ij at once, shape (..., n, n, n, n, n, n) indexed [i, j, p, q, r, s]."""
    w = np.asarray(w, dtype=float)
    n = w.shape[-1]
    half = np.zeros(w.shape[:-4] + (n,) * 6)
    # each term is W with one slot moved to i, times a delta tying j to that slot
    for j in range(n):
        half[..., :, j, j, :, :, :] += w
        half[..., :, j, :, j, :, :] += np.swapaxes(w, -4, -3)
        half[..., :, j, :, :, j, :] += np.moveaxis(w, -2, -4)
        half[..., :, j, :, :, :, j] += np.moveaxis(w, -1, -4)
    return half - np.swapaxes(half, -6, -5)


def omega_sides(w):
    """Return (W omega omega / 16, sum |omega|^2) for single or batched W.

    omega^(pqrs)_ij is skew in (i, j), (p, q) and (r, s), and W is skew in its
    first pair, so every sum runs over ordered pairs with a factor of 2 each.
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[-1]
    a, b = np.triu_indices(n, 1)
    m = len(a)
    om = omega_all(w)[..., a, b, :, :, :, :][..., a, b, :, :][..., a, b]
    flat = om.reshape(om.shape[:-3] + (m, m * m))
    wm = w[..., a[:, None], b[:, None], a[None, :], b[None, :]]
    # the 2^4 from four ordered-pair sums cancels the 1/16
    contraction = np.sum(flat * (wm @ flat), axis=(-2, -1))
    return contraction, 8.0 * np.sum(flat * flat, axis=(-2, -1))


def omega_identities(w, tol: float = DECOMP_TOL) -> VerificationReport:
    """Check 2 W1 + W2 / 2 == (1/16) W omega omega and |omega|^2 == 8 (n-1) |W|^2.

    W1 and W2 are :func:`~curvpinch.tensor_core.weyl_cubic_1` and
    :func:`~curvpinch.tensor_core.weyl_cubic_2`. The report carries the worse
    of the two relative deviations; both are listed in ``details``.
    """
    from .tensor_core import weyl_cubic_1, weyl_cubic_2

    w = np.asarray(w, dtype=float)
    require_trace_free(w)
    n = w.shape[-1]
    wsq = frob_norm_sq(w)
    contraction, omsq = omega_sides(w)
    cubic = 2.0 * weyl_cubic_1(w, check=False) + 0.5 * weyl_cubic_2(w, check=False)
    omega_cubic = VerificationReport.identity("omega_cubic", n, float(cubic), float(contraction), tol, scale=wsq**1.5)
    norm = VerificationReport.identity("omega_norm", n, float(omsq), 8.0 * (n - 1) * wsq, tol, scale=wsq)
    worst = max((omega_cubic, norm), key=lambda rep: rep.deviation)
    details = {
        rep.inequality_id: {"lhs": rep.lhs, "rhs": rep.rhs, "deviation": rep.deviation} for rep in (omega_cubic, norm)
    }
    return VerificationReport.identity(
        "omega_identities", n, worst.lhs, worst.rhs, tol, scale=wsq**1.5 if worst is omega_cubic else wsq,
        witness={"W": w}, details=details,
    )


def part_inner_products(parts) -> list:
    """Pairwise full contractions among three rank-4 parts."""
    a, b, c = parts
    return [inner4(a, b), inner4(a, c), inner4(b, c)]
