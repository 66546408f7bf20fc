"""Dense tensor arithmetic in an orthonormal frame.

Symmetric 2-tensors are ``(..., n, n)`` arrays and algebraic curvature
tensors are ``(..., n, n, n, n)`` arrays. The metric is the identity, so
every norm is a plain sum of squares. All functions accept leading batch
axes unless noted otherwise.
"""

from __future__ import annotations

import numpy as np

from .report import VerificationReport, relative_deviation

#: relative tolerance for exact identities evaluated in this module
IDENTITY_TOL = 1e-12
#: tolerance on single g-traces for a tensor to count as totally trace-free
TRACE_FREE_TOL = 1e-10
#: eigen-solver residual bound, relative to the operator norm
EIGEN_RESIDUAL_TOL = 1e-11


class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class EigenSolverError(RuntimeError):
    """The symmetric eigen-solver failed or returned an inaccurate pair."""


def _as_float(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def dim_of(t: np.ndarray) -> int:
    return int(np.shape(t)[-1])


def frob_norm_sq(t, rank: int | None = None):
    """Sum of squared components.

    With ``rank=None`` every axis is summed; otherwise only the trailing
    ``rank`` axes, which keeps leading batch axes.
    """
    t = _as_float(t)
    if rank is None:
        return float(np.sum(t * t))
    return np.sum(t * t, axis=tuple(range(-rank, 0)))


def inner4(a, b):
    """Full contraction a_ijkl b_ijkl."""
    return np.einsum("...ijkl,...ijkl->...", a, b)


def identity(n: int) -> np.ndarray:
    return np.eye(n)


def kulkarni_nomizu(a, b) -> np.ndarray:
    """(A KN B)_ijkl = A_ik B_jl - A_il B_jk - A_jk B_il + A_jl B_ik."""
    a = _as_float(a)
    b = _as_float(b)
    if a.shape[-2:] != b.shape[-2:] or a.shape[-1] != a.shape[-2]:
        raise PreconditionError(
            f"Kulkarni-Nomizu factors must be square of equal size, got {a.shape} and {b.shape}"
        )
    ab = np.einsum("...ik,...jl->...ijkl", a, b)
    # the last three terms are index permutations of the first and of its (a<->b) swap
    ba = np.einsum("...ik,...jl->...ijkl", b, a)
    return ab - np.swapaxes(ab, -1, -2) - np.swapaxes(ba, -1, -2) + ba


def ricci_contract(rm) -> np.ndarray:
    """R_ik = sum_j Rm_ijkj."""
    return np.einsum("...ijkj->...ik", _as_float(rm))


def scalar_curv(rm):
    return np.trace(ricci_contract(rm), axis1=-2, axis2=-1)


def trace(s):
    return np.trace(_as_float(s), axis1=-2, axis2=-1)


def traceless(s) -> np.ndarray:
    s = _as_float(s)
    n = s.shape[-1]
    return s - (trace(s) / n)[..., None, None] * np.eye(n)


def cubic_trace(t):
    """T_ij T_jk T_ik."""
    t = _as_float(t)
    return np.einsum("...ij,...jk,...ik->...", t, t, t)


def cubic_ricci_sides(s):
    """Both sides of R_ij R_jk R_ik = tr(Ric0^3) + (3/n) R |Ric|^2 - (2/n^2) R^3."""
    s = _as_float(s)
    n = s.shape[-1]
    r = trace(s)
    lhs = cubic_trace(s)
    rhs = cubic_trace(traceless(s)) + 3.0 / n * r * frob_norm_sq(s, 2) - 2.0 / n**2 * r**3
    scale = frob_norm_sq(s, 2) ** 1.5
    return lhs, rhs, scale


def cubic_ricci_identity_check(s, tol: float = IDENTITY_TOL) -> VerificationReport:
    """Check the cubic Ricci expansion for a single symmetric matrix ``s``."""
    lhs, rhs, scale = cubic_ricci_sides(s)
    return VerificationReport.identity(
        "cubic_ricci", dim_of(s), float(lhs), float(rhs), tol, scale=float(scale), witness={"S": s}
    )


def single_traces(t4) -> list[np.ndarray]:
    """The six single g-traces of a rank-4 tensor (pairs of slots contracted)."""
    t4 = _as_float(t4)
    return [
        np.einsum("...iikl->...kl", t4),
        np.einsum("...ijil->...jl", t4),
        np.einsum("...ijki->...jk", t4),
        np.einsum("...ijjl->...il", t4),
        np.einsum("...ijkj->...ik", t4),
        np.einsum("...ijkk->...ij", t4),
    ]


def max_trace_defect(t4):
    return max(float(np.max(np.abs(tr))) if tr.size else 0.0 for tr in single_traces(t4))


def is_trace_free(t4, tol: float = TRACE_FREE_TOL) -> bool:
    """True when every single trace is below ``tol`` relative to max(1, |T|)."""
    t4 = _as_float(t4)
    scale = max(1.0, float(np.sqrt(np.max(frob_norm_sq(t4, 4)))))
    return max_trace_defect(t4) <= tol * scale


def require_trace_free(t4, what: str = "W") -> None:
    if not is_trace_free(t4):
        raise PreconditionError(f"{what} is not totally trace-free (max trace {max_trace_defect(t4):.3e})")


def require_traceless(s, what: str = "T", tol: float = 1e-12) -> None:
    s = _as_float(s)
    scale = max(1.0, float(np.sqrt(np.max(frob_norm_sq(s, 2)))))
    if np.max(np.abs(trace(s))) > tol * scale:
        raise PreconditionError(f"{what} is not trace-free (trace {np.max(np.abs(trace(s))):.3e})")


def symmetry_defect(t4) -> float:
    """Largest violation of the four Riemann index symmetries and first Bianchi."""
    t4 = _as_float(t4)
    defects = [
        t4 + np.swapaxes(t4, -4, -3),
        t4 + np.swapaxes(t4, -2, -1),
        t4 - np.moveaxis(t4, (-4, -3), (-2, -1)),
        bianchi_sum(t4),
    ]
    return max(float(np.max(np.abs(d))) for d in defects)


def bianchi_sum(t4) -> np.ndarray:
    """T_ijkl + T_jkil + T_kijl."""
    t4 = _as_float(t4)
    # T_jkil as an array indexed [i,j,k,l]: source axes (j,k,i,l)
    return (
        t4
        + np.einsum("...jkil->...ijkl", t4)
        + np.einsum("...kijl->...ijkl", t4)
    )


def weyl_ricci_contraction(w, t):
    """W_ijkl T_ik T_jl."""
    return np.einsum("...ijkl,...ik,...jl->...", _as_float(w), _as_float(t), _as_float(t))


def _pair_matrix(w) -> np.ndarray:
    """Reshape W_ijkl to the n^2 x n^2 matrix indexed [(ij), (kl)]."""
    w = _as_float(w)
    n = w.shape[-1]
    return w.reshape(w.shape[:-4] + (n * n, n * n))


def _cross_matrix(w) -> np.ndarray:
    """Reshape W_ijkl to the matrix indexed [(ik), (jl)]."""
    w = _as_float(w)
    n = w.shape[-1]
    return np.swapaxes(w, -3, -2).reshape(w.shape[:-4] + (n * n, n * n))


def weyl_cubic_1(w, check: bool = True):
    """W_ijkl W_ipkq W_pjql, computed as sum(B * (B @ B)) with B[(ik),(jl)] = W_ijkl."""
    if check:
        require_trace_free(w)
    b = _cross_matrix(w)
    return np.sum(b * (b @ b), axis=(-2, -1))


def weyl_cubic_2(w, check: bool = True):
    """W_ijkl W_klpq W_pqij = tr(M^3) with M[(ij),(kl)] = W_ijkl."""
    if check:
        require_trace_free(w)
    m = _pair_matrix(w)
    return np.sum(m * np.swapaxes(m @ m, -1, -2), axis=(-2, -1))


def two_form_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j), i < j, in lexicographic order."""
    i, j = np.triu_indices(n, k=1)
    return i, j


def as_two_form_operator(t4) -> np.ndarray:
    """Matrix of w -> 1/2 T_ijkl w_ij in the basis e_i ^ e_j, i < j.

    Coordinates are w_ij for i < j, so the matrix entry for row (k,l) and
    column (i,j) is T_ijkl. With this convention g KN g maps to 2 * identity
    and the squared Frobenius norm of the matrix is |T|^2 / 4.
    """
    t4 = _as_float(t4)
    i, j = two_form_index(t4.shape[-1])
    return t4[..., i[None, :], j[None, :], i[:, None], j[:, None]]


def max_eigenvalue(op) -> float:
    """Largest eigenvalue of a single symmetric operator matrix."""
    op = _as_float(op)
    if op.size == 0:
        return 0.0
    if not np.all(np.isfinite(op)):
        raise EigenSolverError("operator has non-finite entries")
    try:
        vals, vecs = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    mu = float(vals[-1])
    v = vecs[:, -1]
    resid = float(np.linalg.norm(op @ v - mu * v))
    scale = max(1.0, float(np.linalg.norm(op)))
    if not np.isfinite(mu) or not resid <= EIGEN_RESIDUAL_TOL * scale:
        raise EigenSolverError(f"eigenpair residual {resid:.3e} exceeds tolerance")
    return mu


def max_eigenvalues(ops) -> np.ndarray:
    """Batched largest eigenvalues, no residual check."""
    try:
        return np.linalg.eigvalsh(_as_float(ops))[..., -1]
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc


# ---------------------------------------------------------------------------
# seeded random tensors


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_sym(n: int, seed=None, size=None) -> np.ndarray:
    rng = make_rng(seed)
    shape = (() if size is None else tuple(np.atleast_1d(size))) + (n, n)
    x = rng.standard_normal(shape)
    return 0.5 * (x + np.swapaxes(x, -1, -2))


def random_traceless_sym(n: int, seed=None, size=None) -> np.ndarray:
    return traceless(random_sym(n, seed, size))


def random_curvature(n: int, seed=None, size=None) -> np.ndarray:
    """Sum over a = 1..n of S_a KN S_a for independent random symmetric S_a."""
    if n < 3:
        raise PreconditionError("random curvature tensors need n >= 3")
    rng = make_rng(seed)
    batch = () if size is None else tuple(np.atleast_1d(size))
    s = random_sym(n, rng, batch + (n,)).reshape(batch + (n, n * n))
    # P_ijkl = sum_a S_a,ik S_a,jl, then S KN S summed over a = 2 (P_ijkl - P_ijlk)
    p = (np.swapaxes(s, -1, -2) @ s).reshape(batch + (n, n, n, n))
    p = np.swapaxes(p, -3, -2)
    return 2.0 * (p - np.swapaxes(p, -1, -2))


def random_weyl_like(n: int, seed=None, size=None) -> np.ndarray:
    """Weyl part of :func:`random_curvature`; identically zero for n = 3."""
    from .decomposition import weyl_projection

    return weyl_projection(random_curvature(n, seed, size))


def random_orthogonal(n: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def rotate2(s, q) -> np.ndarray:
    return np.einsum("ia,jb,...ab->...ij", q, q, s)


def rotate4(t4, q) -> np.ndarray:
    return np.einsum("ia,jb,kc,ld,...abcd->...ijkl", q, q, q, q, t4)


# ---------------------------------------------------------------------------
# serialization


def tensor_to_dict(t) -> dict:
    """Flat row-major payload with a {dim, rank} header."""
    t = _as_float(t)
    return {"dim": int(t.shape[-1]) if t.ndim else 0, "rank": int(t.ndim), "data": t.ravel().tolist()}


def tensor_from_dict(d: dict) -> np.ndarray:
    shape = (d["dim"],) * d["rank"]
    return np.asarray(d["data"], dtype=float).reshape(shape)


__all__ = [
    "EigenSolverError",
    "PreconditionError",
    "as_two_form_operator",
    "bianchi_sum",
    "cubic_ricci_identity_check",
    "cubic_trace",
    "frob_norm_sq",
    "kulkarni_nomizu",
    "max_eigenvalue",
    "random_curvature",
    "random_traceless_sym",
    "random_weyl_like",
    "ricci_contract",
    "scalar_curv",
    "traceless",
    "weyl_cubic_1",
    "weyl_cubic_2",
    "weyl_ricci_contraction",
]
