"""Pointwise curvature inequalities, exact identities and the rigidity constants.

Every ``*_sides`` function is vectorized over leading batch axes and returns
the two sides of one relation; the ``check_*`` functions wrap a single
sample into a :class:`~curvpinch.report.VerificationReport`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .report import VerificationReport
from .tensor_core import (
    PreconditionError,
    as_two_form_operator,
    cubic_trace,
    frob_norm_sq,
    inner4,
    kulkarni_nomizu,
    max_eigenvalue,
    max_eigenvalues,
    require_trace_free,
    require_traceless,
    weyl_cubic_1,
    weyl_cubic_2,
    weyl_ricci_contraction,
)

#: one-sided slack for inequalities, lhs <= rhs * (1 + INEQ_TOL)
INEQ_TOL = 1e-10
#: relative tolerance for exact identities in this module
IDENT_TOL = 1e-11

INEQUALITY_IDS = ("okumura", "huisken", "prop_alg", "tachibana", "eigen_bound")
IDENTITY_IDS = ("kn_rewrite", "combined_norm", "five_dim_identity")


# ---------------------------------------------------------------------------
# constants


def okumura_constant(n: int, variant: str = "sharp") -> float:
    """(n-2)/sqrt(n(n-1)), attained on diag(1, ..., 1, -(n-1)).

    ``variant="sqrt"`` gives sqrt((n-2)/(n(n-1))), which is too small for n > 3.
    """
    if variant == "sharp":
        return (n - 2) / math.sqrt(n * (n - 1))
    if variant == "sqrt":
        return math.sqrt((n - 2) / (n * (n - 1)))
    raise ValueError(f"unknown Okumura variant {variant!r}")


def huisken_constant(n: int) -> float:
    return math.sqrt((n - 2) / (2.0 * (n - 1)))


def eigen_constant(n: int) -> float:
    return math.sqrt((n - 2) * (n + 1) / (n * (n - 1.0)))


def tachibana_general(n: int) -> float:
    """1/2 sqrt((n-1)(n-2)(n+1)/n), the eigenvalue route bound valid in every n."""
    return 0.5 * math.sqrt((n - 1) * (n - 2) * (n + 1) / n)


CRUDE_C = 2.5


def C(n: int) -> float:
    if n < 4:
        raise PreconditionError("C(n) is defined for n >= 4")
    if n == 4:
        return math.sqrt(6) / 4
    if n == 5:
        return 1.0
    if n == 6:
        return math.sqrt(70) / (2 * math.sqrt(3))
    return 2.5


def A(n: int) -> float:
    if n < 4:
        raise PreconditionError("A(n) is defined for n >= 4")
    if n == 4:
        return 5 / (9 * math.sqrt(6))
    if n == 5:
        return 3 / 32
    if n == 6:
        return math.sqrt(3) / (5 * math.sqrt(70))
    if n <= 9:
        return (n - 2) / (20 * (n - 1))
    return 2 / (5 * n)


def C_symbolic(n: int) -> str:
    return {4: "sqrt(6)/4", 5: "1", 6: "sqrt(70)/(2*sqrt(3))"}.get(n, "5/2")


def A_symbolic(n: int) -> str:
    if n == 4:
        return "5/(9*sqrt(6))"
    if n == 5:
        return "3/32"
    if n == 6:
        return "sqrt(3)/(5*sqrt(70))"
    frac = Fraction(n - 2, 20 * (n - 1)) if n <= 9 else Fraction(2, 5 * n)
    return f"{frac.numerator}/{frac.denominator}"


def derive_A(n: int) -> float:
    """Largest A(n) allowed by the two constraints 2 C(n) A(n) <= b.

    In dimension four the refined Kato inequality gives the pair (5/18, 1/2);
    otherwise the pair is ((n-2)/(4(n-1)), 2/n).
    """
    if n < 4:
        raise PreconditionError("derive_A needs n >= 4")
    if n == 4:
        bounds = (5 / 18, 1 / 2)
    else:
        bounds = ((n - 2) / (4 * (n - 1)), 2 / n)
    return min(bounds) / (2 * C(n))


def pinchein_coefficient(n: int) -> dict:
    """Einstein-reduced pinching coefficient and its comparison with A(n)."""
    if n < 4:
        raise PreconditionError("pinchein_coefficient needs n >= 4")
    coeff = (8 * n - n * n - 8) / (4 * n * math.sqrt(2 * (n - 1) * (n - 2)))
    return {"coeff": coeff, "A": A(n), "strictly_below_A": coeff < A(n)}


def pinchein_coefficient_direct(n: int) -> float:
    """Same coefficient from the pinching constants with lambda V^(2/n) = Y/n."""
    return math.sqrt((n - 2) / (32 * (n - 1))) - abs(n - 4) / n * math.sqrt((n - 1) / (8 * (n - 2)))


@dataclass(frozen=True)
class ConstantsTable:
    C: dict
    A: dict

    @classmethod
    def build(cls, dims=range(4, 13)) -> "ConstantsTable":
        return cls(C={n: C(n) for n in dims}, A={n: A(n) for n in dims})

    def rows(self) -> list[dict]:
        out = []
        for n in sorted(self.C):
            derived = derive_A(n)
            pc = pinchein_coefficient(n)
            out.append(
                {
                    "n": n,
                    "C": self.C[n],
                    "C_symbolic": C_symbolic(n),
                    "A": self.A[n],
                    "A_symbolic": A_symbolic(n),
                    "derive_A": derived,
                    "agreement": abs(derived - self.A[n]) <= 1e-14 * self.A[n],
                    "pinchein_coeff": pc["coeff"],
                    "pinchein_below_A": pc["strictly_below_A"],
                }
            )
        return out


# ---------------------------------------------------------------------------
# vectorized sides


def _norm(x, rank):
    return np.sqrt(frob_norm_sq(x, rank))


def okumura_sides(t, variant: str = "sharp"):
    n = t.shape[-1]
    return np.abs(cubic_trace(t)), okumura_constant(n, variant) * _norm(t, 2) ** 3


def huisken_sides(w, t):
    n = t.shape[-1]
    return np.abs(weyl_ricci_contraction(w, t)), huisken_constant(n) * _norm(w, 4) * frob_norm_sq(t, 2)


def prop_alg_value(w, t):
    """-W_ijkl T_ik T_jl + 2/(n-2) tr T^3."""
    n = t.shape[-1]
    return -weyl_ricci_contraction(w, t) + 2.0 / (n - 2) * cubic_trace(t)


def prop_alg_sides(w, t):
    n = t.shape[-1]
    tsq = frob_norm_sq(t, 2)
    rhs = huisken_constant(n) * np.sqrt(frob_norm_sq(w, 4) + 8.0 / (n * (n - 2)) * tsq) * tsq
    return np.abs(prop_alg_value(w, t)), rhs


def kn_rewrite_sides(w, t):
    """prop_alg_value against -1/4 <W + T KN g / (n-2), T KN T>."""
    n = t.shape[-1]
    g = np.eye(n)
    rhs = -0.25 * inner4(w + kulkarni_nomizu(t, g) / (n - 2), kulkarni_nomizu(t, t))
    tsq = frob_norm_sq(t, 2)
    scale = (_norm(w, 4) + np.sqrt(tsq)) * tsq
    return prop_alg_value(w, t), rhs, scale


def combined_norm_sides(w, t):
    n = t.shape[-1]
    g = np.eye(n)
    shifted = w + math.sqrt(2) / (math.sqrt(n) * (n - 2)) * kulkarni_nomizu(t, g)
    rhs = frob_norm_sq(w, 4) + 8.0 / (n * (n - 2)) * frob_norm_sq(t, 2)
    return frob_norm_sq(shifted, 4), rhs, rhs


def tachibana_value(w):
    """2 W_ijkl W_ipkq W_pjql + 1/2 W_ijkl W_klpq W_pqij."""
    return 2.0 * weyl_cubic_1(w, check=False) + 0.5 * weyl_cubic_2(w, check=False)


def tachibana_sides(w, constant: float | None = None):
    n = w.shape[-1]
    c = C(n) if constant is None else constant
    return tachibana_value(w), c * _norm(w, 4) ** 3


def eigen_sides(w):
    n = w.shape[-1]
    mu = max_eigenvalues(as_two_form_operator(w))
    return 2.0 * mu, eigen_constant(n) * _norm(w, 4)


def five_dim_sides(w):
    """W_ijkl W_klpq W_pqij against 4 W_ijkl W_ipkq W_pjql."""
    return weyl_cubic_2(w, check=False), 4.0 * weyl_cubic_1(w, check=False), _norm(w, 4) ** 3


def five_dim_sides_observed(w):
    """The relation that holds numerically: W_ijkl W_klpq W_pqij = 2 W_ijkl W_ipkq W_pjql."""
    return weyl_cubic_2(w, check=False), 2.0 * weyl_cubic_1(w, check=False), _norm(w, 4) ** 3


# ---------------------------------------------------------------------------
# single-sample checkers


def check_okumura(t, tol: float = INEQ_TOL, variant: str = "sharp") -> VerificationReport:
    t = np.asarray(t, dtype=float)
    require_traceless(t)
    lhs, rhs = okumura_sides(t, variant)
    name = "okumura" if variant == "sharp" else "okumura_sqrt"
    return VerificationReport.inequality(name, t.shape[-1], lhs, rhs, tol, witness={"T": t})


def check_huisken(w, t, tol: float = INEQ_TOL) -> VerificationReport:
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    require_trace_free(w)
    require_traceless(t)
    lhs, rhs = huisken_sides(w, t)
    return VerificationReport.inequality("huisken", t.shape[-1], lhs, rhs, tol, witness={"W": w, "T": t})


def check_prop_alg(w, t, tol: float = INEQ_TOL, ident_tol: float = IDENT_TOL) -> VerificationReport:
    """Combined Weyl / traceless-Ricci estimate, plus its exact rewriting as an identity."""
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    require_trace_free(w)
    require_traceless(t)
    lhs, rhs = prop_alg_sides(w, t)
    ident = VerificationReport.identity("kn_rewrite", t.shape[-1], *kn_rewrite_sides(w, t), ident_tol)
    rep = VerificationReport.inequality(
        "prop_alg",
        t.shape[-1],
        lhs,
        rhs,
        tol,
        witness={"W": w, "T": t},
        details={"kn_rewrite": {"lhs": ident.lhs, "rhs": ident.rhs, "deviation": ident.deviation, "pass": ident.passed}},
    )
    if not ident.passed:
        return VerificationReport(**{**rep.__dict__, "passed": False, "witness": ident.witness})
    return rep


def check_tachibana(w, tol: float = INEQ_TOL) -> VerificationReport:
    """Cubic Weyl bound with C(n), and the Cauchy-Schwarz bound with 5/2."""
    w = np.asarray(w, dtype=float)
    require_trace_free(w)
    n = w.shape[-1]
    lhs, rhs = tachibana_sides(w)
    crude = VerificationReport.inequality("tachibana_crude", n, lhs, CRUDE_C * _norm(w, 4) ** 3, tol)
    details = {"crude_ratio": crude.ratio, "crude_pass": crude.passed}
    if n == 5:
        details["weyl_cubic_2"] = float(weyl_cubic_2(w, check=False))
    rep = VerificationReport.inequality("tachibana", n, lhs, rhs, tol, witness={"W": w}, details=details)
    if rep.passed and not crude.passed:
        return VerificationReport(**{**rep.__dict__, "passed": False})
    return rep


def check_eigen_bound(w, tol: float = INEQ_TOL) -> VerificationReport:
    w = np.asarray(w, dtype=float)
    require_trace_free(w)
    n = w.shape[-1]
    mu = max_eigenvalue(as_two_form_operator(w))
    rhs = eigen_constant(n) * float(_norm(w, 4))
    return VerificationReport.inequality("eigen_bound", n, 2.0 * mu, rhs, tol, witness={"W": w}, details={"mu": mu})


def check_combined_norm(w, t, tol: float = IDENT_TOL) -> VerificationReport:
    w = np.asarray(w, dtype=float)
    t = np.asarray(t, dtype=float)
    require_trace_free(w)
    require_traceless(t)
    return VerificationReport.identity(
        "combined_norm", t.shape[-1], *combined_norm_sides(w, t), tol, witness={"W": w, "T": t}
    )


def check_five_dim_identity(w, tol: float = IDENT_TOL) -> VerificationReport:
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != 5:
        raise PreconditionError("the five-dimensional identity needs n = 5")
    require_trace_free(w)
    lhs, rhs, scale = five_dim_sides(w)
    obs = five_dim_sides_observed(w)
    return VerificationReport.identity(
        "five_dim_identity",
        5,
        lhs,
        rhs,
        tol,
        scale=scale,
        witness={"W": w},
        details={"observed_factor_2": {"lhs": float(obs[0]), "rhs": float(obs[1])}},
    )
