"""Closed-form homogeneous geometries and the integral pinching functionals on them.

Every model is homogeneous, so each integral is the pointwise value times
the volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .decomposition import decompose
from .inequalities import A
from .report import VerificationReport
from .tensor_core import PreconditionError, frob_norm_sq, kulkarni_nomizu, ricci_contract, traceless

THEOREM_IDS = ("thm_4d", "cor_4d", "thm_ndim", "thm_einstein")

GAUSS_BONNET_TOL = 1e-9
SIGMA2_TOL = 1e-11
REWRITE_TOL = 1e-10
LAMBDA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModelGeometry:
    name: str
    dim: int
    rm: np.ndarray
    volume: float
    euler_char: int | None
    einstein: bool
    lam: float | None = None

    @cached_property
    def ric(self) -> np.ndarray:
        return ricci_contract(self.rm)

    @property
    def scalar(self) -> float:
        return float(np.trace(self.ric))

    @property
    def ric0_sq(self) -> float:
        return frob_norm_sq(traceless(self.ric))

    @cached_property
    def weyl(self) -> np.ndarray:
        return decompose(self.rm).weyl

    @property
    def weyl_sq(self) -> float:
        return frob_norm_sq(self.weyl)

    def integral(self, pointwise: float) -> float:
        return pointwise * self.volume


def sphere_volume(n: int, radius: float = 1.0) -> float:
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2) * radius**n


def _check_positive(**kw):
    for key, val in kw.items():
        if not (val > 0 and math.isfinite(val)):
            raise PreconditionError(f"{key} must be positive, got {val}")


def round_sphere(n: int, radius: float = 1.0) -> ModelGeometry:
    _check_positive(radius=radius)
    if n < 2:
        raise PreconditionError("sphere dimension must be >= 2")
    g = np.eye(n)
    rm = 0.5 * kulkarni_nomizu(g, g) / radius**2
    return ModelGeometry(
        name=f"sn:{n}" if n != 4 else "s4",
        dim=n,
        rm=rm,
        volume=sphere_volume(n, radius),
        euler_char=1 + (-1) ** n,
        einstein=True,
        lam=(n - 1) / radius**2,
    )


def product_spheres(radius1: float = 1.0, radius2: float = 1.0) -> ModelGeometry:
    """S^2(r1) x S^2(r2); Einstein exactly when r1 == r2."""
    _check_positive(radius1=radius1, radius2=radius2)
    rm = np.zeros((4, 4, 4, 4))
    for (a, b), r in (((0, 1), radius1), ((2, 3), radius2)):
        k = 1.0 / r**2
        rm[a, b, a, b] = rm[b, a, b, a] = k
        rm[a, b, b, a] = rm[b, a, a, b] = -k
    einstein = radius1 == radius2
    return ModelGeometry(
        name="s2xs2",
        dim=4,
        rm=rm,
        volume=(4 * math.pi * radius1**2) * (4 * math.pi * radius2**2),
        euler_char=4,
        einstein=einstein,
        lam=1.0 / radius1**2 if einstein else None,
    )


def flat_torus(n: int = 4, side: float = 1.0) -> ModelGeometry:
    _check_positive(side=side)
    return ModelGeometry(
        name="t4" if n == 4 else f"tn:{n}",
        dim=n,
        rm=np.zeros((n,) * 4),
        volume=side**n,
        euler_char=0,
        einstein=True,
        lam=0.0,
    )


def complex_structure(n: int = 4) -> np.ndarray:
    j = np.zeros((n, n))
    for a in range(0, n, 2):
        j[a, a + 1] = 1.0
        j[a + 1, a] = -1.0
    return j


def fubini_study_cp2() -> ModelGeometry:
    """CP^2 with holomorphic sectional curvature 4, so Ric = 6 g and volume pi^2 / 2."""
    g = np.eye(4)
    j = complex_structure(4)
    rm = (
        np.einsum("ik,jl->ijkl", g, g)
        - np.einsum("il,jk->ijkl", g, g)
        + np.einsum("ik,jl->ijkl", j, j)
        - np.einsum("il,jk->ijkl", j, j)
        + 2.0 * np.einsum("ij,kl->ijkl", j, j)
    )
    return ModelGeometry(
        name="cp2", dim=4, rm=rm, volume=math.pi**2 / 2, euler_char=3, einstein=True, lam=6.0
    )


def rescale(model: ModelGeometry, c: float) -> ModelGeometry:
    """Metric c^2 g: lengths times c, curvature components divided by c^2."""
    _check_positive(c=c)
    return replace(
        model,
        rm=model.rm / c**2,
        volume=model.volume * c**model.dim,
        lam=None if model.lam is None else model.lam / c**2,
    )


def catalog(name: str) -> ModelGeometry:
    """Look up a model by descriptor: s4, s2xs2, t4, cp2, sn:<n>, tn:<n>."""
    key = name.strip().lower()
    if key == "s4":
        return round_sphere(4)
    if key == "s2xs2":
        return product_spheres(1.0, 1.0)
    if key == "t4":
        return flat_torus(4)
    if key == "cp2":
        return fubini_study_cp2()
    prefix, _, arg = key.partition(":")
    if prefix in ("sn", "tn") and arg.isdigit():
        n = int(arg)
        if n < 2:
            raise PreconditionError(f"dimension too small in {name!r}")
        return round_sphere(n) if prefix == "sn" else flat_torus(n)
    raise PreconditionError(f"unknown model {name!r}")


CATALOG_NAMES = ("s4", "s2xs2", "t4", "cp2", "sn:5", "sn:6", "sn:7")


# ---------------------------------------------------------------------------
# Einstein reductions


def _require_einstein_positive(m: ModelGeometry) -> None:
    if not m.einstein:
        raise PreconditionError(f"{m.name} is not Einstein; its Yamabe invariant has no closed form here")
    if not m.scalar > 0:
        raise PreconditionError(f"{m.name} has scalar curvature {m.scalar:g} <= 0, not a shrinker")


def yamabe_einstein(m: ModelGeometry) -> float:
    """Y = V^((2-n)/n) * (R V) = R V^(2/n) for an Einstein metric with R > 0."""
    _require_einstein_positive(m)
    return m.scalar * m.volume ** (2.0 / m.dim)


def lambda_identity_check(m: ModelGeometry, tol: float = LAMBDA_TOL) -> VerificationReport:
    y = yamabe_einstein(m)
    lhs = m.lam * m.volume ** (2.0 / m.dim)
    return VerificationReport.identity("lambda_identity", m.dim, lhs, y / m.dim, tol)


@dataclass(frozen=True)
class PinchingVerdict:
    theorem_id: str
    model: str
    dim: int
    lhs: float
    rhs: float
    holds: bool
    strict: bool
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    @property
    def implies_rigidity(self) -> bool:
        """True only for a genuine (non-degenerate) pinched shrinker."""
        return self.holds and not self.degenerate

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "model": self.model,
            "dim": self.dim,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "holds": self.holds,
            "strict": self.strict,
            "degenerate": self.degenerate,
            "implies_rigidity": self.implies_rigidity,
        }


def _verdict(theorem_id, m, lhs, rhs, strict, degenerate=False) -> PinchingVerdict:
    holds = lhs < rhs if strict else lhs <= rhs
    return PinchingVerdict(theorem_id, m.name, m.dim, float(lhs), float(rhs), bool(holds), strict, degenerate)


def _require_dim(m: ModelGeometry, dim: int) -> None:
    if m.dim != dim:
        raise PreconditionError(f"{m.name} has dimension {m.dim}, expected {dim}")


def pinching_thm_4d(m: ModelGeometry) -> PinchingVerdict:
    _require_dim(m, 4)
    y = yamabe_einstein(m)
    lhs = m.integral(m.weyl_sq) + m.integral(m.ric0_sq)
    return _verdict("thm_4d", m, lhs, y**2 / 48.0, strict=True)


def pinching_cor_4d(m: ModelGeometry) -> PinchingVerdict:
    """Non-strict; flagged degenerate when R <= 0 since the model is not a shrinker."""
    _require_dim(m, 4)
    lhs = m.integral(m.weyl_sq) + 1.25 * m.integral(m.ric0_sq)
    rhs = m.integral(m.scalar**2) / 48.0
    return _verdict("cor_4d", m, lhs, rhs, strict=False, degenerate=not m.scalar > 0)


def combined_weyl_ricci_norm(m: ModelGeometry) -> float:
    """|W + sqrt(2)/(sqrt(n)(n-2)) Ric0 KN g| at a point."""
    n = m.dim
    g = np.eye(n)
    shifted = m.weyl + math.sqrt(2) / (math.sqrt(n) * (n - 2)) * kulkarni_nomizu(traceless(m.ric), g)
    return math.sqrt(frob_norm_sq(shifted))


def pinching_thm_ndim(m: ModelGeometry) -> PinchingVerdict:
    n = m.dim
    if n < 4:
        raise PreconditionError("the n-dimensional pinching needs n >= 4")
    y = yamabe_einstein(m)
    # (integral of |.|^(n/2))^(2/n) of a constant is |.| V^(2/n)
    vol_factor = m.volume ** (2.0 / n)
    lhs = combined_weyl_ricci_norm(m) * vol_factor + math.sqrt((n - 4) ** 2 * (n - 1) / (8 * (n - 2))) * m.lam * vol_factor
    rhs = math.sqrt((n - 2) / (32 * (n - 1))) * y
    return _verdict("thm_ndim", m, lhs, rhs, strict=n not in (5, 6))


def pinching_thm_einstein(m: ModelGeometry) -> PinchingVerdict:
    y = yamabe_einstein(m)
    lhs = math.sqrt(m.weyl_sq) * m.volume ** (2.0 / m.dim)
    return _verdict("thm_einstein", m, lhs, A(m.dim) * y, strict=True)


PINCHING = {
    "thm_4d": pinching_thm_4d,
    "cor_4d": pinching_cor_4d,
    "thm_ndim": pinching_thm_ndim,
    "thm_einstein": pinching_thm_einstein,
}


def evaluate(m: ModelGeometry, theorem_id: str) -> PinchingVerdict:
    if theorem_id not in PINCHING:
        raise PreconditionError(f"unknown theorem {theorem_id!r}")
    return PINCHING[theorem_id](m)


# ---------------------------------------------------------------------------
# four-dimensional integral formulas


def _require_chi(m: ModelGeometry) -> None:
    _require_dim(m, 4)
    if m.euler_char is None:
        raise PreconditionError(f"{m.name} has no Euler characteristic")


def gauss_bonnet_4d(m: ModelGeometry, tol: float = GAUSS_BONNET_TOL) -> VerificationReport:
    _require_chi(m)
    lhs = m.integral(m.weyl_sq - 2.0 * m.ric0_sq + m.scalar**2 / 6.0)
    rhs = 32.0 * math.pi**2 * m.euler_char
    # scale guards the flat case, where both sides vanish
    scale = m.integral(m.weyl_sq + 2.0 * m.ric0_sq + m.scalar**2 / 6.0)
    return VerificationReport.identity(
        "gauss_bonnet", 4, lhs, rhs, tol, scale=scale, details={"chi_computed": lhs / (32.0 * math.pi**2)}
    )


def schouten(m: ModelGeometry) -> np.ndarray:
    _require_dim(m, 4)
    return 0.5 * (m.ric - m.scalar / 6.0 * np.eye(4))


def sigma2(matrix: np.ndarray) -> float:
    """Second elementary symmetric function of the eigenvalues."""
    ev = np.linalg.eigvalsh(matrix)
    return float(sum(ev[i] * ev[j] for i in range(len(ev)) for j in range(i + 1, len(ev))))


def sigma2_gursky(m: ModelGeometry, tol: float = SIGMA2_TOL) -> VerificationReport:
    """sigma_2(A) against R^2/96 - |Ric0|^2/8, and Y^2 = 96 * integral sigma_2 on Einstein models."""
    _require_dim(m, 4)
    s2 = sigma2(schouten(m))
    closed = m.scalar**2 / 96.0 - m.ric0_sq / 8.0
    scale = m.scalar**2 / 96.0 + m.ric0_sq / 8.0
    pointwise = VerificationReport.identity("sigma2", 4, s2, closed, tol, scale=scale)
    details = {"sigma2": s2, "closed_form": closed, "pointwise_deviation": pointwise.deviation}
    if m.einstein and m.scalar > 0:
        y2 = yamabe_einstein(m) ** 2
        gursky = VerificationReport.identity("gursky_equality", 4, y2, 96.0 * m.integral(s2), tol)
        details.update(yamabe_sq=y2, gursky_deviation=gursky.deviation)
        worst = max((pointwise, gursky), key=lambda r: r.deviation)
    else:
        worst = pointwise
    return VerificationReport.identity(
        "sigma2_gursky", 4, worst.lhs, worst.rhs, tol, scale=scale if worst is pointwise else 0.0, details=details
    )


def gauss_bonnet_rewrite(m: ModelGeometry, tol: float = REWRITE_TOL) -> VerificationReport:
    """Pinching slack computed directly and via Gauss-Bonnet, plus the equivalent chi form."""
    _require_chi(m)
    w2 = m.integral(m.weyl_sq)
    r0 = m.integral(m.ric0_sq)
    r2 = m.integral(m.scalar**2)
    chi = m.euler_char
    slack_direct = w2 + 1.25 * r0 - r2 / 48.0
    slack_rewritten = 13.0 / 8.0 * w2 + r2 / 12.0 - 20.0 * math.pi**2 * chi
    chi_form_lhs = w2 + 2.0 / 39.0 * r2
    chi_form_rhs = 160.0 / 13.0 * math.pi**2 * chi
    scale = w2 + r0 + r2
    equivalent = (slack_direct <= 0) == (chi_form_lhs <= chi_form_rhs)
    rep = VerificationReport.identity(
        "gauss_bonnet_rewrite",
        4,
        slack_direct,
        slack_rewritten,
        tol,
        scale=scale,
        details={
            "inequality_holds": slack_direct <= 0,
            "chi_form_lhs": chi_form_lhs,
            "chi_form_rhs": chi_form_rhs,
            "chi_form_holds": chi_form_lhs <= chi_form_rhs,
            "equivalent": equivalent,
        },
    )
    if not equivalent:
        return replace(rep, passed=False)
    return rep
