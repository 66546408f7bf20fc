import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvpinch import inequalities as ineq
from curvpinch.tensor_core import PreconditionError, random_traceless_sym, random_weyl_like

seeds = st.integers(0, 2**32 - 1)
weyl_dims = st.integers(4, 7)


def okumura_witness(n):
    d = np.ones(n)
    d[-1] = -(n - 1)
    return np.diag(d)


# ---------------------------------------------------------------------------
# constants


def test_constant_table_values():
    assert ineq.C(4) == pytest.approx(math.sqrt(6) / 4, rel=1e-15)
    assert ineq.C(5) == 1.0
    assert ineq.C(6) == pytest.approx(math.sqrt(70) / (2 * math.sqrt(3)), rel=1e-15)
    assert ineq.C(11) == 2.5
    assert ineq.A(4) == pytest.approx(5 / (9 * math.sqrt(6)), rel=1e-15)
    assert ineq.A(5) == 3 / 32
    assert ineq.A(9) == pytest.approx(7 / 160, rel=1e-15)
    assert ineq.A(10) == pytest.approx(0.04, rel=1e-15)


@pytest.mark.parametrize("n", range(4, 13))
def test_derive_a_reproduces_table(n):
    assert ineq.derive_A(n) == pytest.approx(ineq.A(n), rel=1e-14)


@pytest.mark.parametrize("n,coeff,a", [(4, 0.14434, 0.22680), (5, 0.07144, 0.09375), (6, 0.02635, 0.04140)])
def test_pinchein_coefficient_below_a(n, coeff, a):
    pc = ineq.pinchein_coefficient(n)
    assert pc["coeff"] == pytest.approx(coeff, abs=1e-5)
    assert pc["A"] == pytest.approx(a, abs=1e-5)
    assert pc["strictly_below_A"]


@pytest.mark.parametrize("n", range(4, 13))
def test_pinchein_closed_form_matches_direct(n):
    assert ineq.pinchein_coefficient(n)["coeff"] == pytest.approx(ineq.pinchein_coefficient_direct(n), abs=1e-15)


def test_pinchein_n5_closed_form():
    assert ineq.pinchein_coefficient(5)["coeff"] == pytest.approx(7 / (20 * math.sqrt(24)), rel=1e-14)


def test_constants_reject_small_dimension():
    for fn in (ineq.C, ineq.A, ineq.derive_A, ineq.pinchein_coefficient):
        with pytest.raises(PreconditionError):
            fn(3)


def test_symbolic_strings():
    assert ineq.C_symbolic(6) == "sqrt(70)/(2*sqrt(3))"
    assert ineq.A_symbolic(9) == "7/160"
    assert ineq.A_symbolic(7) == "1/24"


def test_constants_table_agreement_column():
    rows = ineq.ConstantsTable.build().rows()
    assert [r["n"] for r in rows] == list(range(4, 13))
    assert all(r["agreement"] for r in rows)


def test_eigen_constant_is_dominated_by_huisken_route():
    # sanity: the eigenvalue constant is below 1 and increases to 1
    vals = [ineq.eigen_constant(n) for n in range(4, 20)]
    assert all(0 < v < 1 for v in vals)
    assert vals == sorted(vals)


# ---------------------------------------------------------------------------
# Okumura


@pytest.mark.parametrize("n", range(4, 11))
def test_okumura_witness_is_sharp(n):
    rep = ineq.check_okumura(okumura_witness(n))
    assert rep.ratio == pytest.approx(1.0, abs=1e-12)
    assert rep.passed


@pytest.mark.parametrize("n", range(4, 11))
def test_sqrt_okumura_constant_fails_on_witness(n):
    rep = ineq.check_okumura(okumura_witness(n), variant="sqrt")
    assert not rep.passed
    assert rep.ratio == pytest.approx(math.sqrt(n - 2), rel=1e-12)


@given(st.integers(3, 10), seeds)
def test_okumura_holds(n, seed):
    assert ineq.check_okumura(random_traceless_sym(n, seed)).passed


def test_okumura_scale_invariant(rng):
    t = random_traceless_sym(6, rng)
    assert ineq.check_okumura(7.5 * t).ratio == pytest.approx(ineq.check_okumura(t).ratio, rel=1e-13)


def test_okumura_requires_trace_free():
    with pytest.raises(PreconditionError):
        ineq.check_okumura(np.eye(4))


# ---------------------------------------------------------------------------
# Weyl inequalities


@given(weyl_dims, seeds)
def test_huisken_holds(n, seed):
    rng = np.random.default_rng(seed)
    assert ineq.check_huisken(random_weyl_like(n, rng), random_traceless_sym(n, rng)).passed


@given(weyl_dims, seeds)
def test_prop_alg_and_its_rewriting(n, seed):
    rng = np.random.default_rng(seed)
    rep = ineq.check_prop_alg(random_weyl_like(n, rng), random_traceless_sym(n, rng))
    assert rep.passed
    assert rep.details["kn_rewrite"]["pass"]


@pytest.mark.parametrize("n", range(4, 11))
def test_prop_alg_with_zero_weyl_attains_one(n):
    rep = ineq.check_prop_alg(np.zeros((n,) * 4), okumura_witness(n))
    assert rep.ratio == pytest.approx(1.0, abs=1e-12)


@given(weyl_dims, seeds)
def test_tachibana_and_crude_bound(n, seed):
    rep = ineq.check_tachibana(random_weyl_like(n, seed))
    assert rep.passed
    assert rep.details["crude_pass"]


@given(weyl_dims, seeds)
def test_eigen_bound(n, seed):
    assert ineq.check_eigen_bound(random_weyl_like(n, seed)).passed


@given(weyl_dims, seeds)
def test_combined_norm_identity(n, seed):
    rng = np.random.default_rng(seed)
    assert ineq.check_combined_norm(random_weyl_like(n, rng), random_traceless_sym(n, rng)).passed


def test_batched_sides_agree_with_checkers(rng):
    w = random_weyl_like(5, rng, 4)
    t = random_traceless_sym(5, rng, 4)
    lhs, rhs = ineq.prop_alg_sides(w, t)
    for b in range(4):
        rep = ineq.check_prop_alg(w[b], t[b])
        assert rep.lhs == pytest.approx(lhs[b], rel=1e-13)
        assert rep.rhs == pytest.approx(rhs[b], rel=1e-13)
    mu_lhs, _ = ineq.eigen_sides(w)
    assert ineq.check_eigen_bound(w[2]).lhs == pytest.approx(mu_lhs[2], rel=1e-12)


# ---------------------------------------------------------------------------
# five-dimensional relation


def test_five_dim_identity_as_written_fails(rng):
    rep = ineq.check_five_dim_identity(random_weyl_like(5, rng))
    assert not rep.passed
    obs = rep.details["observed_factor_2"]
    assert obs["lhs"] == pytest.approx(obs["rhs"], rel=1e-11)


@given(seeds)
def test_five_dim_factor_two_relation(seed):
    lhs, rhs, scale = ineq.five_dim_sides_observed(random_weyl_like(5, seed))
    assert abs(lhs - rhs) <= 1e-11 * scale


def test_five_dim_identity_needs_n5(rng):
    with pytest.raises(PreconditionError):
        ineq.check_five_dim_identity(random_weyl_like(6, rng))


def test_factor_two_relation_is_specific_to_low_dimension(rng):
    lhs, rhs, scale = ineq.five_dim_sides_observed(random_weyl_like(6, rng))
    assert abs(lhs - rhs) > 1e-3 * scale
