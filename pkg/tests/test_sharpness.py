import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvpinch import sharpness as sh
from curvpinch.tensor_core import (
    PreconditionError,
    bianchi_sum,
    frob_norm_sq,
    max_trace_defect,
    symmetry_defect,
    tensor_from_dict,
    trace,
)


def test_config_validation():
    for kwargs in ({"restarts": 0}, {"max_iters": 0}, {"step_size": 0.0}, {"fd_step": -1e-5}):
        with pytest.raises(PreconditionError):
            sh.SearchConfig("okumura", 4, **kwargs)
    with pytest.raises(PreconditionError):
        sh.SearchConfig("nonsense", 4)
    with pytest.raises(PreconditionError):
        sh.SearchConfig("tachibana", 3)


def test_config_defaults():
    cfg = sh.SearchConfig("okumura", 4)
    assert (cfg.restarts, cfg.max_iters, cfg.step_size, cfg.fd_step, cfg.tolerance) == (64, 500, 0.05, 1e-5, 1e-9)


@pytest.mark.parametrize("n", [3, 4, 7])
def test_traceless_basis_is_orthonormal(n):
    b = sh.traceless_basis(n)
    assert len(b) == n * (n + 1) // 2 - 1
    gram = np.einsum("aij,bij->ab", b, b)
    np.testing.assert_allclose(gram, np.eye(len(b)), atol=1e-14)
    assert np.abs(trace(b)).max() < 1e-14
    np.testing.assert_array_equal(b, np.swapaxes(b, -1, -2))


@pytest.mark.parametrize("n", [4, 5, 6])
def test_weyl_basis_spans_weyl_space(n):
    b = sh.weyl_basis(n)
    assert len(b) == sh.weyl_dimension(n)
    gram = np.einsum("aijkl,bijkl->ab", b, b)
    np.testing.assert_allclose(gram, np.eye(len(b)), atol=1e-12)
    assert max_trace_defect(b) < 1e-12
    assert symmetry_defect(b) < 1e-12
    assert np.abs(bianchi_sum(b)).max() < 1e-12


def test_weyl_dimension_formula():
    # n = 4: 10, n = 5: 35, n = 6: 84
    assert [sh.weyl_dimension(n) for n in (4, 5, 6)] == [10, 35, 84]


@pytest.mark.parametrize("ineq_id", ["okumura", "huisken", "prop_alg", "tachibana", "eigen_bound"])
def test_iterates_stay_on_constraint_manifold(ineq_id):
    n = 5
    cfg = sh.SearchConfig(ineq_id, n, restarts=1, max_iters=25)
    problem = sh._Problem(ineq_id, n)
    x0 = problem.random_start(np.random.default_rng(3))
    history_ratios = []

    def on_step(x, r):
        history_ratios.append(r)
        tensors = problem.tensors(x)
        norms = [frob_norm_sq(t) for t in tensors]
        if problem.target.sphere == "joint":
            assert abs(sum(norms) - 1) < 1e-10
        else:
            assert all(abs(v - 1) < 1e-10 for v in norms)
        for kind, t in zip(problem.target.blocks, tensors):
            if kind == "T":
                assert abs(trace(t)) < 1e-10
                assert np.abs(t - t.T).max() < 1e-10
            else:
                assert max_trace_defect(t) < 1e-10
                assert symmetry_defect(t) < 1e-10

    best, _, iters, _, history = sh.ascend(problem, cfg, x0, on_step=on_step)
    assert len(history_ratios) == iters
    assert all(b2 >= b1 for b1, b2 in zip(history, history[1:]))
    assert best == max([history[0]] + history_ratios)


def test_okumura_recovers_witness():
    res = sh.maximize_ratio(sh.SearchConfig("okumura", 4, restarts=8))
    assert res.best_ratio >= 0.999
    assert res.best_ratio <= 1 + 1e-9
    t = tensor_from_dict(res.argmax["T"])
    ev = np.sort(np.linalg.eigvalsh(-t * np.sign(np.trace(t @ t @ t))))
    np.testing.assert_allclose(ev, np.array([-3.0, 1.0, 1.0, 1.0]) / math.sqrt(12), atol=1e-4)


def test_prop_alg_with_frozen_weyl():
    res = sh.maximize_ratio(sh.SearchConfig("prop_alg_W0", 5, restarts=8))
    assert res.best_ratio >= 0.999


def test_tachibana_n5_stays_below_one():
    res = sh.maximize_ratio(sh.SearchConfig("tachibana", 5))
    assert 0 < res.best_ratio <= 1 + 1e-9
    assert res.empirical


def test_determinism_and_parallel_restarts_agree():
    cfg = sh.SearchConfig("tachibana", 4, restarts=4, max_iters=60, seed=11)
    a = sh.maximize_ratio(cfg)
    b = sh.maximize_ratio(cfg)
    assert a.best_ratio == b.best_ratio
    assert a.argmax == b.argmax
    c = sh.maximize_ratio(sh.SearchConfig("tachibana", 4, restarts=4, max_iters=60, seed=11, workers=2))
    assert c.best_ratio == a.best_ratio and c.best_restart == a.best_restart


def test_ties_go_to_lowest_restart():
    res = sh.maximize_ratio(sh.SearchConfig("okumura", 4, restarts=6))
    best = res.best_ratio
    assert res.best_restart == min(k for k, r in enumerate(res.restart_ratios) if r == best)


def test_violation_is_raised_with_witness(monkeypatch):
    loose = sh.Target(("T",), lambda t: (sh.ineq.okumura_sides(t)[0], 0.5 * sh.ineq.okumura_sides(t)[1]))
    monkeypatch.setitem(sh.TARGETS, "okumura_half", loose)
    with pytest.raises(sh.InequalityViolation) as info:
        sh.maximize_ratio(sh.SearchConfig("okumura_half", 4, restarts=2))
    assert info.value.ratio > 1
    assert "T" in info.value.witness


@pytest.mark.parametrize("n", range(4, 11))
def test_equality_witness(n):
    t = sh.equality_witness("okumura", n)
    assert frob_norm_sq(t) == pytest.approx(1.0, rel=1e-15)
    assert sh.witness_ratio("okumura", n) == pytest.approx(1.0, abs=1e-12)
    assert sh.witness_ratio("prop_alg_W0", n) == pytest.approx(1.0, abs=1e-12)


def test_equality_witness_small_cases():
    np.testing.assert_allclose(sh.equality_witness("okumura", 4), np.diag([1, 1, 1, -3]) / math.sqrt(12))
    np.testing.assert_allclose(sh.equality_witness("okumura", 6), np.diag([1, 1, 1, 1, 1, -5]) / math.sqrt(30))


def test_no_witness_for_huisken():
    with pytest.raises(PreconditionError, match="no analytic witness"):
        sh.equality_witness("huisken", 4)


@pytest.mark.parametrize("ineq_id", ["okumura", "tachibana", "prop_alg"])
def test_fd_gradient_richardson(ineq_id):
    # halving the step cuts the central-difference error by about 4
    n = 4
    problem = sh._Problem(ineq_id, n)
    rng = np.random.default_rng(2024)
    h = 1e-3
    ratios = []
    for _ in range(100):
        x = problem.random_start(rng)
        v = rng.standard_normal(problem.size)
        v /= np.linalg.norm(v)
        f = lambda y: problem.ratio(y)
        d1 = sh.fd_directional(f, x, v, h)
        d2 = sh.fd_directional(f, x, v, h / 2)
        d4 = sh.fd_directional(f, x, v, h / 4)
        ratios.append((d1 - d2) / (d2 - d4))
    ratios = np.array(ratios)
    assert np.all((ratios > 2) & (ratios < 8)), ratios[(ratios <= 2) | (ratios >= 8)]


@given(st.integers(0, 1000))
def test_gradient_matches_directional_derivatives(seed):
    problem = sh._Problem("okumura", 5)
    rng = np.random.default_rng(seed)
    x = problem.random_start(rng)
    v = rng.standard_normal(problem.size)
    g = problem.gradient(x, 1e-5)
    d = sh.fd_directional(problem.ratio, x, v, 1e-5)
    assert np.dot(g, v) == pytest.approx(d, rel=1e-6, abs=1e-8)
