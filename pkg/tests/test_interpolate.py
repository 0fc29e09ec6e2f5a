import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftadv.featurelift import (
    alias_indices,
    build_ensemble,
    fourier_map,
    legendre_map,
    make_training_set,
)
from liftadv.interpolate import (
    AliasStructureViolated,
    GramSingular,
    closed_form_ab,
    closed_form_coeffs,
    fit,
    uncorrected_ab,
    solve_min_norm,
    solve_rfs,
)

# frozen from an independent route: alpha = S^(1/2) pinv(M S^(1/2)) y
PINV_ORACLE = [
    (8, 1.45, 0.413015035743058, 0.17698856687351977),
    (16, 0.5, 1.1909166841036587, 0.019736842105263157),
    (30, 2.0, 0.0456688986772797, 0.06451381413706496),
]


@pytest.mark.parametrize("n,q,a,b", PINV_ORACLE)
def test_solver_matches_pinv_oracle(n, q, a, b):
    ens = build_ensemble(n, 2.0, q)
    cv = fit(ens, make_training_set(n))
    assert cv.a == pytest.approx(a, abs=1e-12)
    assert cv.b == pytest.approx(b, abs=1e-12)
    assert cv.b_consistent


@pytest.mark.parametrize("n", [8, 16, 32])
@pytest.mark.parametrize("q", [0.5, 1.45, 2.0])
def test_solver_matches_closed_form(n, q):
    ens = build_ensemble(n, 2.0, q)
    cv = fit(ens, make_training_set(n))
    np.testing.assert_allclose(cv.alpha, closed_form_coeffs(ens).alpha, atol=1e-8, rtol=0)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(3, 25), k=st.integers(1, 5), q=st.floats(0.1, 3.0))
def test_closed_form_any_n(n, k, q):
    # odd n exercises the alternating alias signs
    ens = build_ensemble(n, 1.01, q, B_override=2 * n * k + 1)
    cv = fit(ens, make_training_set(n))
    np.testing.assert_allclose(cv.alpha, closed_form_coeffs(ens).alpha, atol=1e-9)


@given(l1=st.floats(1e-3, 1e3), lL=st.floats(1e-3, 1e3), N=st.integers(1, 500))
def test_closed_form_interpolates(l1, lL, N):
    a, b = closed_form_ab(l1, lL, N)
    assert a / math.sqrt(2) + N * b == pytest.approx(1.0, rel=1e-12)


def test_uncorrected_constant_does_not_interpolate():
    ens = build_ensemble(8, 2.0, 1.45)
    a, b = uncorrected_ab(ens.lambda1, ens.lambdaL, ens.B, ens.n)
    assert abs(a / math.sqrt(2) + ens.N_A * b - 1.0) > 0.1


def test_bilevel_closed_form_expression():
    n, q = 16, 1.45
    ens = build_ensemble(n, 2.0, q)
    a, _ = closed_form_ab(ens.lambda1, ens.lambdaL, ens.N_A)
    want = math.sqrt(2) * n ** (1 - q) / (n ** (1 - q) + 1 - n ** -q)
    assert a == pytest.approx(want, rel=1e-12)


def test_interpolation_constraint_and_zeros():
    ens = build_ensemble(16, 2.0, 1.75)
    ts = make_training_set(16)
    cv = fit(ens, ts)
    np.testing.assert_allclose(fourier_map(ts.points, ens.B) @ cv.alpha, 1.0, atol=1e-10)
    mask = np.ones(ens.B, dtype=bool)
    mask[0] = False
    mask[alias_indices(16, ens.B)] = False
    assert np.max(np.abs(cv.alpha[mask])) < 1e-12


def test_q_zero_gives_constant_function():
    # all weight on the true feature: f = 1 exactly
    ens = build_ensemble(8, 2.0, 0.0)
    cv = fit(ens, make_training_set(8))
    assert cv.a == pytest.approx(math.sqrt(2))
    assert np.max(np.abs(cv.alpha[1:])) < 1e-12


def test_random_layout_interpolates():
    ens = build_ensemble(20, 2.0, 1.45)
    ts = make_training_set(20, "random", seed=5)
    cv = fit(ens, ts)
    np.testing.assert_allclose(fourier_map(ts.points, ens.B) @ cv.alpha, 1.0, atol=1e-9)
    assert cv.b is None


def test_legendre_family():
    ens = build_ensemble(8, 2.0, 1.0)
    ts = make_training_set(8, "random", seed=0)
    cv = fit(ens, ts, family="legendre")
    np.testing.assert_allclose(legendre_map(ts.points, ens.B) @ cv.alpha, 1.0, atol=1e-9)


def test_gram_singular_raised():
    M = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
    with pytest.raises(GramSingular) as info:
        solve_min_norm(M, np.ones(2), np.ones(2))
    assert info.value.cond > 1e12


def test_duplicate_points_inconsistent():
    M = np.array([[1.0], [1.0]])
    with pytest.raises(GramSingular):
        solve_min_norm(M, np.ones(1), np.array([1.0, 2.0]))


def test_zero_weight_features_get_zero():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((3, 6))
    w = np.array([1.0, 0.0, 2.0, 0.5, 0.0, 1.0])
    alpha = solve_min_norm(M, w, np.ones(3))
    assert alpha[1] == 0 and alpha[4] == 0
    np.testing.assert_allclose(M @ alpha, 1.0, atol=1e-12)


def test_min_norm_is_minimal():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((4, 10))
    alpha = solve_min_norm(M, np.ones(10), np.ones(4))
    # any null-space perturbation increases the norm
    null = np.linalg.svd(M)[2][4:]
    for v in null:
        assert np.linalg.norm(alpha + 0.1 * v) > np.linalg.norm(alpha)


def test_closed_form_needs_alias_structure():
    with pytest.raises(AliasStructureViolated):
        closed_form_coeffs(build_ensemble(8, 2.0, 1.0, B_override=71))


def test_rfs_interpolates_and_least_squares_flag():
    ens = build_ensemble(8, 2.0, 1.45)
    ts = make_training_set(8)
    sol = solve_rfs(ens, ts, 64, seed=0)
    assert not sol.least_squares and sol.d == 64
    np.testing.assert_allclose(fourier_map(ts.points, ens.B) @ sol.alpha_eff, 1.0, atol=1e-9)
    small = solve_rfs(ens, ts, 4, seed=0)
    assert small.least_squares
