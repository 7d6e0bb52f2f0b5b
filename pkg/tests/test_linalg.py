import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from matopuc.errors import NotHermitianError, NotPositiveDefiniteError
from matopuc.linalg import (
    adjoint, det2_regularized, eigh_pd, frobenius_schur_factor, hermitian_inv_sqrt,
    hermitian_part, hermitian_sqrt, is_positive_definite, log_det2_regularized, logdet_pd,
    schur_complement,
)


def random_pd(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ adjoint(a) + 0.5 * np.eye(n)


def test_sqrt_of_diag():
    assert_allclose(hermitian_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert_allclose(hermitian_inv_sqrt(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))


def test_sqrt_squares_back(rng):
    a = random_pd(rng, 4)
    r = hermitian_sqrt(a)
    assert_allclose(r @ r, a, atol=1e-12)
    assert_allclose(r, adjoint(r), atol=1e-14)
    s = hermitian_inv_sqrt(a)
    assert_allclose(s @ a @ s, np.eye(4), atol=1e-12)


def test_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError) as info:
        eigh_pd(np.diag([1.0, -1.0]))
    assert info.value.smallest_eigenvalue == pytest.approx(-1.0)
    assert not is_positive_definite(np.diag([1.0, 0.0]))


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_part(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_schur_complement_2x2():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert_allclose(schur_complement(m, 1), [[1.5]])


def test_frobenius_schur_factor_reconstructs(rng):
    m = random_pd(rng, 6)
    lower, middle, upper = frobenius_schur_factor(m, 2)
    assert_allclose(lower @ middle @ upper, m, atol=1e-12)
    assert_allclose(upper, adjoint(lower))
    assert_allclose(middle[2:, 2:], schur_complement(m, 2), atol=1e-12)
    assert_allclose(middle[:2, 2:], 0, atol=1e-14)


def test_logdet_matches_numpy(rng):
    a = random_pd(rng, 5)
    assert logdet_pd(a) == pytest.approx(np.log(np.linalg.det(a).real), rel=1e-12)


def test_det2_of_zero_and_diagonal():
    assert det2_regularized(np.zeros((3, 3))) == pytest.approx(1.0)
    lam = np.array([0.3, -0.2, 0.5j])
    expected = np.prod((1 - lam) * np.exp(lam))
    assert det2_regularized(np.diag(lam)) == pytest.approx(expected)


def test_log_det2_consistent(rng):
    a = 0.3 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    phase, logabs = log_det2_regularized(a)
    assert phase * np.exp(logabs) == pytest.approx(det2_regularized(a), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_det2_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a = 0.4 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    b = 0.4 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    lhs = det2_regularized(a + b - a @ b) * np.exp(np.trace(a @ b))
    rhs = det2_regularized(a) * det2_regularized(b)
    # (I - A)(I - B) = I - (A + B - AB)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_sqrt_property(seed, n):
    rng = np.random.default_rng(seed)
    a = random_pd(rng, n)
    r = hermitian_sqrt(a)
    assert np.abs(r @ r - a).max() <= 1e-10 * np.abs(a).max()
    assert np.linalg.eigvalsh(r).min() > 0
