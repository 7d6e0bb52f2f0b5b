import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from matopuc import (
    DensitySpec, MatrixPolynomial, build_chain, builtin_density, forward_recursion,
    inner_product_left, inner_product_right, inverse_recursion, monic_via_schur,
    moments_from_density, normalize, reverse, transfer_matrix, verblunsky_from_chain,
)
from matopuc.errors import IdentityViolation, NotContractionError, NumericalError
from matopuc.linalg import adjoint, hermitian_sqrt

from conftest import chain_for, random_contraction, random_density
from oracles import gram_schmidt


def normalized_chain(d, seed, n, eps=0.1):
    return chain_for(random_density(d, seed, eps=eps).normalized(), n)


def test_reverse_examples():
    z = MatrixPolynomial.monomial(1, 2)
    assert_allclose(reverse(z).coeffs, [np.eye(2), np.zeros((2, 2))])
    a = np.array([[1, 2j], [3, 4]])
    assert_allclose(reverse(MatrixPolynomial.constant(a)).coeffs[0], a.conj().T)


def test_lebesgue_chain():
    mu = moments_from_density(builtin_density(DensitySpec.lebesgue(2), 64), 5)
    chain = build_chain(mu, 5)
    for n in range(6):
        assert_allclose(chain.monicR[n].coeffs, MatrixPolynomial.monomial(n, 2).coeffs, atol=1e-15)
        assert_allclose(chain.monicL[n].coeffs, MatrixPolynomial.monomial(n, 2).coeffs, atol=1e-15)
        assert_allclose(chain.kappa(n, "R"), np.eye(2), atol=1e-15)
    for v in chain.verblunsky:
        assert_allclose(v.alpha, 0, atol=1e-15)
        assert_allclose(v.rhoR, np.eye(2), atol=1e-15)
        assert_allclose(v.rhoL, np.eye(2), atol=1e-15)


def test_normalize_examples():
    p = MatrixPolynomial(np.array([[[-0.5]], [[1.0]]]))
    assert_allclose(normalize(p, np.eye(1)).coeffs, p.coeffs)
    assert_allclose(normalize(p, np.array([[1.5]])).coeffs[:, 0, 0], np.array([-0.5, 1]) / np.sqrt(1.5))
    assert_allclose(normalize(p, np.array([[1.5]]), "L").coeffs[:, 0, 0], np.array([-0.5, 1]) / np.sqrt(1.5))
    with pytest.raises(ValueError):
        normalize(p, np.eye(1), "X")


def test_cos_density_first_polynomial():
    # W = 2 + 2 cos: Phi_1 = z - 1/2, kappa_1 = 1.5
    w = builtin_density(DensitySpec.trig_poly([[[2.0]], [[1.0]]]), 256)
    mu = moments_from_density(w, 2)
    p = monic_via_schur(mu, 1)
    assert_allclose(p.coeffs[:, 0, 0], [-0.5, 1], atol=1e-14)
    chain = build_chain(mu, 1)
    assert chain.kappa(1).item() == pytest.approx(1.5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_schur_matches_gram_schmidt(d):
    w = random_density(d, seed=20 + d)
    mu, chain = chain_for(w, 6)
    for side, monic in (("R", chain.monicR), ("L", chain.monicL)):
        phis, kappas = gram_schmidt(w, 6, side)
        for n in range(7):
            assert_allclose(monic[n].coeffs, phis[n], atol=1e-9)
            assert_allclose(chain.kappa(n, side), kappas[n], atol=1e-9)


def test_orthonormality_of_normalized(chain_d2):
    mu, chain = chain_d2
    for k in range(chain.n_max + 1):
        for j in range(chain.n_max + 1):
            expect = np.eye(2) * (k == j)
            assert_allclose(inner_product_right(chain.normR[k], chain.normR[j], mu), expect, atol=1e-10)
            assert_allclose(inner_product_left(chain.normL[k], chain.normL[j], mu), expect, atol=1e-10)


def test_alpha_and_rho_identities(chain_d2):
    mu, chain = chain_d2
    d = chain.dim
    for n, v in enumerate(chain.verblunsky):
        assert np.linalg.norm(v.alpha, 2) < 1
        assert_allclose(v.rhoR @ v.rhoR, np.eye(d) - v.alpha @ adjoint(v.alpha), atol=1e-12)
        assert_allclose(v.rhoL @ v.rhoL, np.eye(d) - adjoint(v.alpha) @ v.alpha, atol=1e-12)
        again = verblunsky_from_chain(chain, n)
        assert_allclose(again.alpha, v.alpha)
    with pytest.raises(IndexError):
        verblunsky_from_chain(chain, chain.n_max)


def test_kappa_product(chain_d2):
    mu, chain = chain_d2
    p = hermitian_sqrt(mu[0])
    for n in range(chain.n_max + 1):
        if n:
            p = p @ chain.verblunsky[n - 1].rhoR
        assert_allclose(p @ adjoint(p), chain.kappa(n, "R"), atol=1e-10)
    p = hermitian_sqrt(mu[0])
    for n in range(chain.n_max + 1):
        if n:
            p = p @ chain.verblunsky[n - 1].rhoL
        assert_allclose(p @ adjoint(p), chain.kappa(n, "L"), atol=1e-10)


def test_forward_recursion_reproduces_chain():
    mu, chain = normalized_chain(3, seed=5, n=7)
    phi_r, phi_ls = forward_recursion(chain.alphas, 3)
    for n in range(8):
        assert_allclose(phi_r[n].coeffs, chain.normR[n].coeffs, atol=1e-10)
        assert_allclose(phi_ls[n].coeffs, chain.normL[n].reverse().coeffs, atol=1e-10)


def test_forward_recursion_examples():
    phi_r, _ = forward_recursion([np.zeros((2, 2))] * 3)
    assert_allclose(phi_r[3].coeffs, MatrixPolynomial.monomial(3, 2).coeffs)
    phi_r, phi_ls = forward_recursion([0.5])
    rho = np.sqrt(0.75)
    assert_allclose(phi_r[1].coeffs[:, 0, 0], np.array([-0.5, 1]) / rho)
    assert_allclose(phi_ls[1].coeffs[:, 0, 0], np.array([1, -0.5]) / rho)
    with pytest.raises(NotContractionError):
        forward_recursion([1.2])
    with pytest.raises(ValueError):
        forward_recursion([np.eye(2) * 0.1], dim=3)


def test_inverse_recursion_roundtrip():
    mu, chain = normalized_chain(2, seed=6, n=6)
    phi_r, phi_ls = forward_recursion(chain.alphas, 2)
    for n in range(6):
        back_r, back_ls = inverse_recursion(phi_r[n + 1], phi_ls[n + 1], chain.alphas[n])
        assert_allclose(back_r.coeffs, phi_r[n].coeffs, atol=1e-10)
        assert_allclose(back_ls.coeffs, phi_ls[n].coeffs, atol=1e-10)


def test_inverse_recursion_trivial_and_mismatch():
    z3, z2 = MatrixPolynomial.monomial(3, 2), MatrixPolynomial.monomial(2, 2)
    one = MatrixPolynomial(np.array([np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2))]))
    back_r, back_ls = inverse_recursion(z3, one, np.zeros((2, 2)))
    assert_allclose(back_r.coeffs, z2.coeffs)
    with pytest.raises(NumericalError):
        inverse_recursion(z3, one, 0.3 * np.eye(2))


def test_transfer_matrix_trivial():
    z = np.zeros((2, 2))
    assert_allclose(transfer_matrix(z, np.eye(2), np.eye(2), 1.0), np.eye(4))
    with pytest.raises(ValueError):
        transfer_matrix(z, np.eye(2), np.eye(2), 0.0, inverse=True)
    with pytest.raises(ValueError):
        transfer_matrix(z, np.eye(2), np.eye(2), 1.0, side="X")


def test_transfer_matrix_propagates_polynomials():
    mu, chain = normalized_chain(2, seed=7, n=5)
    phi_r, phi_ls = forward_recursion(chain.alphas, 2)
    zeta = np.exp(0.4j) * 0.8
    for n, v in enumerate(chain.verblunsky):
        col = np.vstack([chain.normL[n](zeta), chain.normR[n].reverse()(zeta)])
        nxt = transfer_matrix(v.alpha, v.rhoR, v.rhoL, zeta, "L") @ col
        assert_allclose(nxt[:2], chain.normL[n + 1](zeta), atol=1e-10)
        assert_allclose(nxt[2:], chain.normR[n + 1].reverse()(zeta), atol=1e-10)
        row = np.hstack([phi_r[n](zeta), phi_ls[n](zeta)])
        nxt = row @ transfer_matrix(v.alpha, v.rhoR, v.rhoL, zeta, "R")
        assert_allclose(nxt[:, :2], phi_r[n + 1](zeta), atol=1e-10)
        assert_allclose(nxt[:, 2:], phi_ls[n + 1](zeta), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.sampled_from(["L", "R"]))
def test_transfer_matrix_inverse_and_j_identity(seed, d, side):
    rng = np.random.default_rng(seed)
    a = random_contraction(rng, d, 0.95)
    rr = hermitian_sqrt(np.eye(d) - a @ adjoint(a))
    rl = hermitian_sqrt(np.eye(d) - adjoint(a) @ a)
    z = complex(rng.standard_normal(), rng.standard_normal())
    m = transfer_matrix(a, rr, rl, z, side)
    minv = transfer_matrix(a, rr, rl, z, side, inverse=True)
    assert np.abs(m @ minv - np.eye(2 * d)).max() <= 1e-6 * max(1, abs(z), 1 / abs(z))
    if side == "L":
        w = np.exp(1j * rng.uniform(0, 2 * np.pi))
        zc = np.exp(1j * rng.uniform(0, 2 * np.pi))
        j = np.diag([1.0] * d + [-1.0] * d)
        lhs = adjoint(transfer_matrix(a, rr, rl, w)) @ j @ transfer_matrix(a, rr, rl, zc)
        rhs = np.diag([np.conj(w) * zc] * d + [-1.0] * d)
        assert np.abs(lhs - rhs).max() <= 1e-8 / (1 - np.linalg.norm(a, 2) ** 2)


def test_circle_identities():
    w = random_density(2, seed=8)
    mu, chain = chain_for(w, 8)
    z = w.points
    for n in range(9):
        pr, pl = chain.normR[n](z), chain.normL[n](z)
        assert np.linalg.svd(pr, compute_uv=False).min() > 1e-6
        assert_allclose(pr @ adjoint(pr), adjoint(pl) @ pl, atol=1e-8)


def test_parallel_matches_serial():
    w = random_density(2, seed=9)
    mu = moments_from_density(w, 6)
    a, b = build_chain(mu, 6), build_chain(mu, 6, parallel=True)
    for x, y in zip(a.alphas, b.alphas):
        assert_allclose(x, y, rtol=0, atol=0)


def test_chain_errors():
    mu = moments_from_density(random_density(1, seed=1), 3)
    with pytest.raises(IndexError):
        build_chain(mu, 4)
    with pytest.raises(IndexError):
        monic_via_schur(mu, 4)
    with pytest.raises(ValueError):
        monic_via_schur(mu, 2, "X")


def test_identity_violation_on_absurd_tolerance():
    mu = moments_from_density(random_density(3, seed=2), 4)
    with pytest.raises(IdentityViolation) as info:
        build_chain(mu, 4, tol=1e-30)
    assert "alpha_0" in info.value.name
