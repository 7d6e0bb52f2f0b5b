"""Dense complex-matrix primitives.

Matrices are plain ``numpy`` complex arrays of shape ``(r, c)``. Hermitian
positive definite inputs are validated, symmetrized as ``(A + A^H) / 2`` and
decomposed with ``eigh``; nothing is regularized silently.
"""

import numpy as np

from .errors import NotHermitianError, NotPositiveDefiniteError

HERMITIAN_RTOL = 1e-12
PD_RTOL = 1e-12


def adjoint(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def _check_square(a):
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")


def hermitian_part(a, rtol=HERMITIAN_RTOL):
    """Return ``(a + a^H)/2`` after checking ``a`` is Hermitian to ``rtol``."""
    a = as_matrix(a)
    _check_square(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    asym = np.max(np.abs(a - adjoint(a))) if a.size else 0.0
    if asym > rtol * max(scale, np.finfo(float).tiny):
        raise NotHermitianError(
            f"matrix is not Hermitian: max|A - A^H| = {asym:.3e} (scale {scale:.3e})")
    return 0.5 * (a + adjoint(a))


def eigh_pd(a, rtol=PD_RTOL):
    """Eigendecomposition of a Hermitian PD matrix.

    Returns ascending eigenvalues and a unitary eigenvector matrix. Raises
    ``NotPositiveDefiniteError`` when the smallest eigenvalue is not above
    ``rtol`` times the largest.
    """
    h = hermitian_part(a)
    w, u = np.linalg.eigh(h)
    top = w[-1] if w.size else 0.0
    if w.size == 0 or top <= 0 or w[0] <= rtol * top:
        smallest = w[0] if w.size else None
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: smallest eigenvalue {smallest!r}, "
            f"largest {top!r}", smallest_eigenvalue=smallest)
    return w, u


def is_positive_definite(a, rtol=PD_RTOL):
    try:
        eigh_pd(a, rtol)
    except (NotPositiveDefiniteError, NotHermitianError):
        return False
    return True


def hermitian_power(a, p):
    """``a**p`` for Hermitian PD ``a`` through the spectral decomposition."""
    w, u = eigh_pd(a)
    s = (u * w**p) @ adjoint(u)
    return 0.5 * (s + adjoint(s))


def hermitian_sqrt(a):
    """Unique Hermitian PD square root of a Hermitian PD matrix."""
    return hermitian_power(a, 0.5)


def hermitian_inv_sqrt(a):
    """Inverse of :func:`hermitian_sqrt`, so that ``S @ a @ S == I``."""
    return hermitian_power(a, -0.5)


def _split_blocks(m, split):
    m = as_matrix(m)
    _check_square(m)
    n = m.shape[0]
    if not 0 < split < n:
        raise ValueError(f"split {split} out of range for a {n}x{n} matrix")
    return m[:split, :split], m[:split, split:], m[split:, :split], m[split:, split:]


def schur_complement(m, split):
    """Schur complement ``C - B^H A^{-1} B`` of the leading ``split`` block.

    ``m`` must be Hermitian with a positive definite leading block ``A``.
    """
    m = hermitian_part(m)
    a, b, _, c = _split_blocks(m, split)
    eigh_pd(a)
    sc = c - adjoint(b) @ np.linalg.solve(a, b)
    return 0.5 * (sc + adjoint(sc))


def frobenius_schur_factor(m, split):
    """Block LDU factorization ``m = lower @ middle @ upper``.

    ``lower`` is unit lower block triangular with ``B^H A^{-1}`` below the
    diagonal, ``middle = diag(A, SC)`` and ``upper = lower^H``.
    """
    m = hermitian_part(m)
    a, b, _, _ = _split_blocks(m, split)
    sc = schur_complement(m, split)
    n = m.shape[0]
    lower = np.eye(n, dtype=complex)
    lower[split:, :split] = adjoint(np.linalg.solve(a, b))
    middle = np.zeros((n, n), dtype=complex)
    middle[:split, :split] = a
    middle[split:, split:] = sc
    return lower, middle, adjoint(lower)


def logdet_pd(a):
    """Sum of log-eigenvalues of a Hermitian PD matrix."""
    w, _ = eigh_pd(a)
    return float(np.sum(np.log(w)))


def det2_regularized(a):
    """Second regularized determinant ``det_2(I - a) = det(I - a) exp(tr a)``."""
    a = as_matrix(a)
    _check_square(a)
    n = a.shape[0]
    return complex(np.linalg.det(np.eye(n) - a) * np.exp(np.trace(a)))


def log_det2_regularized(a):
    """``(sign, log|det_2(I - a)|)`` computed through LU, without overflow."""
    a = as_matrix(a)
    _check_square(a)
    n = a.shape[0]
    sign, logabs = np.linalg.slogdet(np.eye(n) - a)
    tr = np.trace(a)
    return sign * np.exp(1j * tr.imag), float(logabs + tr.real)


def block(m, i, j, d):
    """The ``(i, j)`` block of size ``d`` of a dense block matrix."""
    return m[i * d:(i + 1) * d, j * d:(j + 1) * d]
