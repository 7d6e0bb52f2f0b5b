"""Right/left block Toeplitz matrices of a moment sequence.

``T_n^R`` has block ``(i, j)`` equal to ``mu_{i-j}``; ``T_n^L`` has
``mu_{j-i}``. Both are ``n d x n d``. Schur complements of ``mu_0`` in
``T_{n+1}`` (the ``kappa_n``) come from the last pivot of a Cholesky
factorization.
"""

from dataclasses import dataclass
import warnings

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefiniteError
from .linalg import adjoint, block

COND_WARN = 1e12


class IllConditionedWarning(UserWarning):
    """Toeplitz matrix condition number above the trusted range."""


def toeplitz_dense(mu, n, side):
    """Dense ``T_n^{side}`` with ``n`` block rows, without any checks."""
    if side not in ("R", "L"):
        raise ValueError(f"side must be 'R' or 'L', got {side!r}")
    if n - 1 > mu.order:
        raise IndexError(f"T_{n} needs moments up to {n - 1}, have {mu.order}")
    d = mu.dim
    t = np.empty((n * d, n * d), dtype=complex)
    sign = 1 if side == "R" else -1
    for i in range(n):
        for j in range(n):
            t[i * d:(i + 1) * d, j * d:(j + 1) * d] = mu[sign * (i - j)]
    return t


def block_flip(n, d):
    """Block anti-diagonal permutation ``L`` with ``L T^L L = T^R``."""
    return np.kron(np.fliplr(np.eye(n)), np.eye(d)).astype(complex)


def _cholesky_upper(t, what):
    try:
        return scipy.linalg.cholesky(t, lower=False)
    except np.linalg.LinAlgError as exc:
        lam = float(np.linalg.eigvalsh(0.5 * (t + adjoint(t)))[0]) if t.size else None
        raise NotPositiveDefiniteError(
            f"{what} is not positive definite (smallest eigenvalue {lam!r}); "
            "the measure may be trivial or the moments invalid",
            smallest_eigenvalue=lam) from exc


@dataclass(frozen=True, eq=False)
class BlockToeplitz:
    side: str
    dim: int
    blocks_order: int
    dense: np.ndarray
    source: object
    condition: float

    @property
    def trusted(self):
        return self.condition <= COND_WARN

    def block(self, i, j):
        return block(self.dense, i, j, self.dim)


def assemble(mu, n, side="R"):
    """Assemble ``T_n^{side}`` and verify it is positive definite."""
    if n < 1:
        raise ValueError("need at least one block")
    t = toeplitz_dense(mu, n, side)
    _cholesky_upper(t, f"T_{n}^{side}")
    lam = np.linalg.eigvalsh(t)
    cond = float(lam[-1] / lam[0])
    if cond > COND_WARN:
        warnings.warn(f"cond(T_{n}^{side}) = {cond:.2e}; results are untrusted",
                      IllConditionedWarning, stacklevel=2)
    t.setflags(write=False)
    return BlockToeplitz(side, mu.dim, n, t, mu, cond)


@dataclass(frozen=True, eq=False)
class SchurData:
    kappaR: np.ndarray
    kappaL: np.ndarray
    n: int


def _last_pivot(t, d, what):
    r = _cholesky_upper(t, what)
    rnn = r[-d:, -d:]
    k = adjoint(rnn) @ rnn
    return 0.5 * (k + adjoint(k))


def schur_pair(mu, n):
    """``kappa_n^R`` and ``kappa_n^L``: Schur complements of ``mu_0`` in ``T_{n+1}``."""
    if n > mu.order:
        raise IndexError(f"kappa_{n} needs moments up to {n}, have {mu.order}")
    d = mu.dim
    kr = _last_pivot(toeplitz_dense(mu, n + 1, "R"), d, f"T_{n + 1}^R")
    kl = _last_pivot(toeplitz_dense(mu, n + 1, "L"), d, f"T_{n + 1}^L")
    return SchurData(kr, kl, n)


def border_right(mu, n):
    """``nu_n = (mu_{-n}, ..., mu_{-1})^T``, last block column of ``T_{n+1}^R``."""
    return np.concatenate([mu[k - n] for k in range(n)], axis=0)


def border_left(mu, n):
    """``xi_n = (mu_n, ..., mu_1)^T``, last block column of ``T_{n+1}^L``."""
    return np.concatenate([mu[n - k] for k in range(n)], axis=0)


def kolmogorov_factor(t):
    """Block columns ``V_j`` of the upper Cholesky factor ``R`` of ``T``.

    ``R^H R = T``, hence ``V_i^H V_j`` is block ``(i, j)`` of ``T``.
    """
    if not isinstance(t, BlockToeplitz):
        raise TypeError("kolmogorov_factor expects a BlockToeplitz")
    r = _cholesky_upper(t.dense, f"T_{t.blocks_order}^{t.side}")
    d = t.dim
    return [r[:, j * d:(j + 1) * d] for j in range(t.blocks_order)]
