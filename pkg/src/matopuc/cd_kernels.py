"""Christoffel-Darboux kernels, three ways.

Both kernels are linear in ``z`` and antilinear in ``w``::

    K_n^R(w, z) = sum_{k<=n} phi_k^R(z) phi_k^R(w)^H
    K_n^L(w, z) = sum_{k<=n} phi_k^L(w)^H phi_k^L(z)

so ``K(w, z)^H == K(z, w)`` on each side. The Toeplitz route uses
``T_{n+1}^{-1}`` and the CD route the degree-``n`` polynomials only::

    K_n^R(w, z) = [phi_n^{L,*}(z) phi_n^{L,*}(w)^H - conj(w) z phi_n^R(z) phi_n^R(w)^H] / (1 - conj(w) z)
    K_n^L(w, z) = [phi_n^{R,*}(w)^H phi_n^{R,*}(z) - conj(w) z phi_n^L(w)^H phi_n^L(z)] / (1 - conj(w) z)
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .block_toeplitz import toeplitz_dense, _cholesky_upper
from .linalg import adjoint

DIAGONAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KernelValue:
    side: str
    n: int
    w: complex
    z: complex
    value: np.ndarray


def _check_side(side):
    if side not in ("R", "L"):
        raise ValueError(f"side must be 'R' or 'L', got {side!r}")


def _check_order(chain, n):
    if n > chain.n_max:
        raise IndexError(f"kernel of order {n} needs the chain built to {n}, have {chain.n_max}")


def kernel_sum(chain, side, n, w, z):
    """Direct sum of ``phi_k`` outer products, ``k = 0..n``."""
    _check_side(side)
    _check_order(chain, n)
    d = chain.dim
    val = np.zeros((d, d), dtype=complex)
    for k in range(n + 1):
        if side == "R":
            p = chain.normR[k]
            val += p(z) @ adjoint(p(w))
        else:
            p = chain.normL[k]
            val += adjoint(p(w)) @ p(z)
    return KernelValue(side, n, complex(w), complex(z), val)


def _powers(x, n, d):
    return np.concatenate([x**k * np.eye(d) for k in range(n + 1)], axis=0)


def kernel_toeplitz(mu, side, n, w, z):
    """Quadratic form of ``T_{n+1}^{-1}`` between monomial columns.

    ``conj(w)**k`` is used for the ``w`` powers; on the unit circle this is
    ``w**-k``.
    """
    _check_side(side)
    d = mu.dim
    t = toeplitz_dense(mu, n + 1, side)
    r = _cholesky_upper(t, f"T_{n + 1}^{side}")
    wc = _powers(np.conj(w), n, d)
    zc = _powers(z, n, d)
    if side == "R":
        val = zc.T @ scipy.linalg.cho_solve((r, False), wc)
    else:
        val = wc.T @ scipy.linalg.cho_solve((r, False), zc)
    return KernelValue(side, n, complex(w), complex(z), val)


def kernel_cd(chain, side, n, w, z):
    """Closed-form CD quotient from the degree-``n`` polynomials.

    Undefined on ``conj(w) z == 1``; use :func:`kernel_sum` there.
    """
    _check_side(side)
    _check_order(chain, n)
    wz = np.conj(w) * z
    if abs(1 - wz) < DIAGONAL_TOL:
        raise ValueError("CD quotient is singular at conj(w) z = 1; use kernel_sum")
    if side == "R":
        p, ps = chain.normR[n], chain.normL[n].reverse()
        num = ps(z) @ adjoint(ps(w)) - wz * p(z) @ adjoint(p(w))
    else:
        p, ps = chain.normL[n], chain.normR[n].reverse()
        num = adjoint(ps(w)) @ ps(z) - wz * adjoint(p(w)) @ p(z)
    return KernelValue(side, n, complex(w), complex(z), num / (1 - wz))


def cd_check(chain, pairs, n=None, sides=("R", "L")):
    """Residuals between the three routes at each ``(w, z)`` pair.

    Returns a list of per-pair dicts and a summary dict with max/mean of
    each pairwise residual (Frobenius norm). The CD route is skipped on
    the diagonal ``conj(w) z == 1``.
    """
    n = chain.n_max if n is None else n
    rows = []
    for side in sides:
        for w, z in pairs:
            ks = kernel_sum(chain, side, n, w, z).value
            kt = kernel_toeplitz(chain.mu, side, n, w, z).value
            row = {
                "side": side, "w": [w.real, w.imag], "z": [z.real, z.imag],
                "sum_vs_toeplitz": float(np.linalg.norm(ks - kt)),
            }
            if abs(1 - np.conj(w) * z) >= DIAGONAL_TOL:
                kc = kernel_cd(chain, side, n, w, z).value
                row["sum_vs_cd"] = float(np.linalg.norm(ks - kc))
                row["toeplitz_vs_cd"] = float(np.linalg.norm(kt - kc))
            rows.append(row)
    summary = {}
    for key in ("sum_vs_toeplitz", "sum_vs_cd", "toeplitz_vs_cd"):
        vals = [r[key] for r in rows if key in r]
        if vals:
            summary[key] = {"max": max(vals), "mean": sum(vals) / len(vals)}
    return rows, summary
