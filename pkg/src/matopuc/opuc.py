"""Matrix orthogonal polynomials on the unit circle.

Monic polynomials come straight from the block Toeplitz systems::

    Phi_n^R(z) = z^n I - [I, z, ..., z^{n-1}] (T_n^R)^{-1} nu_n
    Phi_n^L(z) = z^n I - [mu_{-n}, ..., mu_{-1}] (T_n^L)^{-1} [I, z, ..., z^{n-1}]^T

with ``<<Phi_k^R, Phi_j^R>>_R = delta_kj kappa_k^R`` (same on the left).

Normalization. ``kappa_n`` admits many square roots; only one family makes
the Szego recursion hold with *Hermitian* ``rho_n``. The chain therefore
tracks "root" factors ``N_n`` (right) and ``M_n`` (left)::

    phi_n^R = Phi_n^R N_n,      N_0 = mu_0^{-1/2},   N_{n+1} = N_n rho_n^{R,-1}
    phi_n^L = M_n Phi_n^L,      M_0 = mu_0^{-1/2},   M_{n+1} = rho_n^{L,-1} M_n

with ``N_n^H kappa_n^R N_n = I`` and ``M_n kappa_n^L M_n^H = I``. The
Verblunsky coefficient is ``alpha_n = -N_n^H Phi_{n+1}^R(0)^H M_n^{-1}``
(equivalently ``-N_n^{-1} Phi_{n+1}^L(0)^H M_n^H``) and
``rho_n^R = (I - alpha alpha^H)^{1/2}``, ``rho_n^L = (I - alpha^H alpha)^{1/2}``.
For ``d = 1`` the roots are the usual positive ``kappa_n^{-1/2}``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .block_toeplitz import border_right, schur_pair, toeplitz_dense, _cholesky_upper
from .errors import IdentityViolation, NotContractionError, NumericalError
from .linalg import adjoint, as_matrix, hermitian_inv_sqrt, hermitian_sqrt
from .polynomial import MatrixPolynomial

CHECK_TOL = 1e-8
REMAINDER_TOL = 1e-8


def reverse(p):
    """Reversed polynomial ``P^*(z) = z^n P(1/conj z)^H``."""
    return p.reverse()


def monic_via_schur(mu, n, side="R"):
    """Monic degree-``n`` orthogonal polynomial from the Toeplitz system."""
    d = mu.dim
    if n == 0:
        return MatrixPolynomial.monomial(0, d)
    if n > mu.order:
        raise IndexError(f"Phi_{n} needs moments up to {n}, have {mu.order}")
    coeffs = np.zeros((n + 1, d, d), dtype=complex)
    coeffs[n] = np.eye(d)
    if side == "R":
        t = toeplitz_dense(mu, n, "R")
        r = _cholesky_upper(t, f"T_{n}^R")
        c = -scipy.linalg.cho_solve((r, False), border_right(mu, n))
        coeffs[:n] = c.reshape(n, d, d)
    elif side == "L":
        t = toeplitz_dense(mu, n, "L")
        r = _cholesky_upper(t, f"T_{n}^L")
        row = np.concatenate([mu[k - n] for k in range(n)], axis=1)
        # row T^{-1} = (T^{-1} row^H)^H since T is Hermitian
        c = -adjoint(scipy.linalg.cho_solve((r, False), adjoint(row)))
        coeffs[:n] = np.stack([c[:, k * d:(k + 1) * d] for k in range(n)])
    else:
        raise ValueError(f"side must be 'R' or 'L', got {side!r}")
    return MatrixPolynomial(coeffs)


def normalize(phi_monic, kappa, side="R", root=None):
    """Normalize a monic polynomial to unit norm.

    By default the Hermitian root ``kappa^{-1/2}`` is used (right factor for
    ``side='R'``, left factor for ``'L'``). ``root`` overrides it with any
    other inverse square root, e.g. the recursion-consistent factors kept by
    :class:`OpucChain`.
    """
    if root is None:
        root = hermitian_inv_sqrt(kappa)
    if side == "R":
        return phi_monic.mul_right(root)
    if side == "L":
        return phi_monic.mul_left(root)
    raise ValueError(f"side must be 'R' or 'L', got {side!r}")


@dataclass(frozen=True, eq=False)
class VerblunskyData:
    index: int
    alpha: np.ndarray
    rhoR: np.ndarray
    rhoL: np.ndarray


def _rho_pair(alpha):
    d = alpha.shape[0]
    eye = np.eye(d)
    if np.linalg.norm(alpha, 2) >= 1:
        raise NotContractionError(
            f"Verblunsky coefficient has operator norm {np.linalg.norm(alpha, 2):.6f} >= 1")
    return hermitian_sqrt(eye - alpha @ adjoint(alpha)), hermitian_sqrt(eye - adjoint(alpha) @ alpha)


def _check(name, lhs, rhs, tol):
    res = float(np.max(np.abs(lhs - rhs))) if np.size(lhs) else 0.0
    scale = max(1.0, float(np.max(np.abs(rhs))) if np.size(rhs) else 0.0)
    if not res <= tol * scale:
        raise IdentityViolation(name, res, tol * scale, lhs=lhs, rhs=rhs)
    return res


def verblunsky_step(n, monicR_next, monicL_next, rootR, rootL, kappaR_next, kappaL_next,
                    tol=CHECK_TOL):
    """Extract ``alpha_n`` and the ``rho`` pair; cross-check both routes.

    Raises :class:`IdentityViolation` when the right and left formulas for
    ``alpha_n`` disagree or when the ``rho`` computed from the ``kappa``
    ratio differs from ``(I - alpha alpha^H)^{1/2}``.
    """
    c_r = monicR_next.coeffs[0]
    c_l = monicL_next.coeffs[0]
    alpha_r = -adjoint(rootR) @ adjoint(c_r) @ np.linalg.inv(rootL)
    alpha_l = -np.linalg.inv(rootR) @ adjoint(c_l) @ adjoint(rootL)
    _check(f"alpha_{n}^R == alpha_{n}^L", alpha_r, alpha_l, tol)
    rho_r, rho_l = _rho_pair(alpha_r)
    # kappa ratio expressed in the root frame: rho^2 = N^H kappa_{n+1} N
    ratio_r = adjoint(rootR) @ kappaR_next @ rootR
    ratio_l = rootL @ kappaL_next @ adjoint(rootL)
    _check(f"rho_{n}^R == (I - alpha alpha^H)^(1/2)", hermitian_sqrt(ratio_r), rho_r, tol)
    _check(f"rho_{n}^L == (I - alpha^H alpha)^(1/2)", hermitian_sqrt(ratio_l), rho_l, tol)
    return VerblunskyData(n, alpha_r, rho_r, rho_l)


@dataclass(frozen=True, eq=False)
class OpucChain:
    """Monic and normalized OPUC of degrees ``0..n_max`` for one measure.

    ``verblunsky[k]`` is available for ``k < n_max`` (it needs degree
    ``k + 1``). ``rootR[k]``/``rootL[k]`` are the normalizing factors.
    """

    mu: object
    n_max: int
    monicR: list
    monicL: list
    normR: list
    normL: list
    rootR: list
    rootL: list
    verblunsky: list
    schur: list

    @property
    def dim(self):
        return self.mu.dim

    @property
    def alphas(self):
        return [v.alpha for v in self.verblunsky]

    def kappa(self, n, side="R"):
        return self.schur[n].kappaR if side == "R" else self.schur[n].kappaL


def build_chain(mu, n_max, parallel=False, tol=CHECK_TOL):
    """Build the OPUC chain up to degree ``n_max`` from moments.

    Each degree is an independent Toeplitz solve, so ``parallel=True``
    computes them on a thread pool; results are identical either way.
    """
    if n_max > mu.order:
        raise IndexError(f"chain to degree {n_max} needs moments up to {n_max}, have {mu.order}")
    degrees = range(n_max + 1)

    def per_degree(n):
        return (monic_via_schur(mu, n, "R"), monic_via_schur(mu, n, "L"), schur_pair(mu, n))

    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(per_degree, degrees))
    else:
        results = [per_degree(n) for n in degrees]
    monicR = [r[0] for r in results]
    monicL = [r[1] for r in results]
    schur = [r[2] for r in results]

    root0 = hermitian_inv_sqrt(mu[0])
    rootR, rootL = [root0], [root0]
    verb = []
    for n in range(n_max):
        v = verblunsky_step(n, monicR[n + 1], monicL[n + 1], rootR[n], rootL[n],
                            schur[n + 1].kappaR, schur[n + 1].kappaL, tol=tol)
        verb.append(v)
        rootR.append(rootR[n] @ np.linalg.inv(v.rhoR))
        rootL.append(np.linalg.inv(v.rhoL) @ rootL[n])
    normR = [normalize(p, schur[n].kappaR, "R", rootR[n]) for n, p in enumerate(monicR)]
    normL = [normalize(p, schur[n].kappaL, "L", rootL[n]) for n, p in enumerate(monicL)]
    return OpucChain(mu, n_max, monicR, monicL, normR, normL, rootR, rootL, verb, schur)


def verblunsky_from_chain(chain, n, tol=CHECK_TOL):
    """Recompute and cross-check ``alpha_n`` from a built chain."""
    if n >= chain.n_max:
        raise IndexError(f"alpha_{n} needs the chain built to degree {n + 1}")
    return verblunsky_step(n, chain.monicR[n + 1], chain.monicL[n + 1],
                           chain.rootR[n], chain.rootL[n],
                           chain.schur[n + 1].kappaR, chain.schur[n + 1].kappaL, tol=tol)


def forward_recursion(alphas, dim=None):
    """Run the Szego recursion from ``phi_0^R = phi_0^{L,*} = I`` (``mu_0 = I``).

    Returns ``(phiR, phiLstar)``, lists of degrees ``0..len(alphas)``::

        phi_{n+1}^R     = (z phi_n^R - phi_n^{L,*} alpha_n^H) rho_n^{R,-1}
        phi_{n+1}^{L,*} = (phi_n^{L,*} - z phi_n^R alpha_n) rho_n^{L,-1}
    """
    alphas = [as_matrix(a) for a in alphas]
    if dim is None:
        dim = alphas[0].shape[0] if alphas else 1
    phi_r = [MatrixPolynomial.monomial(0, dim)]
    phi_ls = [MatrixPolynomial.monomial(0, dim)]
    for a in alphas:
        if a.shape != (dim, dim):
            raise ValueError(f"alpha of shape {a.shape} does not match dim {dim}")
        rho_r, rho_l = _rho_pair(a)
        pr, pls = phi_r[-1], phi_ls[-1]
        nxt_r = (pr.shift() - pls.padded(pr.degree + 1).mul_right(adjoint(a))).mul_right(np.linalg.inv(rho_r))
        nxt_ls = (pls.padded(pr.degree + 1) - pr.shift().mul_right(a)).mul_right(np.linalg.inv(rho_l))
        phi_r.append(nxt_r)
        phi_ls.append(nxt_ls)
    return phi_r, phi_ls


def inverse_recursion(phiR_next, phiLstar_next, alpha, dim=None, tol=REMAINDER_TOL):
    """Undo one forward step::

        phi_n^R     = z^{-1} (phi_{n+1}^R rho^{R,-1} + phi_{n+1}^{L,*} rho^{L,-1} alpha^H)
        phi_n^{L,*} = phi_{n+1}^R rho^{R,-1} alpha + phi_{n+1}^{L,*} rho^{L,-1}

    The division by ``z`` and the drop of the top coefficient of the second
    line both require exact cancellation; a leftover above ``tol`` means the
    inputs do not come from one chain.
    """
    alpha = as_matrix(alpha)
    rho_r, rho_l = _rho_pair(alpha)
    ir, il = np.linalg.inv(rho_r), np.linalg.inv(rho_l)
    top = max(phiR_next.degree, phiLstar_next.degree)
    pr, pls = phiR_next.padded(top), phiLstar_next.padded(top)
    num_r = pr.mul_right(ir) + pls.mul_right(il @ adjoint(alpha))
    num_ls = pr.mul_right(ir @ alpha) + pls.mul_right(il)
    rem = float(np.max(np.abs(num_r.coeffs[0])))
    if rem > tol:
        raise NumericalError(f"z^-1 division leaves constant remainder {rem:.3e}")
    lead = float(np.max(np.abs(num_ls.coeffs[-1])))
    if lead > tol:
        raise NumericalError(f"reversed-left polynomial keeps a degree-{top} term of size {lead:.3e}")
    return MatrixPolynomial(num_r.coeffs[1:]), MatrixPolynomial(num_ls.coeffs[:-1])


def transfer_matrix(alpha, rhoR, rhoL, z, side="L", inverse=False):
    """``2d x 2d`` one-step transfer matrix.

    ``side='L'`` maps the column ``(phi_n^L, phi_n^{R,*})`` to degree
    ``n + 1``::

        A^L(alpha, z) = [[z rhoL^{-1},        -rhoL^{-1} alpha^H],
                         [-z rhoR^{-1} alpha,  rhoR^{-1}        ]]

    ``side='R'`` acts from the right on the row ``(phi_n^R, phi_n^{L,*})``::

        A^R(alpha, z) = [[z rhoR^{-1},         -z alpha rhoL^{-1}],
                         [-alpha^H rhoR^{-1},   rhoL^{-1}        ]]

    ``inverse=True`` returns the inverse, which needs ``z != 0``.
    """
    alpha = as_matrix(alpha)
    ir, il = np.linalg.inv(as_matrix(rhoR)), np.linalg.inv(as_matrix(rhoL))
    ah = adjoint(alpha)
    if inverse and z == 0:
        raise ValueError("inverse transfer matrix is undefined at z = 0")
    if side == "L":
        if not inverse:
            blocks = [[z * il, -il @ ah], [-z * ir @ alpha, ir]]
        else:
            blocks = [[il / z, ah @ ir / z], [alpha @ il, ir]]
    elif side == "R":
        if not inverse:
            blocks = [[z * ir, -z * alpha @ il], [-ah @ ir, il]]
        else:
            blocks = [[ir / z, ir @ alpha], [il @ ah / z, il]]
    else:
        raise ValueError(f"side must be 'R' or 'L', got {side!r}")
    return np.block(blocks)
