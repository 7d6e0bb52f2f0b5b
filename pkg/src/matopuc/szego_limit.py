"""Both sides of the Szego limit theorem at finite size.

With ``T_n`` the ``n``-block Toeplitz matrix (``T_0`` empty, determinant 1)::

    det T_n / det T_{n-1} = det kappa_{n-1}
                          = det mu_0 * prod_{k<n-1} det(I - alpha_k alpha_k^H)
                          -> exp( (1/2pi) int log det W(theta) dtheta )

Everything is accumulated in log space.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .block_toeplitz import schur_pair, toeplitz_dense
from .errors import DivergentSzegoIntegral, NotContractionError
from .linalg import adjoint, log_det2_regularized, logdet_pd
from .spectral_measure import moments_from_density

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 30
DEFAULT_TOL = 1e-6


def log_det_ratios(mu, n_max):
    """``log det kappa_{n-1}`` for ``n = 1..n_max`` (index 0 holds 0.0)."""
    out = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        out[n] = logdet_pd(schur_pair(mu, n - 1).kappaR)
    return out


def det_ratio_sequence(mu, n_max, regularized=False):
    """``ratio[n] = det T_n / det T_{n-1}`` for ``n = 0..n_max``.

    ``ratio[0] = 1`` (empty determinants). The plain sequence comes from the
    Schur pivots ``det kappa_{n-1}``. With ``regularized=True`` the ratio of
    ``det_2(T_n) = det_2(I - (I - T_n))`` is returned instead; when
    ``mu_0 = I`` the trace correction vanishes and both agree.
    """
    if n_max > mu.order + 1:
        raise IndexError(f"T_{n_max} needs moments up to {n_max - 1}, have {mu.order}")
    if not regularized:
        return np.exp(log_det_ratios(mu, n_max))
    logs = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        t = toeplitz_dense(mu, n, "R")
        _, logs[n] = log_det2_regularized(np.eye(t.shape[0]) - t)
    return np.exp(np.diff(logs, prepend=0.0))


def partial_products(verblunsky):
    """``prod[n] = prod_{k<n} det(I - alpha_k alpha_k^H)``, ``prod[0] = 1``."""
    logs = [0.0]
    for k, v in enumerate(verblunsky):
        a = getattr(v, "alpha", v)
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        if np.linalg.norm(a, 2) >= 1:
            raise NotContractionError(f"alpha_{k} is not a strict contraction")
        logs.append(logs[-1] + logdet_pd(np.eye(a.shape[0]) - a @ adjoint(a)))
    return np.exp(np.array(logs))


def szego_integral(density):
    """``(1/2pi) int log det W(theta) dtheta`` by the rectangle rule."""
    lam = np.linalg.eigvalsh(density.values)
    if lam.min() <= 0 or not np.all(np.isfinite(lam)):
        raise DivergentSzegoIntegral(
            f"density is singular on the grid (min eigenvalue {lam.min():.3e}); "
            "log det W is not integrable")
    return float(np.mean(np.sum(np.log(lam), axis=1)))


@dataclass
class SzegoReport:
    n_values: list
    det_ratios: list
    det2_ratios: list
    partial_products: list
    szego_integral: float
    szego_exp: float
    converged: bool
    gap: float
    tol: float
    normalized: bool
    label: str = ""
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "label": self.label,
            "normalized": self.normalized,
            "n_values": list(self.n_values),
            "det_ratios": list(self.det_ratios),
            "det2_ratios": list(self.det2_ratios),
            "partial_products": list(self.partial_products),
            "szego_integral": self.szego_integral,
            "szego_exp": self.szego_exp,
            "converged": self.converged,
            "gap": self.gap,
            "tol": self.tol,
            "notes": list(self.notes),
        }


def limit_report(density, n_max=DEFAULT_N_MAX, tol=DEFAULT_TOL, normalize=True):
    """Ratio, det_2 ratio and Verblunsky partial-product sequences vs the integral.

    The measure is normalized to ``mu_0 = I`` unless ``normalize=False``.
    ``partial_products`` is aligned to the ratios, i.e. entry ``n`` is
    ``det mu_0 prod_{k<n-1} det(I - alpha_k alpha_k^H)``. ``gap`` is the
    relative distance of ``ratio[n_max]`` from ``exp(integral)``.
    """
    from .opuc import build_chain

    notes = []
    if normalize:
        density = density.normalized()
        notes.append("density normalized to mu_0 = I")
        log.info("normalizing density to mu_0 = I")
    mu = moments_from_density(density, n_max)
    ratios = det_ratio_sequence(mu, n_max)
    ratios2 = det_ratio_sequence(mu, n_max, regularized=True)
    chain = build_chain(mu, max(n_max - 1, 0))
    prods = partial_products(chain.verblunsky) * np.exp(logdet_pd(mu[0]))
    integral = szego_integral(density)
    target = float(np.exp(integral))
    gap = abs(ratios[n_max] - target) / target
    ns = list(range(1, n_max + 1))
    return SzegoReport(
        n_values=ns,
        det_ratios=[float(ratios[n]) for n in ns],
        det2_ratios=[float(ratios2[n]) for n in ns],
        partial_products=[float(prods[n - 1]) for n in ns],
        szego_integral=integral,
        szego_exp=target,
        converged=bool(gap <= tol),
        gap=float(gap),
        tol=tol,
        normalized=normalize,
        label=density.label,
        notes=notes,
    )
