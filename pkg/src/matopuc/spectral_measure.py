"""Absolutely continuous matrix measures on the unit circle.

A measure is held as its density ``W(theta)`` sampled on the uniform grid
``theta_m = 2 pi m / M``. Integrals against ``dtheta / 2pi`` use the
rectangle rule, which is exact for trigonometric polynomials of degree
below ``M`` and spectrally accurate for smooth periodic integrands.
"""

from dataclasses import dataclass, field
import hashlib

import numpy as np

from .errors import GridTooCoarseError, NotContractionError, NotPositiveDefiniteError
from .io import matrix_from_dict, matrix_to_dict
from .linalg import adjoint, as_matrix, eigh_pd, hermitian_inv_sqrt
from .polynomial import MatrixPolynomial

DEFAULT_GRID_SIZE = 4096
ALIAS_FACTOR = 8
ALIAS_TAIL_TOL = 1e-8
DENSITY_HERMITIAN_RTOL = 1e-10
DENSITY_PSD_RTOL = 1e-10


def circle_grid(grid_size):
    theta = 2 * np.pi * np.arange(grid_size) / grid_size
    return theta, np.exp(1j * theta)


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Grid samples ``values[m] = W(2 pi m / M)``, shape ``(M, d, d)``.

    Values are checked Hermitian and PSD at construction and stored
    symmetrized and read-only.
    """

    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise ValueError(f"density values must have shape (M, d, d), got {v.shape}")
        scale = float(np.max(np.abs(v)))
        asym = float(np.max(np.abs(v - adjoint(v))))
        if asym > DENSITY_HERMITIAN_RTOL * max(scale, 1e-300):
            raise ValueError(f"density is not Hermitian on the grid (max asymmetry {asym:.3e})")
        v = 0.5 * (v + adjoint(v))
        lam_min = float(np.min(np.linalg.eigvalsh(v)))
        if lam_min < -DENSITY_PSD_RTOL * scale:
            raise NotPositiveDefiniteError(
                f"density is not PSD on the grid (smallest eigenvalue {lam_min:.3e})",
                smallest_eigenvalue=lam_min)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def grid_size(self):
        return self.values.shape[0]

    @property
    def angles(self):
        return circle_grid(self.grid_size)[0]

    @property
    def points(self):
        return circle_grid(self.grid_size)[1]

    def mean(self):
        """``(1/2pi) int W dtheta``, i.e. the zeroth moment."""
        return self.values.mean(axis=0)

    def normalized(self):
        """Density ``mu0^{-1/2} W mu0^{-1/2}``, whose zeroth moment is ``I``."""
        s = hermitian_inv_sqrt(self.mean())
        return SpectralDensity(s @ self.values @ s, label=f"normalized({self.label})")

    def fingerprint(self):
        return hashlib.sha256(np.ascontiguousarray(self.values).tobytes()).hexdigest()

    def to_dict(self):
        return {
            "dim": self.dim,
            "grid_size": self.grid_size,
            "grid": "theta_m = 2*pi*m/grid_size",
            "label": self.label,
            "values": [matrix_to_dict(w) for w in self.values],
        }

    @classmethod
    def from_dict(cls, obj):
        vals = np.array([matrix_from_dict(w) for w in obj["values"]])
        return cls(vals, label=obj.get("label", ""))


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Moments ``mu_j``, ``|j| <= order``; only ``j >= 0`` are stored.

    ``seq[j]`` returns ``mu_j``; negative indices return ``mu_{-j}^H``.
    """

    positive: np.ndarray

    def __post_init__(self):
        p = np.array(self.positive, dtype=complex)
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise ValueError(f"moments must have shape (n+1, d, d), got {p.shape}")
        p[0] = 0.5 * (p[0] + adjoint(p[0]))
        eigh_pd(p[0])
        p.setflags(write=False)
        object.__setattr__(self, "positive", p)

    @property
    def order(self):
        return self.positive.shape[0] - 1

    @property
    def dim(self):
        return self.positive.shape[1]

    def __getitem__(self, j):
        j = int(j)
        if abs(j) > self.order:
            raise IndexError(f"moment {j} not available (order {self.order})")
        if j >= 0:
            return self.positive[j]
        return adjoint(self.positive[-j])

    def truncated(self, order):
        if order > self.order:
            raise IndexError(f"cannot extend moments from order {self.order} to {order}")
        return MomentSequence(self.positive[:order + 1])


def moments_from_density(density, order):
    """Fourier moments ``mu_j = (1/M) sum_m exp(-i j theta_m) W(theta_m)``.

    The grid must hold at least ``8 (order + 1)`` points so aliased Fourier
    mass stays negligible for smooth densities.
    """
    m = density.grid_size
    if m < ALIAS_FACTOR * (order + 1):
        raise GridTooCoarseError(
            f"grid of {m} points is too coarse for order {order} "
            f"(need at least {ALIAS_FACTOR * (order + 1)})")
    coeffs = np.fft.fft(density.values, axis=0) / m
    return MomentSequence(coeffs[:order + 1])


def inner_product_right(p, q, mu):
    """``<<P, Q>>_R = sum_{k,j} p_k^H mu_{k-j} q_j``.

    This is ``int P^H W Q dtheta/2pi`` written through the moments.
    """
    from .block_toeplitz import toeplitz_dense

    n = max(p.degree, q.degree)
    if n > mu.order:
        raise IndexError(f"degree {n} exceeds available moments (order {mu.order})")
    t = toeplitz_dense(mu, n + 1, "R")
    return adjoint(p.padded(n).stacked_column()) @ t @ q.padded(n).stacked_column()


def inner_product_left(p, q, mu):
    """``<<P, Q>>_L = sum_{k,j} q_j mu_{k-j} p_k^H``, i.e. ``int Q W P^H``."""
    from .block_toeplitz import toeplitz_dense

    n = max(p.degree, q.degree)
    if n > mu.order:
        raise IndexError(f"degree {n} exceeds available moments (order {mu.order})")
    t = toeplitz_dense(mu, n + 1, "L")
    return q.padded(n).stacked_row() @ t @ adjoint(p.padded(n).stacked_row())


def aliasing_tail(values):
    """Largest Fourier coefficient near Nyquist relative to the largest overall.

    A resolved density has a tail at rounding level; sharp peaks show up here
    long before they corrupt low-order moments visibly.
    """
    m = values.shape[0]
    c = np.abs(np.fft.fft(values, axis=0))
    band = max(1, m // 64)
    tail = c[m // 2 - band:m // 2 + band + 1].max()
    return float(tail / c.max())


def bernstein_szego_density(phi, grid_size=DEFAULT_GRID_SIZE, label=None):
    """Density ``[phi(e^{it}) phi(e^{it})^H]^{-1}`` of a normalized right OPUC.

    Raises :class:`GridTooCoarseError` when the density is too peaked for the
    grid (see :func:`aliasing_tail`).
    """
    _, z = circle_grid(grid_size)
    vals = phi(z)
    sv = np.linalg.svd(vals, compute_uv=False)
    smin = float(sv[:, -1].min())
    if smin <= 1e-12 * float(sv[:, 0].max()):
        raise NotPositiveDefiniteError(
            f"polynomial is singular on the circle (min singular value {smin:.3e})",
            smallest_eigenvalue=smin)
    inv = np.linalg.inv(vals)
    w = adjoint(inv) @ inv
    tail = aliasing_tail(w)
    if tail > ALIAS_TAIL_TOL:
        raise GridTooCoarseError(
            f"density is under-resolved on {grid_size} points (Nyquist tail {tail:.1e}); "
            "increase the grid size")
    return SpectralDensity(w, label=label or f"bernstein_szego(degree={phi.degree})")


@dataclass(frozen=True)
class DensitySpec:
    """Config for a built-in density family.

    ``family`` is one of ``lebesgue``, ``trig_poly``, ``random_pd`` or
    ``bs_from_alphas``; ``params`` carries the family fields.
    """

    family: str
    dim: int
    params: dict = field(default_factory=dict)

    FAMILIES = ("lebesgue", "trig_poly", "random_pd", "bs_from_alphas")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown density family {self.family!r}")
        if int(self.dim) <= 0:
            raise ValueError("dim must be positive")
        if self.family == "random_pd" and self.params.get("seed") is None:
            raise ValueError("random_pd requires a seed")

    @classmethod
    def lebesgue(cls, dim):
        return cls("lebesgue", dim)

    @classmethod
    def trig_poly(cls, coefficients):
        coefficients = [as_matrix(c) for c in coefficients]
        return cls("trig_poly", coefficients[0].shape[0], {"coefficients": coefficients})

    @classmethod
    def random_pd(cls, dim, degree, seed, eps=0.1):
        return cls("random_pd", dim, {"degree": int(degree), "seed": int(seed), "eps": float(eps)})

    @classmethod
    def bs_from_alphas(cls, alphas):
        alphas = [as_matrix(a) for a in alphas]
        if not alphas:
            raise ValueError("bs_from_alphas needs at least one coefficient")
        return cls("bs_from_alphas", alphas[0].shape[0], {"alphas": alphas})

    def to_dict(self):
        out = {"family": self.family, "dim": int(self.dim)}
        for key, val in self.params.items():
            if key in ("coefficients", "alphas"):
                out[key] = [matrix_to_dict(a) for a in val]
            else:
                out[key] = val
        return out

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        family = obj.pop("family")
        dim = obj.pop("dim", None)
        for key in ("coefficients", "alphas"):
            if key in obj:
                obj[key] = [matrix_from_dict(a) if isinstance(a, dict) else as_matrix(a)
                            for a in obj[key]]
                if dim is None:
                    dim = obj[key][0].shape[0]
        if dim is None:
            raise ValueError("density spec needs a dim")
        return cls(family, int(dim), obj)


def _trig_poly_values(coefficients, z):
    w = np.broadcast_to(coefficients[0], z.shape + coefficients[0].shape).astype(complex)
    for j, c in enumerate(coefficients[1:], start=1):
        zj = z[:, None, None] ** j
        w = w + c * zj + adjoint(c) * np.conj(zj)
    return w


def random_matrix_polynomial(dim, degree, seed):
    """Seeded complex Gaussian matrix polynomial, coefficient variance 1/(degree+1)."""
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(2.0 * (degree + 1))
    c = rng.standard_normal((degree + 1, dim, dim)) + 1j * rng.standard_normal((degree + 1, dim, dim))
    return MatrixPolynomial(scale * c)


def builtin_density(spec, grid_size=DEFAULT_GRID_SIZE):
    """Sample a built-in density family on the uniform grid."""
    d = spec.dim
    _, z = circle_grid(grid_size)
    if spec.family == "lebesgue":
        vals = np.broadcast_to(np.eye(d, dtype=complex), (grid_size, d, d))
        return SpectralDensity(vals, label=f"lebesgue(d={d})")

    if spec.family == "trig_poly":
        coeffs = [as_matrix(c) for c in spec.params["coefficients"]]
        if any(c.shape != (d, d) for c in coeffs):
            raise ValueError("trig_poly coefficients must all be d x d")
        coeffs[0] = 0.5 * (coeffs[0] + adjoint(coeffs[0]))
        # PSD suffices here (2 + 2 cos has a zero); Toeplitz PD is checked downstream
        vals = _trig_poly_values(coeffs, z)
        return SpectralDensity(vals, label=f"trig_poly(d={d}, degree={len(coeffs) - 1})")

    if spec.family == "random_pd":
        m, seed, eps = spec.params["degree"], spec.params["seed"], spec.params.get("eps", 0.1)
        if eps <= 0:
            raise ValueError("random_pd floor eps must be positive")
        pz = random_matrix_polynomial(d, m, seed)(z)
        vals = pz @ adjoint(pz) + eps * np.eye(d)
        return SpectralDensity(vals, label=f"random_pd(d={d}, m={m}, seed={seed}, eps={eps})")

    if spec.family == "bs_from_alphas":
        from .opuc import forward_recursion

        alphas = [as_matrix(a) for a in spec.params["alphas"]]
        for k, a in enumerate(alphas):
            if np.linalg.norm(a, 2) >= 1:
                raise NotContractionError(f"alpha_{k} is not a strict contraction")
        phis, _ = forward_recursion(alphas, d)
        return bernstein_szego_density(
            phis[-1], grid_size, label=f"bs_from_alphas(d={d}, n={len(alphas)})")

    raise ValueError(f"unknown density family {spec.family!r}")
