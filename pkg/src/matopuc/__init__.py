"""Matrix-valued orthogonal polynomials on the unit circle.

Moments of a matrix spectral density, block Toeplitz/Schur machinery, the
right/left OPUC chain with Verblunsky coefficients, Christoffel-Darboux
kernels and the finite-size Szego limit.
"""

__version__ = "0.1.0"

from .errors import (
    DivergentSzegoIntegral, GridTooCoarseError, IdentityViolation, NotContractionError,
    NotHermitianError, NotPositiveDefiniteError, NumericalError, OpucError,
)
from .polynomial import MatrixPolynomial
from .spectral_measure import (
    DensitySpec, MomentSequence, SpectralDensity, bernstein_szego_density, builtin_density,
    inner_product_left, inner_product_right, moments_from_density,
)
from .block_toeplitz import BlockToeplitz, SchurData, assemble, kolmogorov_factor, schur_pair
from .opuc import (
    OpucChain, VerblunskyData, build_chain, forward_recursion, inverse_recursion,
    monic_via_schur, normalize, reverse, transfer_matrix, verblunsky_from_chain,
)
from .cd_kernels import cd_check, kernel_cd, kernel_sum, kernel_toeplitz
from .szego_limit import SzegoReport, det_ratio_sequence, limit_report, partial_products, szego_integral
