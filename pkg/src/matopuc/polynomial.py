"""Polynomials with square matrix coefficients."""

from dataclasses import dataclass

import numpy as np

from .linalg import adjoint


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``P(z) = sum_k coeffs[k] z**k`` with ``coeffs`` of shape ``(n+1, d, d)``.

    The trailing coefficient may be anything (including zero), so the
    nominal degree is ``len(coeffs) - 1``; reversal is taken with respect
    to that nominal degree.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[0] == 0:
            raise ValueError(f"coefficients must have shape (n+1, d, d), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, a):
        a = np.asarray(a, dtype=complex)
        return cls(a[None])

    @classmethod
    def monomial(cls, k, dim):
        c = np.zeros((k + 1, dim, dim), dtype=complex)
        c[k] = np.eye(dim)
        return cls(c)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    @property
    def dim(self):
        return self.coeffs.shape[1]

    def __call__(self, z):
        """Evaluate by Horner's rule; ``z`` may be a scalar or an array.

        Returns shape ``z.shape + (d, d)``.
        """
        z = np.asarray(z, dtype=complex)
        out = np.broadcast_to(self.coeffs[-1], z.shape + (self.dim, self.dim)).copy()
        for a in self.coeffs[-2::-1]:
            out = out * z[..., None, None] + a
        return out

    def reverse(self):
        """``z^n P(1/conj(z))^H``: coefficient ``k`` becomes ``coeffs[n-k]^H``."""
        return MatrixPolynomial(adjoint(self.coeffs[::-1]))

    def padded(self, degree):
        if degree < self.degree:
            raise ValueError("cannot pad to a lower degree")
        c = np.zeros((degree + 1, self.dim, self.dim), dtype=complex)
        c[:self.degree + 1] = self.coeffs
        return MatrixPolynomial(c)

    def shift(self):
        """Multiply by ``z``."""
        c = np.zeros((self.degree + 2, self.dim, self.dim), dtype=complex)
        c[1:] = self.coeffs
        return MatrixPolynomial(c)

    def mul_right(self, a):
        return MatrixPolynomial(self.coeffs @ np.asarray(a, dtype=complex))

    def mul_left(self, a):
        return MatrixPolynomial(np.asarray(a, dtype=complex) @ self.coeffs)

    def _aligned(self, other):
        n = max(self.degree, other.degree)
        return self.padded(n).coeffs, other.padded(n).coeffs

    def __add__(self, other):
        a, b = self._aligned(other)
        return MatrixPolynomial(a + b)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return MatrixPolynomial(a - b)

    def __neg__(self):
        return MatrixPolynomial(-self.coeffs)

    def stacked_column(self):
        """Coefficients stacked vertically, shape ``((n+1)d, d)``."""
        return self.coeffs.reshape(-1, self.dim)

    def stacked_row(self):
        """Coefficients side by side, shape ``(d, (n+1)d)``."""
        return np.concatenate(list(self.coeffs), axis=1)

    def max_abs_diff(self, other):
        a, b = self._aligned(other)
        return float(np.max(np.abs(a - b)))

    def __repr__(self):
        return f"MatrixPolynomial(degree={self.degree}, dim={self.dim})"
