"""JSON exchange formats.

A matrix is ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major
order. Polynomials, Verblunsky lists and densities are built from it.
"""

import json

import numpy as np

from .polynomial import MatrixPolynomial

SCHEMA_VERSION = 1


def matrix_to_dict(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    rows, cols = a.shape
    flat = a.reshape(-1)
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [[float(x.real), float(x.imag)] for x in flat],
    }


def matrix_from_dict(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not a matrix object: {obj!r}") from exc
    if rows <= 0 or cols <= 0 or len(data) != rows * cols:
        raise ValueError(f"matrix data has {len(data)} entries, expected {rows}*{cols}")
    vals = np.array([complex(re, im) for re, im in data], dtype=complex)
    return vals.reshape(rows, cols)


def polynomial_to_dict(p):
    return {"dim": p.dim, "coeffs": [matrix_to_dict(c) for c in p.coeffs]}


def polynomial_from_dict(obj):
    coeffs = np.array([matrix_from_dict(c) for c in obj["coeffs"]])
    p = MatrixPolynomial(coeffs)
    if "dim" in obj and int(obj["dim"]) != p.dim:
        raise ValueError("polynomial dim does not match its coefficients")
    return p


def verblunsky_to_list(records):
    return [
        {
            "index": r.index,
            "alpha": matrix_to_dict(r.alpha),
            "rhoR": matrix_to_dict(r.rhoR),
            "rhoL": matrix_to_dict(r.rhoL),
        }
        for r in records
    ]


def dumps(obj):
    """Deterministic JSON text (stable key order, trailing newline)."""
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"
