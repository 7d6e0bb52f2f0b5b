import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from matopuc import MatrixPolynomial
from matopuc.io import dumps, matrix_from_dict, matrix_to_dict, polynomial_from_dict, polynomial_to_dict


def test_matrix_roundtrip(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    obj = json.loads(dumps(matrix_to_dict(a)))
    assert obj["rows"] == 2 and obj["cols"] == 3
    assert_allclose(matrix_from_dict(obj), a, rtol=0, atol=0)


def test_scalar_is_1x1():
    assert matrix_to_dict(0.5)["data"] == [[0.5, 0.0]]


def test_bad_matrix():
    with pytest.raises(ValueError):
        matrix_from_dict({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValueError):
        matrix_from_dict({"data": []})


def test_polynomial_roundtrip(rng):
    p = MatrixPolynomial(rng.standard_normal((3, 2, 2)))
    assert_allclose(polynomial_from_dict(polynomial_to_dict(p)).coeffs, p.coeffs)
    bad = polynomial_to_dict(p)
    bad["dim"] = 3
    with pytest.raises(ValueError):
        polynomial_from_dict(bad)


def test_dumps_is_deterministic():
    obj = {"a": np.float64(0.1).item(), "b": [1, 2]}
    assert dumps(obj) == dumps(obj)
    assert dumps(obj).endswith("\n")
