import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from matopuc import DensitySpec, build_chain, builtin_density, moments_from_density  # noqa: E402

GRID = 4096

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def random_density(dim, seed, degree=3, eps=0.1, grid=GRID):
    return builtin_density(DensitySpec.random_pd(dim, degree, seed, eps), grid)


def chain_for(density, n):
    mu = moments_from_density(density, n)
    return mu, build_chain(mu, n)


def random_contraction(rng, dim, max_norm):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return a * (rng.uniform(0, max_norm) / np.linalg.norm(a, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def density_d2():
    return random_density(2, seed=3)


@pytest.fixture(scope="session")
def chain_d2(density_d2):
    return chain_for(density_d2, 8)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
