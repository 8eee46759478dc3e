"""
Shared pytest fixtures and configuration
Used across all test modules
"""

import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from errors import GenericityError
from leapfrog import Mobius, SPairState
from state_io import save_state
from states import MapParams, PQState, XYState


def positive_rational(rng, bound=9):
    """p/q with 1 <= p, q <= bound"""
    return Fraction(int(rng.integers(1, bound + 1)), int(rng.integers(1, bound + 1)))


def positive_xy(rng, k, n):
    """Random (x, y) with positive entries, so every sigma_i is nonzero"""
    params = MapParams(k, n)
    return XYState(params,
                   tuple(positive_rational(rng) for _ in range(n)),
                   tuple(positive_rational(rng) for _ in range(n)))


def positive_pq(rng, k, n):
    params = MapParams(k, n)
    return PQState(params,
                   tuple(positive_rational(rng) for _ in range(n)),
                   tuple(positive_rational(rng) for _ in range(n)))


def draw_generic(draw, check=None, attempts=25):
    """Redraw until `check(value)` raises no GenericityError"""
    for _ in range(attempts):
        value = draw()
        try:
            if check is not None:
                check(value)
        except GenericityError:
            continue
        return value
    raise AssertionError("no generic sample found")


@pytest.fixture
def rng():
    """Seeded generator, a fresh one per test"""
    return np.random.default_rng(20240611)


@pytest.fixture
def ones_state():
    """All-ones (x, y) state for k = 3, n = 5"""
    return XYState.constant(MapParams(3, 5), Fraction(1), Fraction(1))


@pytest.fixture
def sample_xy():
    """k = 3, n = 5, x = (2, 1, 1, 1, 1), y = all 1"""
    params = MapParams(3, 5)
    return XYState(params, tuple(Fraction(v) for v in (2, 1, 1, 1, 1)), (Fraction(1),) * 5)


@pytest.fixture
def sample_pq():
    """k = 3, n = 5, p = (2, 1, 1, 1, 1), q = all 1"""
    params = MapParams(3, 5)
    return PQState(params, tuple(Fraction(v) for v in (2, 1, 1, 1, 1)), (Fraction(1),) * 5)


@pytest.fixture
def reflection_pair():
    """One-site S-pair with S_0 = -1, S_1 = 0, S_2 = 1 and S-_1 = i"""
    return SPairState(1, (1j,), (0j,), Mobius(1, 1, -1, 1))


@pytest.fixture
def state_file(tmp_path):
    """Write a state document into tmp_path and return its path"""
    def write(state, name="state.json"):
        path = str(tmp_path / name)
        save_state(state, path)
        return path
    return write


@pytest.fixture
def clean_env(monkeypatch):
    """Remove pentalab settings so defaults apply"""
    for name in ("PENTALAB_MAX_BITS", "PENTALAB_FLOAT_TOL", "PENTALAB_DEFAULT_BACKEND",
                 "PENTALAB_DEFAULT_SEED"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch
