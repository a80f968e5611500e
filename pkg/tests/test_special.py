import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptfriction.special import NoInteriorRootError, assoc_laguerre, laguerre_table, solve_u_eta

from oracles import laguerre


@pytest.mark.parametrize("n,k,x", [(0, 0, 0.3), (1, 2, 0.5), (5, 3, 12.5), (24, 0, 0.02), (10, 14, 50.0)])
def test_laguerre_matches_reference(n, k, x):
    assert assoc_laguerre(n, k, x) == pytest.approx(laguerre(n, k, x), rel=1e-12, abs=1e-12)


def test_laguerre_low_orders():
    x = 0.7
    assert assoc_laguerre(0, 4, x) == 1.0
    assert assoc_laguerre(1, 4, x) == pytest.approx(5.0 - x)
    assert assoc_laguerre(2, 0, x) == pytest.approx(0.5 * (x * x - 4 * x + 2))


def test_laguerre_rejects_negative_indices():
    with pytest.raises(ValueError):
        assoc_laguerre(-1, 0, 1.0)
    with pytest.raises(ValueError):
        assoc_laguerre(2, -1, 1.0)


def test_laguerre_table_entries():
    table = laguerre_table(8, 2.0)
    for m in range(8):
        for d in range(8):
            assert table[m, d] == pytest.approx(laguerre(m, d, 2.0), rel=1e-11, abs=1e-12)


@given(st.integers(0, 30), st.integers(0, 30), st.floats(0.0, 60.0))
@settings(max_examples=60, deadline=None)
def test_laguerre_property(n, k, x):
    ref = laguerre(n, k, x)
    assert assoc_laguerre(n, k, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * max(1.0, abs(ref)))


def test_u_eta_reference_values():
    # frozen from an independent bisection at 1e-15
    assert solve_u_eta(6.4) == pytest.approx(2.705186304490837, abs=1e-12)
    assert solve_u_eta(2.5) == pytest.approx(2.1253, abs=5e-4)
    assert solve_u_eta(6.4) == pytest.approx(2.705, abs=1e-3)


@pytest.mark.parametrize("eta", [1.0, 0.5, 0.0, -2.0])
def test_u_eta_needs_eta_above_one(eta):
    with pytest.raises(NoInteriorRootError):
        solve_u_eta(eta)


@given(st.floats(1.0001, 500.0))
@settings(max_examples=80, deadline=None)
def test_u_eta_is_interior_root(eta):
    u = solve_u_eta(eta)
    assert 0.0 < u < math.pi
    assert abs(u - eta * math.sin(u)) < 1e-10
    assert solve_u_eta(eta * 1.01) >= u - 1e-12


def test_u_eta_large_eta_limit():
    eta = 1e4
    assert solve_u_eta(eta) == pytest.approx(eta * math.pi / (eta + 1.0), rel=1e-6)


def test_brute_force_root():
    eta = 3.3
    grid = np.linspace(1e-6, math.pi, 2_000_001)
    f = grid - eta * np.sin(grid)
    i = np.flatnonzero(np.diff(np.sign(f)))[0]
    assert solve_u_eta(eta) == pytest.approx(grid[i], abs=2e-6)
