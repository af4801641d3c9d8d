import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vblast import oracles
from vblast.combinatorics import (catalan, constrained_compositions, factorial, integral_Ij,
                                  integral_J, regularized_lower_gamma, upper_gamma_int, wilks_g)
from vblast.errors import ParameterError


def _brute_compositions(k):
    out = set()
    for b in itertools.product(range(k + 2), repeat=k + 1):
        if sum(b) != k + 1:
            continue
        if all(sum(b[:n]) <= n for n in range(1, k + 1)):
            out.add(b)
    return out


def test_compositions_small_cases():
    assert constrained_compositions(0) == [(1,)]
    assert set(constrained_compositions(1)) == {(0, 2), (1, 1)}
    assert [len(constrained_compositions(k)) for k in range(4)] == [1, 2, 5, 14]


@pytest.mark.parametrize("k", range(6))
def test_compositions_match_brute_force(k):
    assert set(constrained_compositions(k)) == _brute_compositions(k)


def test_composition_counts_are_catalan():
    for k in range(9):
        assert len(constrained_compositions(k)) == catalan(k + 1)


def test_composition_cap():
    with pytest.raises(ParameterError):
        constrained_compositions(13)
    with pytest.raises(ParameterError):
        constrained_compositions(-1)


def test_factorial_exact_then_float():
    assert factorial(20) == math.factorial(20)
    assert isinstance(factorial(20), int)
    assert factorial(25) == pytest.approx(math.factorial(25), rel=1e-14)


def test_wilks_examples():
    assert wilks_g([2.5]) == 2.5
    assert wilks_g([1, 2]) == pytest.approx(1.5, abs=1e-15)
    assert wilks_g([1, 1, 1]) == pytest.approx(1 / 6, abs=1e-15)


def test_wilks_rejects_unordered():
    with pytest.raises(ParameterError):
        wilks_g([2, 1])
    with pytest.raises(ParameterError):
        wilks_g([-1, 1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 6), min_size=1, max_size=5))
def test_wilks_matches_quadrature(a):
    a = np.sort(a)
    want, _ = oracles.wilks_g_quadrature(a)
    assert wilks_g(a) == pytest.approx(want, rel=1e-7, abs=1e-12)


def test_ij_examples():
    assert integral_Ij([0.0]) == 1.0
    assert integral_Ij([3, 1]) == pytest.approx(np.exp(-1) - np.exp(-3), abs=1e-15)
    assert integral_Ij([3, 1]) == pytest.approx(0.318092, abs=1e-6)
    want = np.exp(-1) - np.exp(-2) - np.exp(-3) * (2 - 1)
    assert integral_Ij([3, 2, 1]) == pytest.approx(want, rel=1e-13)
    assert integral_Ij([3, 2, 1]) == pytest.approx(0.182757, abs=1e-6)


def test_ij_collapses_on_ties():
    assert integral_Ij([3.0, 2.0, 2.0]) == 0.0
    assert integral_Ij([1.5, 1.5]) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 6), min_size=2, max_size=5))
def test_ij_matches_quadrature_and_bounds(g):
    g = np.sort(g)[::-1]
    val = integral_Ij(g)
    want, _ = oracles.integral_Ij_quadrature(g)
    assert val == pytest.approx(want, rel=1e-8, abs=1e-14)
    assert -1e-15 <= val <= np.exp(-g[-1]) + 1e-15


def test_ij_vectorised():
    g = np.array([[3, 2, 1], [4, 1, 0.5]])
    assert np.allclose(integral_Ij(g), [integral_Ij(g[0]), integral_Ij(g[1])], rtol=1e-15)


def test_j_examples():
    assert integral_J([50.0], 2) == pytest.approx(1.0, abs=1e-12)
    assert integral_J([2, 1], 2) == pytest.approx(1 - np.exp(-1) - np.exp(-2), rel=1e-13)
    assert integral_J([2.0], 3) == pytest.approx(regularized_lower_gamma(3, 2.0), rel=1e-15)


def test_j_needs_enough_receivers():
    with pytest.raises(ParameterError):
        integral_J([3, 2, 1], 2)


def test_j_zero_and_monotone():
    assert integral_J([3, 2, 0.0], 4) == 0.0
    zs = np.linspace(0.01, 2.0, 50)
    vals = [integral_J([3, 2, z], 4) for z in zs]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("m,r", [(1, 3), (2, 2), (2, 4), (3, 4), (4, 5)])
def test_j_small_argument_slope(m, r):
    head = [4.0, 3.0, 2.0][: m - 1]
    zs = [1e-4, 1e-3]
    vals = [integral_J(head + [z], r) for z in zs]
    slope = np.diff(np.log(vals))[0] / np.diff(np.log(zs))[0]
    assert slope == pytest.approx(r - m + 1, abs=0.05)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda m: st.tuples(st.lists(st.floats(0, 6), min_size=m, max_size=m),
                        st.integers(m, 6))))
def test_j_matches_quadrature(args):
    g, r = args
    g = np.sort(g)[::-1]
    want, _ = oracles.integral_J_quadrature(g, r)
    assert integral_J(g, r) == pytest.approx(want, rel=1e-8, abs=1e-14)


def test_j_reduces_when_last_gain_reaches_previous():
    g = [4.0, 2.5, 1.0]
    assert integral_J(g + [1.0], 5) == pytest.approx(integral_J(g, 5), rel=1e-12)


def test_upper_gamma_examples():
    for x in (0.0, 0.3, 7.0):
        assert upper_gamma_int(1, x) == pytest.approx(np.exp(-x), rel=1e-15)
    for s in range(1, 8):
        assert upper_gamma_int(s, 0.0) == pytest.approx(math.factorial(s - 1), rel=1e-15)
    assert upper_gamma_int(3, 2.0) == pytest.approx(10 * np.exp(-2), rel=1e-15)


def test_lower_gamma_small_x_is_cancellation_free():
    # P(4, x) ~ x^4 / 24 for tiny x; a 1 - Q evaluation would return 0
    assert regularized_lower_gamma(4, 1e-5) == pytest.approx(1e-20 / 24, rel=1e-4)
