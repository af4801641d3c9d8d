import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vblast.distribution import LayerLaw, NoOrderingLaw
from vblast.errors import NumericError, ParameterError
from vblast.power import (activation_eps, activation_power, db_to_linear, eps_outage_capacity,
                          feedback_bits, layer_thresholds, linear_to_db, outage_probability,
                          waterfill, waterfill_gains)


class ConstantLaw:
    """Stub law whose every layer has the same inverse CDF."""

    def __init__(self, t, g):
        self.t, self.g = t, g

    def cdf(self, layer, x):
        return min(1.0, x / (2 * self.g))

    def ppf(self, layer, eps):
        return self.g


LAW = LayerLaw(3, 4)


def test_db_round_trip():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert linear_to_db(db_to_linear(17.3)) == pytest.approx(17.3)


def test_outage_probability_limits_and_consistency():
    assert outage_probability(LAW, 3, 1.0, 1e12) < 1e-20
    p = 5.0
    rate = eps_outage_capacity(LAW, 2, 0.1, p)
    assert outage_probability(LAW, 2, rate, p) == pytest.approx(0.1, abs=1e-6)
    with pytest.raises(ParameterError):
        outage_probability(LAW, 1, 1.0, 0.0)


def test_outage_diversity_slopes():
    rho = db_to_linear(np.array([40.0, 50.0]))
    for layer, order in [(1, 12), (2, 6), (3, 2)]:
        p = [outage_probability(LAW, layer, 1.0, x / 3) for x in rho]
        slope = np.diff(np.log10(p))[0] / np.diff(np.log10(rho))[0]
        assert slope == pytest.approx(-order, rel=0.05)


def test_capacity_examples():
    assert eps_outage_capacity(LAW, 1, 0.1, 0.0) == 0.0
    g = LAW.ppf(2, 0.05)
    assert eps_outage_capacity(LAW, 2, 0.05, 1.0 / g) == pytest.approx(1.0, abs=1e-12)


def test_thresholds_ordered():
    for eps in (0.01, 0.1, 0.5, 0.9):
        g = layer_thresholds(LayerLaw(4, 4), eps)
        assert np.all(np.diff(g) <= 0)


def test_waterfill_symmetric_and_single():
    a = waterfill(ConstantLaw(3, 2.0), 0.1, 6.0)
    assert np.allclose(a.powers, 2.0)
    a = waterfill_gains([0.7], 4.0)
    assert a.powers[0] == pytest.approx(4.0)
    assert a.mu == pytest.approx(4.0 + 1 / 0.7)
    assert a.active == (1,)


def test_waterfill_bad_inputs():
    with pytest.raises(ParameterError):
        waterfill_gains([1.0, 2.0], 0.0)
    with pytest.raises(NumericError):
        waterfill_gains([1.0, 0.0], 1.0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=6), st.floats(1e-3, 1e4))
def test_waterfill_kkt(gains, total):
    g = np.sort(gains)[::-1]
    a = waterfill_gains(g, total)
    assert a.powers.sum() == pytest.approx(total, rel=1e-9)
    assert np.all(a.powers >= 0)
    act = [i - 1 for i in a.active]
    assert act == list(range(len(act)))
    assert np.allclose(a.powers[act], a.mu - 1 / g[act], rtol=1e-9)
    assert np.all(a.powers[act] > 0)
    rest = np.setdiff1d(np.arange(len(g)), act)
    assert np.all(a.mu <= 1 / g[rest] * (1 + 1e-12))
    bigger = waterfill_gains(g, 2 * total)
    assert np.all(bigger.powers >= a.powers - 1e-12 * total)


def test_waterfill_beats_uniform():
    g = layer_thresholds(LAW, 0.1)
    a = waterfill_gains(g, 10.0)
    uniform = np.log2(1 + g * 10.0 / 3).sum()
    assert a.rates().sum() >= uniform - 1e-12


def test_activation_power_matches_waterfill():
    g = layer_thresholds(LayerLaw(4, 4), 0.1)
    rho = activation_power(g, 4)
    assert 4 not in waterfill_gains(g, rho * 0.999).active
    assert 4 in waterfill_gains(g, rho * 1.001).active


def test_activation_eps_layer3():
    eps = activation_eps(LAW, db_to_linear(5.0), 3)
    a_lo = waterfill(LAW, eps - 0.01, db_to_linear(5.0))
    a_hi = waterfill(LAW, eps + 0.01, db_to_linear(5.0))
    assert a_lo.powers[2] == 0.0
    assert a_hi.powers[2] > 0.0


def test_activation_eps_no_crossing():
    with pytest.raises(NumericError):
        activation_eps(LAW, 1e6, 3)


def test_fourth_layer_off_up_to_15_db():
    law = LayerLaw(4, 4)
    for db in np.arange(0.0, 15.01, 1.0):
        assert waterfill(law, 0.1, db_to_linear(db)).powers[3] == 0.0


def test_ordering_gain_over_baseline():
    base = NoOrderingLaw(3, 4)
    p = db_to_linear(15.0) / 3
    greedy = sum(eps_outage_capacity(LAW, i, 0.1, p) for i in (1, 2, 3))
    plain = sum(eps_outage_capacity(base, i, 0.1, p) for i in (1, 2, 3))
    assert 0.5 <= greedy - plain <= 1.5


def test_feedback_bits():
    assert feedback_bits(1) == (0.0, 0)
    exact, bits = feedback_bits(3)
    assert exact == pytest.approx(math.log2(6)) and bits == 3
    exact, bits = feedback_bits(4)
    assert exact == pytest.approx(4.585, abs=1e-3) and bits == 5
    with pytest.raises(ParameterError):
        feedback_bits(0)
