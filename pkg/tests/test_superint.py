import numpy as np
import pytest

from ladderlab import families
from ladderlab.errors import ResonanceError
from ladderlab.superint import (
    algebra_check,
    compose,
    conservation_bracket_check,
    independence_fraction,
    resonance_integers,
    sample_states_2d,
)


def _fig_system(sign):
    axis1 = families.make_axis(4, 1.0, variant="deformed", eps2=4.0, sign=sign)
    axis2 = families.make_axis(4, 2.0, variant="deformed", eps2=16.0, sign=sign)
    return compose(axis1, axis2, 2, 1)


def test_resonance_integers():
    assert resonance_integers(1.0, 2.0) == (2, 1)
    assert resonance_integers(2.0, 3.0) == (3, 2)
    with pytest.raises(ResonanceError):
        resonance_integers(1.0, np.sqrt(2.0))


def test_detuned_composition_rejected():
    axis1 = families.make_axis(1, 1.0)
    axis2 = families.make_axis(1, 2.0001)
    with pytest.raises(ResonanceError):
        compose(axis1, axis2, 2, 1)


def test_non_coprime_multipliers_rejected():
    axis1 = families.make_axis(1, 1.0)
    axis2 = families.make_axis(1, 1.0)
    with pytest.raises(ValueError):
        compose(axis1, axis2, 2, 2)


def test_harmonic_baseline_brackets_and_algebra():
    h2d = compose(families.make_axis(1, 1.0), families.make_axis(1, 2.0), 2, 1)
    rng = np.random.default_rng(0)
    states = sample_states_2d(h2d, 30, rng)
    checks = conservation_bracket_check(h2d, states)
    assert max(checks.values()) < 1e-6
    report = algebra_check(h2d, states)
    assert report.passed


@pytest.mark.parametrize("sign", [1, -1])
def test_fig_system_brackets(sign):
    h2d = _fig_system(sign)
    states = sample_states_2d(h2d, 25, np.random.default_rng(1))
    checks = conservation_bracket_check(h2d, states)
    assert set(checks) == {"K", "I1", "I2"}
    assert max(checks.values()) < 1e-6


@pytest.mark.parametrize("sign", [1, -1])
def test_fig_system_algebra_constants(sign):
    h2d = _fig_system(sign)
    states = sample_states_2d(h2d, 25, np.random.default_rng(2))
    report = algebra_check(h2d, states)
    assert report.passed, report.deviations
    # the unit-modulus constants are fixed by the operator conventions
    assert report.sigma_k_i1 == pytest.approx(-1j, abs=1e-5)
    assert report.sigma_k_i2 == pytest.approx(-1j, abs=1e-5)
    assert report.sigma_i1_i2 == pytest.approx(1.0, abs=1e-5)


def test_fig_system_reality_and_independence():
    h2d = _fig_system(1)
    ints = h2d.integral_set()
    states = sample_states_2d(h2d, 25, np.random.default_rng(3))
    for s in states:
        i1, i2 = ints.I1(s), ints.I2(s)
        scale = 1.0 + abs(i1) + abs(i2)
        assert abs(i1.real) / scale < 1e-10
        assert abs(i2.imag) / scale < 1e-10
    assert independence_fraction(h2d, states) >= 0.95


def test_integral_degrees():
    h2d = _fig_system(1)
    assert h2d.integral_set().orders == (4 * 2 + 4 * 1, 4 * 2 + 4 * 1)


def test_axis_energy_split():
    h2d = _fig_system(1)
    from ladderlab.phase import PhaseState

    s = PhaseState((1.0, 1.0), (1.0, -3.0))
    e1 = h2d.axis1.energy(s, 0)
    e2 = h2d.axis2.energy(s, 1)
    assert e1 + e2 == pytest.approx(h2d.h(s))
    assert e1 - e2 == pytest.approx(h2d.k(s))
