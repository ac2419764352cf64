import numpy as np
import pytest

from ladderlab import families
from ladderlab.errors import InconsistentInputError
from ladderlab.ladder import build_ladder1, build_ladder3, hamiltonian_observable
from ladderlab.phase import PhaseState
from ladderlab.potentials import SymmetricInvariants, closed_form_v3
from ladderlab.verify import bracket_phase_factor, phase_samples


def _pair(order, variant, omega=1.0, eps2=1.0, sign=1):
    branch, rs = families.closed_form_family(order, variant, omega, eps2, sign)
    return branch, rs, families.build_pair(branch, rs)


def test_order1_pair():
    pair = build_ladder1(2.0)
    s = PhaseState((1.0,), (0.5,))
    assert pair.lowering(s) == pytest.approx(0.5 - 2.0j)
    assert pair.raising(s) == pytest.approx(0.5 + 2.0j)
    assert pair.polynomials.q(3.0) == pytest.approx(6.0)
    assert pair.product(s) == pytest.approx(pair.polynomials.q(0.5 * 0.5**2 + 2.0))


def test_order3_worked_values():
    branch, rs, pair = _pair(3, "harmonic")
    low = pair.lowering
    assert low.coefficient(2, 1.0) == pytest.approx(1.0, abs=1e-10)
    assert low.coefficient(1, 1.0) == pytest.approx(-5.0, abs=1e-10)
    assert low.coefficient(0, 1.0) == pytest.approx(-5.0, abs=1e-10)
    s = PhaseState((1.0,), (0.0,))
    # value at p=0 is i*f0 for the lowering member of this family
    assert low(s) == pytest.approx(5.0j, abs=1e-10)
    assert pair.product(s) == pytest.approx(25.0, abs=1e-10)
    assert pair.polynomials.q(-1.5) == pytest.approx(25.0, rel=1e-10)


def test_order3_q_polynomial():
    _, _, pair = _pair(3, "harmonic")
    # Q(E) = 8 E^3 - 24 E + 16 = 8 (E-1)^2 (E+2)
    assert np.allclose(pair.polynomials.q_coeffs, [8.0, 0.0, -24.0, 16.0], atol=1e-9)
    # P = -i w Q'
    assert np.allclose(pair.polynomials.p_coeffs, [-24.0j, 0.0, 24.0j], atol=1e-9)


def test_order4_worked_values():
    branch, rs, pair = _pair(4, "rational")
    low = pair.lowering
    assert low.coefficient(3, 2.0) == pytest.approx(-2.0, abs=1e-10)
    assert low.coefficient(2, 2.0) == pytest.approx(4.0, abs=1e-10)
    assert low.coefficient(1, 2.0) == pytest.approx(-2.0, abs=1e-10)
    assert low.coefficient(0, 2.0) == pytest.approx(3.0, abs=1e-10)
    s = PhaseState((2.0,), (0.0,))
    assert pair.product(s) == pytest.approx(9.0, abs=1e-10)
    assert np.allclose(
        pair.polynomials.q_coeffs, [16.0, 0.0, -96.0, 128.0, -48.0], atol=1e-9
    )


def test_order4_deformed_lower_values():
    branch, rs, pair = _pair(4, "deformed", sign=-1)
    assert float(branch.v(6.0)) == pytest.approx(1.5, abs=1e-10)
    assert pair.lowering.coefficient(0, 6.0) == pytest.approx(3.0, abs=1e-10)
    assert pair.lowering.coefficient(1, 6.0) == pytest.approx(10.0, abs=1e-10)


@pytest.mark.parametrize(
    "order,variant,sign",
    [(3, "harmonic", 1), (3, "deformed", -1), (4, "rational", 1), (4, "deformed", -1)],
)
def test_lowering_has_positive_bracket_phase(order, variant, sign):
    branch, rs, pair = _pair(order, variant, sign=sign)
    H = hamiltonian_observable(branch)
    states = phase_samples(branch, 12, np.random.default_rng(0))
    sigma = bracket_phase_factor(
        H, pair.lowering.observable(), pair.omega, states, tol=1e-6
    )
    assert sigma == pytest.approx(1j, abs=1e-6)
    sigma_up = bracket_phase_factor(
        H, pair.raising.observable(), pair.omega, states, tol=1e-6
    )
    assert sigma_up == pytest.approx(-1j, abs=1e-6)


def test_conjugate_flips_value():
    _, _, pair = _pair(3, "harmonic")
    s = PhaseState((0.8,), (1.1,))
    assert pair.lowering.conjugate().value(0.8, 1.1) == pytest.approx(
        np.conj(pair.lowering.value(0.8, 1.1))
    )


def test_coefficients_continuous_through_origin():
    # f0 has a removable 0/0 at x = 0; the guard must supply the limit
    _, _, pair = _pair(3, "harmonic")
    inner = pair.lowering.coefficient(0, 1e-8)
    outer = pair.lowering.coefficient(0, 2e-3)
    assert abs(inner - outer) < 5e-2
    assert np.isfinite(inner)


def test_inconsistent_invariants_rejected():
    branch = closed_form_v3(1.0, 1.0, "harmonic")
    with pytest.raises(InconsistentInputError):
        build_ladder3(branch, 1.0, SymmetricInvariants(d=1.0, c=-3.0))


def test_2d_axis_evaluation():
    _, _, pair = _pair(3, "harmonic")
    s1 = PhaseState((1.0,), (0.5,))
    s2 = PhaseState((3.0, 1.0), (7.0, 0.5))
    assert pair.lowering(s2, axis=1) == pytest.approx(pair.lowering(s1))
