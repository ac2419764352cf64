import math

import numpy as np
import pytest

from ladderlab.phase import (
    Observable,
    PhaseState,
    coordinate_observable,
    estimate_gradient,
    momentum_observable,
    poisson_bracket,
)


def test_state_roundtrip_and_accessors():
    s = PhaseState((1.0, -2.0), (0.5, 3.0))
    assert s.dim == 2
    assert s.x(1) == -2.0 and s.p(0) == 0.5
    assert np.allclose(s.coords, [1.0, 0.5, -2.0, 3.0])
    assert PhaseState.from_coords(s.coords) == s


def test_state_validation():
    with pytest.raises(ValueError):
        PhaseState((1.0,), (1.0, 2.0))
    with pytest.raises(ValueError):
        PhaseState((math.inf,), (0.0,))
    with pytest.raises(ValueError):
        PhaseState((), ())


def test_shifted_is_pure():
    s = PhaseState((1.0,), (2.0,))
    t = s.shifted(1, 0.25)
    assert t.p() == 2.25 and s.p() == 2.0


def test_canonical_bracket():
    x, p = coordinate_observable(), momentum_observable()
    s = PhaseState((0.7,), (-1.3,))
    assert poisson_bracket(x, p, s) == pytest.approx(1.0, abs=1e-10)
    assert poisson_bracket(p, x, s) == pytest.approx(-1.0, abs=1e-10)
    assert poisson_bracket(x, x, s) == pytest.approx(0.0, abs=1e-12)


def test_harmonic_ladder_bracket_phase():
    # with {f,g} = f_x g_p - f_p g_x the lowering operator p - i x obeys
    # {H, a} = +i a for H = (p^2 + x^2)/2
    H = Observable(1, lambda s: 0.5 * (s.p() ** 2 + s.x() ** 2))
    a = Observable(1, lambda s: s.p() - 1j * s.x())
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = PhaseState((rng.uniform(-2, 2),), (rng.uniform(-2, 2),))
        if abs(a(s)) < 0.1:
            continue
        assert poisson_bracket(H, a, s) / a(s) == pytest.approx(1j, abs=1e-9)


def test_analytic_gradient_path_matches_fd():
    f = Observable(
        1,
        lambda s: s.x() ** 3 + 2.0 * s.x() * s.p(),
        grad=lambda s: np.array([3.0 * s.x() ** 2 + 2.0 * s.p(), 2.0 * s.x()]),
    )
    g = Observable(
        1,
        lambda s: math.sin(s.p()),
        grad=lambda s: np.array([0.0, math.cos(s.p())]),
    )
    s = PhaseState((0.9,), (0.4,))
    analytic = poisson_bracket(f, g, s)
    fd = poisson_bracket(
        Observable(1, f.fn), Observable(1, g.fn), s
    )
    assert analytic == pytest.approx(fd, rel=1e-8)


def test_gradient_arity_check():
    f = Observable(2, lambda s: s.x(0) * s.p(1))
    with pytest.raises(ValueError):
        estimate_gradient(f, PhaseState((1.0,), (1.0,)))
