import math

import numpy as np
import pytest

from ladderlab.errors import DomainError
from ladderlab.potentials import (
    RootSet,
    branch_continuation,
    closed_form_v3,
    closed_form_v4,
    double_root_set,
    gravel_potential,
    triple_root_set,
)


def test_root_set_invariants_order3():
    rs = double_root_set(1.0, 1.0)
    assert rs.roots == (-2.0, 1.0, 1.0)
    inv = rs.invariants()
    assert inv.d == pytest.approx(12.0)
    assert inv.c == pytest.approx(64.0)


def test_root_set_invariants_order4():
    rs = triple_root_set(1.0, 1.0)
    assert rs.roots == (-3.0, 1.0, 1.0, 1.0)
    inv = rs.invariants()
    # Q(E)/16 = E^4 - 6E^2 + 8E - 3 = E^4 - d E^2 + c E - e
    assert (inv.d, inv.c, inv.e) == pytest.approx((6.0, 8.0, 3.0))


def test_root_set_rejects_bad_order():
    with pytest.raises(ValueError):
        RootSet(2, (1.0, -1.0), 1.0)


def test_closed_form_v3_harmonic_values():
    br = closed_form_v3(1.0, 1.0, "harmonic")
    assert float(br.v(1.0)) == pytest.approx(-1.5, abs=1e-12)
    assert float(br.dv(1.0)) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_v4_rational_values():
    br = closed_form_v4(1.0, 1.0, "rational")
    assert float(br.v(2.0)) == pytest.approx(1.5, abs=1e-12)
    assert not br.contains(0.0)
    with pytest.raises(DomainError):
        br.v(0.0)


def test_closed_form_v4_deformed_lower_values():
    br = closed_form_v4(1.0, 1.0, "deformed", sign=-1)
    assert float(br.v(6.0)) == pytest.approx(1.5, abs=1e-12)


def test_unknown_variant_rejected():
    with pytest.raises(ValueError):
        closed_form_v3(1.0, 1.0, "cubic")
    with pytest.raises(ValueError):
        closed_form_v4(1.0, 1.0, "cubic")


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("omega,eps2", [(1.0, 1.0), (2.0, 0.7), (0.8, -1.3)])
def test_gravel_matches_deformed_order3(sign, omega, eps2):
    """The known square-root family is the deformed order-3 one, b = 18 eps2 / w^2."""
    b = 18.0 * eps2 / omega**2
    deformed = closed_form_v3(omega, eps2, "deformed", sign=sign)
    known = gravel_potential(omega, b, sign=sign)
    xs = np.linspace(-10.0, 10.0, 201)
    keep = np.array([deformed.contains(x, 1e-9) and known.contains(x, 1e-9) for x in xs])
    xs = xs[keep]
    assert xs.size > 50
    assert np.max(np.abs(deformed.v(xs) - known.v(xs))) < 1e-10
    assert np.max(np.abs(deformed.dv(xs) - known.dv(xs))) < 1e-10


def test_deformed_domain_has_gap_for_negative_eps2():
    br = closed_form_v3(1.0, -1.0, "deformed")
    assert not br.contains(0.0)
    assert br.contains(10.0) and br.contains(-10.0)


def test_sample_and_write_csv(tmp_path):
    br = closed_form_v3(1.0, 1.0, "harmonic")
    xs = np.linspace(-2.0, 2.0, 41)
    path = tmp_path / "branch.csv"
    br.write_csv(path, xs)
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert set(data.dtype.names) == {"x", "V", "dV"}
    assert data["x"].size == 41
    i = int(np.argmin(np.abs(data["x"] - 1.0)))
    assert data["V"][i] == pytest.approx(-1.5, abs=1e-12)


def test_continuation_collapses_onto_closed_forms():
    """For a double root set the continuation branches are the closed forms."""
    rs = double_root_set(1.0, 1.0)
    grid = np.linspace(0.3, 2.5, 23)
    xs = np.linspace(0.4, 2.4, 21)  # strictly inside the continuation window
    branches = branch_continuation(rs, grid)
    assert len(branches) >= 3
    references = [closed_form_v3(1.0, 1.0, "harmonic")] + [
        closed_form_v3(1.0, 1.0, "deformed", sign=s) for s in (1, -1)
    ]
    for ref in references:
        best = math.inf
        for br in branches:
            kept, vs, _ = br.sample(xs, margin=1e-9)
            if kept.size < xs.size:
                continue
            best = min(best, float(np.max(np.abs(vs - ref.v(kept)))))
        assert best < 1e-8
