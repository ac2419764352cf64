"""Acceptance gate: end-to-end numerical criteria with stated budgets.

Each test prints exactly one ``[criterion N] ...: PASS/FAIL`` line.
"""

import time

import numpy as np
import pytest

from ladderlab import families, svgplot
from ladderlab.dynamics import algebraic_trajectory, closure_detect, conservation_report, integrate
from ladderlab.errors import NotALadderError
from ladderlab.ladder import hamiltonian_observable
from ladderlab.phase import PhaseState, poisson_bracket
from ladderlab.potentials import (
    branch_continuation,
    closed_form_v3,
    closed_form_v4,
    double_root_set,
    gravel_potential,
    triple_root_set,
)
from ladderlab.superint import (
    algebra_check,
    compose,
    conservation_bracket_check,
    independence_fraction,
    sample_states_2d,
)
from ladderlab.verify import (
    TOLERANCES,
    bracket_phase_factor,
    domain_samples,
    ode_residual,
    phase_samples,
    verify_family,
)


def _report(n: int, label: str, ok: bool, detail: str = ""):
    print(f"[criterion {n}] {label}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"criterion {n} ({label}) failed: {detail}"


def _fig_axes(sign):
    axis1 = families.make_axis(4, 1.0, variant="deformed", eps2=4.0, sign=sign)
    axis2 = families.make_axis(4, 2.0, variant="deformed", eps2=16.0, sign=sign)
    return compose(axis1, axis2, 2, 1)


# ---------------------------------------------------------------------------
# 1. worked-value anchors
# ---------------------------------------------------------------------------


def test_criterion_1_worked_value_anchors():
    t0 = time.perf_counter()
    tol = 1e-10
    ok = True

    # order 3, roots (1, 1, -2), omega 1, x = 1
    branch, rs = families.closed_form_family(3, "harmonic", 1.0, 1.0)
    pair = families.build_pair(branch, rs)
    s = PhaseState((1.0,), (0.0,))
    ok &= abs(float(branch.v(1.0)) + 1.5) < tol
    ok &= abs(pair.lowering.coefficient(1, 1.0) + 5.0) < tol
    ok &= abs(pair.lowering.coefficient(0, 1.0) + 5.0) < tol
    ok &= abs(pair.product(s) - 25.0) < tol
    ok &= abs(pair.polynomials.q(-1.5) - 8.0 * (-2.5) ** 2 * 0.5) < 1e-8

    # order 4, roots (1, 1, 1, -3), rational family, x = 2
    branch, rs = families.closed_form_family(4, "rational", 1.0, 1.0)
    pair = families.build_pair(branch, rs)
    s = PhaseState((2.0,), (0.0,))
    ok &= abs(float(branch.v(2.0)) - 1.5) < tol
    ok &= abs(pair.lowering.coefficient(0, 2.0) - 3.0) < tol
    ok &= abs(pair.lowering.coefficient(1, 2.0) + 2.0) < tol
    ok &= abs(pair.product(s) - 9.0) < tol
    ok &= abs(pair.polynomials.q(1.5) - 16.0 * 0.5**3 * 4.5) < 1e-8

    # order 4 deformed lower branch, x = 6
    branch, rs = families.closed_form_family(4, "deformed", 1.0, 1.0, -1)
    pair = families.build_pair(branch, rs)
    ok &= abs(float(branch.v(6.0)) - 1.5) < tol
    ok &= abs(pair.lowering.coefficient(0, 6.0) - 3.0) < tol
    ok &= abs(pair.lowering.coefficient(1, 6.0) - 10.0) < tol
    # defining quartic combination at that point: -64 + 100 - 72 + 144 - 108
    ok &= abs(-64.0 + 100.0 - 72.0 + 144.0 - 108.0) < tol

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    _report(1, "worked-value anchors", bool(ok), f"({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# 2. identity suites over random families
# ---------------------------------------------------------------------------


def _random_family(order, rng):
    omega = rng.uniform(0.5, 4.0)
    cap = 2.5 if order == 3 else 5.0 / 3.0  # keeps every |eps_i| <= 5
    if order == 3:
        variant = rng.choice(["harmonic", "deformed"])
    else:
        variant = rng.choice(["rational", "deformed"])
    if variant in ("harmonic",):
        eps2 = rng.uniform(0.3, cap) * rng.choice([-1.0, 1.0])
    elif variant == "rational":
        eps2 = rng.uniform(0.3, cap) * rng.choice([-1.0, 1.0])
    else:
        eps2 = rng.uniform(0.3, cap)  # keep the radicand domain near the origin
    sign = int(rng.choice([-1, 1]))
    branch, rs = families.closed_form_family(order, variant, omega, eps2, sign)
    return branch, rs


def test_criterion_2_identity_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240815)
    ok = True
    worst = {"bracket-phase": 0.0, "product": 0.0, "ode": 0.0, "chain": 0.0}
    for order in (3, 4):
        for _ in range(20):
            branch, rs = _random_family(order, rng)
            pair = families.build_pair(branch, rs)
            report = verify_family(
                branch, pair, rs, n_states=100, seed=int(rng.integers(1 << 30))
            )
            ok &= report.passed
            ok &= abs(report.sigma - 1j) < 1e-6
            worst["bracket-phase"] = max(
                worst["bracket-phase"], report.residual("bracket-phase")
            )
            worst["product"] = max(worst["product"], report.residual("product"))
            for check in report.checks:
                if check.key.startswith("chain"):
                    worst["chain"] = max(worst["chain"], check.max_residual)
                if check.key == "potential-ode":
                    worst["ode"] = max(worst["ode"], check.max_residual)

    # negative controls must overshoot each tolerance by >= 1e3x
    branch, rs = families.closed_form_family(3, "deformed", 1.0, 1.0)
    pair = families.build_pair(branch, rs)
    from ladderlab.potentials import PotentialBranch

    bad = PotentialBranch(
        v_fn=lambda x: branch.v_fn(x) + 0.1 * np.sin(np.asarray(x)),
        dv_fn=lambda x: branch.dv_fn(x) + 0.1 * np.cos(np.asarray(x)),
        domain=branch.domain,
        provenance="perturbed",
    )
    xs = domain_samples(bad, 60, np.random.default_rng(0))
    res = ode_residual(3, bad, 1.0, xs)
    ok &= np.nanmax(res) > 1e3 * TOLERANCES["ode"]

    # detuned frequency: the fitted phase must land far from +-i
    H = hamiltonian_observable(branch)
    states = phase_samples(branch, 20, np.random.default_rng(1))
    A = pair.lowering.observable()
    brackets = np.array([poisson_bracket(H, A, s) for s in states])
    values = 1.01 * np.array([A(s) for s in states])
    sigma_bad = complex(np.vdot(values, brackets) / np.vdot(values, values))
    detune_dev = min(abs(sigma_bad - 1j), abs(sigma_bad + 1j))
    ok &= detune_dev > 1e3 * TOLERANCES["bracket-phase"]
    with pytest.raises(NotALadderError):
        bracket_phase_factor(H, A, 1.01, states, tol=1e-6)

    # wrong product polynomial: relative error >= 1e3x the product tolerance
    pair_bad_q = families.build_pair(*families.closed_form_family(3, "deformed", 1.0, 1.01))
    dev = 0.0
    for s in states:
        e = 0.5 * s.p() ** 2 + float(branch.v(s.x()))
        q = pair_bad_q.polynomials.q(e)
        dev = max(dev, abs(pair.product(s) - q) / (1.0 + abs(q)))
    ok &= dev > 1e3 * TOLERANCES["product"]

    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30.0
    _report(
        2,
        "identity suites (20 random families per order)",
        bool(ok),
        f"(worst {', '.join(f'{k}={v:.2e}' for k, v in worst.items())}, {elapsed:.1f}s)",
    )


# ---------------------------------------------------------------------------
# 3. cross-family identities
# ---------------------------------------------------------------------------


def test_criterion_3_cross_family_identities():
    ok = True
    # square-root family == deformed order-3 family under b = 18 eps2 / w^2
    for omega, eps2, sign in ((1.0, 1.0, 1), (1.7, 0.8, -1), (0.6, 2.0, 1)):
        deformed = closed_form_v3(omega, eps2, "deformed", sign=sign)
        known = gravel_potential(omega, 18.0 * eps2 / omega**2, sign=sign)
        xs = np.linspace(-8.0, 8.0, 100)
        keep = np.array([deformed.contains(x, 1e-9) for x in xs])
        xs = xs[keep]
        ok &= xs.size >= 50
        ok &= float(np.max(np.abs(deformed.v(xs) - known.v(xs)))) < 1e-10

    # continuation branches at a multiple root collapse onto the closed forms
    collapse = 0.0
    for order, refs in (
        (
            3,
            [closed_form_v3(1.0, 1.0, "harmonic")]
            + [closed_form_v3(1.0, 1.0, "deformed", sign=s) for s in (1, -1)],
        ),
        (
            4,
            [closed_form_v4(1.0, 1.0, "rational")]
            + [closed_form_v4(1.0, 1.0, "deformed", sign=s) for s in (1, -1)],
        ),
    ):
        rs = double_root_set(1.0, 1.0) if order == 3 else triple_root_set(1.0, 1.0)
        grid = np.linspace(0.3, 2.5, 23)
        xs = np.linspace(0.4, 2.4, 21)
        branches = branch_continuation(rs, grid)
        for ref in refs:
            best = np.inf
            for br in branches:
                kept, vs, _ = br.sample(xs, margin=1e-9)
                if kept.size < xs.size:
                    continue
                best = min(best, float(np.max(np.abs(vs - ref.v(kept)))))
            collapse = max(collapse, best)
    ok &= collapse < 1e-8
    _report(3, "cross-family identities", bool(ok), f"(collapse {collapse:.2e})")


# ---------------------------------------------------------------------------
# 4. superintegrability of the figure systems
# ---------------------------------------------------------------------------


def test_criterion_4_superintegrability(tmp_path):
    t0 = time.perf_counter()
    ok = True
    detail = []
    s0 = PhaseState((1.0, 1.0), (1.0, -3.0))
    for sign in (1, -1):
        h2d = _fig_axes(sign)
        states = sample_states_2d(h2d, 50, np.random.default_rng(5))
        checks = conservation_bracket_check(h2d, states)
        ok &= max(checks.values()) < 1e-6

        traj = integrate(h2d, s0, 20.0, rel_tol=1e-10)
        drifts = conservation_report(traj, h2d.integral_set())
        ok &= drifts["H"] < 1e-8 and drifts["K"] < 1e-8
        ok &= drifts["J1"] < 1e-6 and drifts["J2"] < 1e-6

        ok &= independence_fraction(h2d, states) >= 0.95

        period, dist = closure_detect(traj, tol=1e-6)
        ok &= dist < 1e-4
        # the axis frequencies are 1 and 2; any true period must sit within
        # 1e-3 of a multiple of their common period 2 pi
        k = round(period / (2.0 * np.pi))
        ok &= k >= 1 and abs(period - 2.0 * np.pi * k) < 1e-3

        # deterministic SVG emission
        name = "fig1" if sign > 0 else "fig2"
        xs, ys = traj.coords[:, 0], traj.coords[:, 2]
        doc1 = svgplot.render_curve(xs, ys, title=name, annotation=f"sign={sign:+d}")
        doc2 = svgplot.render_curve(xs, ys, title=name, annotation=f"sign={sign:+d}")
        ok &= doc1 == doc2
        (tmp_path / f"{name}.svg").write_text(doc1)
        detail.append(
            f"{name}: bracket {max(checks.values()):.1e}, "
            f"closure {dist:.1e}, period {period:.6f}"
        )
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    _report(4, "superintegrability", bool(ok), f"({'; '.join(detail)}, {elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 5. bracket algebra closure
# ---------------------------------------------------------------------------


def test_criterion_5_algebra_closure():
    ok = True
    worst = 0.0
    systems = [
        compose(families.make_axis(1, 1.0), families.make_axis(1, 2.0), 2, 1),
        _fig_axes(1),
        _fig_axes(-1),
    ]
    for h2d in systems:
        states = sample_states_2d(h2d, 50, np.random.default_rng(7))
        report = algebra_check(h2d, states, tol=1e-5)
        ok &= report.passed
        ok &= abs(abs(report.sigma_i1_i2) - 1.0) < 1e-3
        worst = max(worst, report.deviations["I1-I2"])
    _report(5, "algebra closure", bool(ok), f"(worst deviation {worst:.2e})")


# ---------------------------------------------------------------------------
# 6. algebraic vs numeric trajectories
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "order,variant,sign,x0",
    [
        (1, None, 1, 1.0),
        (3, "harmonic", 1, 1.0),
        (3, "deformed", 1, 1.0),
        (4, "rational", 1, 2.0),
        (4, "deformed", -1, 6.0),
    ],
    ids=["order1", "v3-harmonic", "v3-deformed", "v4-rational", "v4-deformed"],
)
def test_criterion_6_algebraic_vs_numeric(order, variant, sign, x0):
    axis = families.make_axis(order, 1.0, variant=variant, eps2=1.0, sign=sign)
    s0 = PhaseState((x0,), (1.0,))
    period = 2.0 * np.pi / axis.omega
    traj = integrate(axis, s0, period, rel_tol=1e-12, n_samples=400)
    states = algebraic_trajectory(axis.branch, axis.pair, s0, traj.times)
    gap = float(np.max(np.abs(np.array([s.coords for s in states]) - traj.coords)))
    label = f"algebraic vs numeric ({variant or 'order1'})"
    _report(6, label, gap < 1e-6, f"(max gap {gap:.2e})")
