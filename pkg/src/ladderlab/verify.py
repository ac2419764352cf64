"""Residual suites proving a (branch, ladder) pair realizes a Poisson algebra.

Every check produces a normalized maximum residual; a family "verifies"
when all residuals sit below their tolerances.  The checks are

* ``potential-ode``      the nonlinear ODE the potential itself must solve,
* ``chain-*``            the coefficient ODE chain linking f_i, f_{i+1}, V,
* ``alg-*``              the algebraic relations among f_i and V at fixed x,
* ``product``            A_lower A_upper = Q(H),
* ``bracket``            {A_lower, A_upper} = P(H),
* ``bracket-phase``      {H, A_lower} = sigma omega A_lower with sigma = +i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NotALadderError
from .ladder import LadderPair, PhaPolynomials, hamiltonian_observable
from .phase import Observable, PhaseState, poisson_bracket
from .potentials import PotentialBranch, RootSet, _g4_scale, _g4_system

#: default tolerances per check family
TOLERANCES = {
    "ode": 1e-5,
    "chain": 1e-5,
    "algebraic": 1e-8,
    "product": 1e-8,
    "bracket": 1e-6,
    "bracket-phase": 1e-6,
}

#: global finite-difference step scale for the residual suites
FD_STEP = 1e-4


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    key: str
    max_residual: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance


@dataclass
class VerificationReport:
    """Aggregated residuals of one verification run."""

    family: str
    checks: list = field(default_factory=list)
    sigma: Optional[complex] = None

    def add(self, key: str, max_residual: float, tolerance: float, samples: int):
        self.checks.append(CheckResult(key, float(max_residual), tolerance, samples))

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def residual(self, key: str) -> float:
        for c in self.checks:
            if c.key == key:
                return c.max_residual
        raise KeyError(key)

    def to_text(self) -> str:
        lines = [f"verification report: {self.family}"]
        if self.sigma is not None:
            lines.append(f"  bracket phase sigma = {self.sigma:+.6f}")
        width = max(len(c.key) for c in self.checks) if self.checks else 8
        for c in self.checks:
            lines.append(
                f"  {c.key:<{width}}  max residual {c.max_residual:12.5e}"
                f"  tol {c.tolerance:8.1e}  n={c.samples:<4d}"
                f"  {'pass' if c.passed else 'FAIL'}"
            )
        lines.append(f"  overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    __str__ = to_text

    def write_csv(self, path) -> str:
        with open(path, "w") as fh:
            fh.write("equation,max_residual,tolerance,pass\n")
            for c in self.checks:
                fh.write(
                    f"{c.key},{c.max_residual:.17g},{c.tolerance:.17g},"
                    f"{'true' if c.passed else 'false'}\n"
                )
        return path


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------


def domain_samples(
    branch: PotentialBranch,
    count: int,
    rng: np.random.Generator,
    span: float = 6.0,
    pad_frac: float = 0.05,
    avoid_zero: float = 5e-2,
):
    """Uniform x samples over the branch domain clipped to |x| <= span."""
    segments = []
    for lo, hi in branch.domain:
        a, b = max(lo, -span), min(hi, span)
        if b - a > 0:
            pad = pad_frac * (b - a)
            segments.append((a + pad, b - pad))
    if not segments:
        raise DomainError(f"domain of {branch.provenance} has no span within +-{span}")
    lengths = np.array([b - a for a, b in segments])
    xs = []
    while len(xs) < count:
        i = rng.choice(len(segments), p=lengths / lengths.sum())
        x = rng.uniform(*segments[i])
        if abs(x) > avoid_zero:
            xs.append(x)
    return np.array(xs)


def phase_samples(
    branch: PotentialBranch,
    count: int,
    rng: np.random.Generator,
    momentum_range=(-3.0, 3.0),
    span: float = 6.0,
):
    xs = domain_samples(branch, count, rng, span=span)
    ps = rng.uniform(*momentum_range, size=count)
    return [PhaseState((x,), (p,)) for x, p in zip(xs, ps)]


def _fd_derivatives(fn, x: float, h: float):
    """5-point first and second derivatives of a scalar function."""
    f = [fn(x + k * h) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
    d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    return d1, d2


# ---------------------------------------------------------------------------
# potential ODE residuals
# ---------------------------------------------------------------------------


def ode_residual(
    order: int, branch: PotentialBranch, omega: float, x_samples: Sequence[float]
) -> np.ndarray:
    """Normalized residuals of the nonlinear potential ODE at each sample.

    Order 3 checks the second-order equation

        w^4 x^2 / 2 - 3 w^2 V - 3 w^2 x V' + 3 V'^2
            - w^2 x^2 V'' / 2 + 3 V V'' = 0,

    order 4 the third-order equation obtained by eliminating f1 between its
    defining relation f1 (V'' - w^2) = 3 w (f2 V' + x V'^2) and the chain
    equation f1' = 3 f3 V' - w f2 (valid where V'' != w^2).  V', V'' and
    V''' come from 5-point stencils on the analytic V and V'.  Samples too
    close to a domain edge are excluded and returned as NaN.
    """
    if order not in (3, 4):
        raise ValueError(f"order must be 3 or 4, got {order}")
    w2 = omega * omega

    def residual_at(x: float, h: float) -> Optional[float]:
        if not all(branch.contains(x + k * h) for k in (-2, -1, 0, 1, 2)):
            return None
        V = float(branch.v(x))
        dV = float(branch.dv(x))
        dvs = [float(branch.dv(x + k * h)) for k in (-2, -1, 0, 1, 2)]
        d2V = (dvs[0] - 8.0 * dvs[1] + 8.0 * dvs[3] - dvs[4]) / (12.0 * h)
        d3V = (-dvs[0] + 16.0 * dvs[1] - 30.0 * dvs[2] + 16.0 * dvs[3] - dvs[4]) / (
            12.0 * h * h
        )
        if order == 3:
            terms = [
                0.5 * w2 * w2 * x * x,
                -3.0 * w2 * V,
                -3.0 * w2 * x * dV,
                3.0 * dV * dV,
                -0.5 * w2 * x * x * d2V,
                3.0 * V * d2V,
            ]
            return abs(sum(terms)) / (1.0 + sum(abs(t) for t in terms))
        # order 4: residual of f1' - 3 f3 V' + w f2 with
        # f1 = w N / (V'' - w^2), N = 3 (f2 V' + x V'^2)
        den = d2V - w2
        if abs(den) < 1e-8 * (1.0 + abs(d2V)):
            return None
        f2 = -0.5 * w2 * x * x + 4.0 * V
        f3 = -omega * x
        df2 = -w2 * x + 4.0 * dV
        N = 3.0 * (f2 * dV + x * dV * dV)
        dN = 3.0 * (df2 * dV + f2 * d2V + dV * dV + 2.0 * x * dV * d2V)
        df1 = omega * (dN * den - N * d3V) / (den * den)
        terms = [df1, -3.0 * f3 * dV, omega * f2]
        return abs(sum(terms)) / (1.0 + sum(abs(t) for t in terms))

    out = np.full(len(x_samples), np.nan)
    for i, x in enumerate(x_samples):
        # stencils act on the analytic V'; the wider step for order 4 keeps
        # the third-derivative stencil above the noise of branches whose V'
        # itself comes from a solver
        h = (FD_STEP if order == 3 else 10.0 * FD_STEP) * max(1.0, abs(x))
        coarse = residual_at(x, h)
        fine = residual_at(x, 0.5 * h)
        if coarse is None or fine is None:
            continue
        # near a branch fold no stencil resolves V''': a step-halving
        # disagreement flags the estimate as truncation-dominated and the
        # sample is excluded like a domain-edge sample
        if abs(coarse - fine) > 0.3 * max(coarse, fine) + 1e-7:
            continue
        out[i] = fine
    return out


# ---------------------------------------------------------------------------
# algebraic and chain residuals
# ---------------------------------------------------------------------------


def algebraic_residuals(
    order: int,
    branch: PotentialBranch,
    pair: LadderPair,
    rs: RootSet,
    x_samples: Sequence[float],
) -> dict:
    """Max normalized residual of each defining algebraic relation.

    Order 3 matches the momentum-power coefficients of A_lower A_upper
    against Q(p^2/2 + V); order 4 checks the linear, quadratic and
    magnitude relations of the reduced (V, f0, f1) system plus the f2
    definition.
    """
    inv = rs.invariants()
    w2 = rs.omega * rs.omega
    omega = rs.omega
    low = pair.lowering
    worst: dict = {}

    def note(key, res, scale):
        worst[key] = max(worst.get(key, 0.0), abs(res) / (1.0 + scale))

    for x in x_samples:
        if not branch.contains(x) or abs(x) < 5e-2:
            continue
        V = float(branch.v(x))
        if order == 3:
            f0, f1, f2 = (low.coefficient(k, x) for k in (0, 1, 2))
            d, c = inv.d, inv.c
            note("alg-p4", 2.0 * f1 + f2 * f2 - 6.0 * V,
                 2.0 * abs(f1) + f2 * f2 + 6.0 * abs(V))
            note("alg-p2", f1 * f1 + 2.0 * f2 * f0 - 12.0 * V * V + d,
                 f1 * f1 + 2.0 * abs(f2 * f0) + 12.0 * V * V + abs(d))
            note("alg-p0", f0 * f0 - 8.0 * V**3 + 2.0 * d * V - c / (4.0 * w2),
                 f0 * f0 + 8.0 * abs(V) ** 3 + 2.0 * abs(d * V) + abs(c) / (4.0 * w2))
        else:
            f0, f1, f2, f3 = (low.coefficient(k, x) for k in (0, 1, 2, 3))
            d, c, e = inv.d, inv.c, inv.e
            note("alg-f2", f2 + 0.5 * w2 * x * x - 4.0 * V,
                 abs(f2) + 0.5 * w2 * x * x + 4.0 * abs(V))
            via = _g4_system(omega, d, c, e, x, V, f0, f1)
            scales = _g4_scale(omega, d, c, e, x, V, f0, f1)
            for key, res, scale in zip(
                ("alg-linear", "alg-quadratic", "alg-magnitude"), via, scales
            ):
                note(key, res, scale)
    return worst


def chain_residuals(
    order: int,
    branch: PotentialBranch,
    pair: LadderPair,
    omega: float,
    x_samples: Sequence[float],
) -> dict:
    """Max normalized residuals of the coefficient ODE chain.

    The chain couples successive momentum coefficients of the ladder
    operator through V: each f_i' is fixed by f_{i+1}, V', and the final
    relation f1 V' = omega f0 closes it.  Derivatives of the coefficient
    functions use 5-point stencils.
    """
    low = pair.lowering
    worst: dict = {}

    def note(key, res, scale):
        worst[key] = max(worst.get(key, 0.0), abs(res) / (1.0 + scale))

    for x in x_samples:
        # coefficient functions evaluate to near machine precision, so a
        # step well below the global one avoids fold-adjacent truncation
        h = 0.1 * FD_STEP * max(1.0, abs(x))
        if not all(branch.contains(x + k * h) for k in (-2, -1, 0, 1, 2)):
            continue
        if abs(x) < 5e-2 + 2.0 * h:
            continue
        V = float(branch.v(x))
        dV = float(branch.dv(x))
        fs = [low.coefficient(k, x) for k in range(order)]
        dfs = [
            _fd_derivatives(lambda t, k=k: low.coefficient(k, t), x, h)[0]
            for k in range(order)
        ]
        if order == 3:
            f0, f1, f2 = fs
            note("chain-f2", dfs[2] - omega, abs(dfs[2]) + omega)
            note("chain-f1", dfs[1] - 3.0 * dV + omega * f2,
                 abs(dfs[1]) + 3.0 * abs(dV) + omega * abs(f2))
            note("chain-f0", dfs[0] - 2.0 * f2 * dV - omega * f1,
                 abs(dfs[0]) + 2.0 * abs(f2 * dV) + omega * abs(f1))
            note("chain-closure", f1 * dV - omega * f0,
                 abs(f1 * dV) + omega * abs(f0))
        else:
            f0, f1, f2, f3 = fs
            note("chain-f3", dfs[3] + omega, abs(dfs[3]) + omega)
            note("chain-f2", dfs[2] - 4.0 * dV + omega * omega * x,
                 abs(dfs[2]) + 4.0 * abs(dV) + omega * omega * abs(x))
            note("chain-f1", dfs[1] - 3.0 * f3 * dV + omega * f2,
                 abs(dfs[1]) + 3.0 * abs(f3 * dV) + omega * abs(f2))
            note("chain-f0", dfs[0] - 2.0 * f2 * dV - omega * f1,
                 abs(dfs[0]) + 2.0 * abs(f2 * dV) + omega * abs(f1))
            note("chain-closure", f1 * dV - omega * f0,
                 abs(f1 * dV) + omega * abs(f0))
    return worst


# ---------------------------------------------------------------------------
# bracket and product checks
# ---------------------------------------------------------------------------


def bracket_phase_factor(
    H: Observable,
    A: Observable,
    omega: float,
    states: Sequence[PhaseState],
    tol: float = TOLERANCES["bracket-phase"],
) -> complex:
    """Least-squares sigma in {H, A} = sigma omega A over the given states.

    Raises :class:`NotALadderError` when the fit deviation exceeds ``tol``,
    when |sigma| differs from 1, or when sigma is not +-i to within ``tol``.
    """
    brackets, values = [], []
    for s in states:
        a = A(s)
        if abs(a) < 1e-9:
            continue
        brackets.append(poisson_bracket(H, A, s))
        values.append(omega * a)
    if not values:
        raise NotALadderError("operator vanishes at every probe state")
    b = np.array(brackets)
    v = np.array(values)
    sigma = complex(np.vdot(v, b) / np.vdot(v, v))
    deviations = np.abs(b - sigma * v) / (1.0 + np.abs(v))
    worst = float(deviations.max())
    if worst > tol:
        raise NotALadderError(
            f"bracket phase fit deviates by {worst:.3e} (tol {tol:.1e})",
            deviations=deviations,
        )
    if abs(abs(sigma) - 1.0) > tol or min(abs(sigma - 1j), abs(sigma + 1j)) > tol:
        raise NotALadderError(
            f"fitted phase sigma={sigma} is not a unit +-i", deviations=deviations
        )
    return sigma


def product_identity_check(
    pair: LadderPair,
    polynomials: PhaPolynomials,
    states: Sequence[PhaseState],
) -> float:
    """Max relative error of A_lower A_upper against Q(H) over states."""
    branch = pair.branch
    if branch is None:
        raise ValueError("pair carries no potential branch")
    worst = 0.0
    for s in states:
        E = 0.5 * s.p() ** 2 + float(branch.v(s.x()))
        q = polynomials.q(E)
        prod = pair.product(s)
        worst = max(worst, abs(prod - q) / (1.0 + abs(q)))
    return worst


def bracket_identity_check(
    pair: LadderPair,
    polynomials: PhaPolynomials,
    states: Sequence[PhaseState],
) -> float:
    """Max relative error of {A_lower, A_upper} against P(H) over states."""
    branch = pair.branch
    if branch is None:
        raise ValueError("pair carries no potential branch")
    Al = pair.lowering.observable()
    Au = pair.raising.observable()
    worst = 0.0
    for s in states:
        E = 0.5 * s.p() ** 2 + float(branch.v(s.x()))
        pv = polynomials.p(E)
        br = poisson_bracket(Al, Au, s)
        worst = max(worst, abs(br - pv) / (1.0 + abs(pv)))
    return worst


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------


def verify_family(
    branch: PotentialBranch,
    pair: LadderPair,
    rs: Optional[RootSet],
    n_states: int = 100,
    seed: int = 0,
    tolerances: Optional[dict] = None,
) -> VerificationReport:
    """Run the full residual suite on a (branch, ladder pair) family.

    ``rs`` may be None for the order-1 harmonic pair, in which case the
    ODE/chain/algebraic sections specific to orders 3/4 are skipped.
    """
    tols = dict(TOLERANCES)
    if tolerances:
        tols.update(tolerances)
    omega = pair.omega
    order = pair.order
    rng = np.random.default_rng(seed)
    states = phase_samples(branch, n_states, rng)
    xs = np.array([s.x() for s in states])
    report = VerificationReport(family=branch.provenance)

    if order in (3, 4):
        if rs is None:
            raise ValueError("orders 3 and 4 require a root set")
        res = ode_residual(order, branch, omega, xs)
        kept = res[np.isfinite(res)]
        if kept.size:
            report.add("potential-ode", kept.max(), tols["ode"], kept.size)
        for key, val in algebraic_residuals(order, branch, pair, rs, xs).items():
            report.add(key, val, tols["algebraic"], len(xs))
        for key, val in chain_residuals(order, branch, pair, omega, xs).items():
            report.add(key, val, tols["chain"], len(xs))

    report.add("product", product_identity_check(pair, pair.polynomials, states),
               tols["product"], len(states))
    report.add("bracket", bracket_identity_check(pair, pair.polynomials, states),
               tols["bracket"], len(states))

    H = hamiltonian_observable(branch)
    try:
        sigma = bracket_phase_factor(
            H, pair.lowering.observable(), omega, states, tol=tols["bracket-phase"]
        )
        dev = abs(sigma - 1j)
        report.sigma = sigma
    except NotALadderError as exc:
        dev = math.inf
        if exc.deviations is not None:
            dev = float(np.max(exc.deviations))
    report.add("bracket-phase", dev, tols["bracket-phase"], len(states))
    return report
