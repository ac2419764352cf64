"""Two-dimensional superintegrable compositions of 1D ladder systems.

Two verified axes with frequencies in an m1:m2 resonance (m1 w1 = m2 w2)
combine into H = H1 + H2 with three functionally independent integrals:

    K  = H1 - H2,
    I1 = (A1+)^m1 (A2-)^m2 - (A1-)^m1 (A2+)^m2   (purely imaginary),
    I2 = (A1+)^m1 (A2-)^m2 + (A1-)^m1 (A2+)^m2   (real),

whose brackets close polynomially:  {K, I1} and {K, I2} are proportional
to 2 omega I2 and 2 omega I1 with unit-modulus constants, and {I1, I2}
equals 2 Q1^{m1-1} Q2^{m2-1} (m2^2 Q1 P2 - m1^2 Q2 P1) evaluated at the
axis energies, again up to a unit-modulus constant.  The constants are
fitted from the numerics and recorded, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AlgebraMismatchError, ResonanceError
from .ladder import LadderPair
from .phase import Observable, PhaseState, estimate_gradient, poisson_bracket
from .potentials import PotentialBranch, RootSet


@dataclass(frozen=True)
class AxisSystem:
    """One 1D axis: potential branch, ladder pair, optional root set."""

    branch: PotentialBranch
    pair: LadderPair
    rs: Optional[RootSet] = None

    @property
    def omega(self) -> float:
        return self.pair.omega

    def energy(self, state: PhaseState, axis: int) -> float:
        return 0.5 * state.p(axis) ** 2 + float(self.branch.v(state.x(axis)))


@dataclass(frozen=True)
class IntegralSet:
    """Observables H, K, I1, I2 and the real exports J1, J2."""

    H: Observable
    K: Observable
    I1: Observable
    I2: Observable
    J1: Observable
    J2: Observable
    orders: tuple  # polynomial degree in momenta of I1 and I2

    def named(self) -> dict:
        return {"H": self.H, "K": self.K, "J1": self.J1, "J2": self.J2}


@dataclass(frozen=True)
class Hamiltonian2D:
    """Separable 2D Hamiltonian with resonant axis frequencies."""

    axis1: AxisSystem
    axis2: AxisSystem
    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("resonance integers must be positive")
        if math.gcd(self.m1, self.m2) != 1:
            raise ValueError(
                f"resonance integers must be coprime, got ({self.m1}, {self.m2})"
            )
        w1, w2 = self.axis1.omega, self.axis2.omega
        mismatch = self.m1 * w1 - self.m2 * w2
        if abs(mismatch) >= 1e-12 * max(1.0, abs(self.m1 * w1)):
            raise ResonanceError(
                f"m1 w1 = {self.m1 * w1} and m2 w2 = {self.m2 * w2} are not "
                f"in resonance",
                mismatch=mismatch,
            )

    @property
    def omega(self) -> float:
        """The common frequency m1 w1 = m2 w2."""
        return self.m1 * self.axis1.omega

    # -- scalar evaluators -------------------------------------------------

    def h1(self, s: PhaseState) -> float:
        return self.axis1.energy(s, 0)

    def h2(self, s: PhaseState) -> float:
        return self.axis2.energy(s, 1)

    def h(self, s: PhaseState) -> float:
        return self.h1(s) + self.h2(s)

    def k(self, s: PhaseState) -> float:
        return self.h1(s) - self.h2(s)

    def _halves(self, s: PhaseState):
        """(A1+^m1 A2-^m2, its conjugate) by repeated multiplication."""
        up1 = self.axis1.pair.raising.value(s.x(0), s.p(0))
        lo2 = self.axis2.pair.lowering.value(s.x(1), s.p(1))
        term = up1**self.m1 * lo2**self.m2
        return term, term.conjugate()

    def i1(self, s: PhaseState) -> complex:
        a, b = self._halves(s)
        return a - b

    def i2(self, s: PhaseState) -> complex:
        a, b = self._halves(s)
        return a + b

    def integral_set(self) -> IntegralSet:
        n1 = self.axis1.pair.order
        n2 = self.axis2.pair.order
        deg = n1 * self.m1 + n2 * self.m2
        return IntegralSet(
            H=Observable(2, self.h, name="H"),
            K=Observable(2, self.k, name="K"),
            I1=Observable(2, self.i1, name="I1"),
            I2=Observable(2, self.i2, name="I2"),
            J1=Observable(2, lambda s: self.i1(s).imag, name="J1"),
            J2=Observable(2, lambda s: self.i2(s).real, name="J2"),
            orders=(deg, deg),
        )

    # -- closed-form algebra -----------------------------------------------

    def i1_i2_bracket_closed_form(self, s: PhaseState) -> complex:
        """2 Q1^{m1-1} Q2^{m2-1} (m2^2 Q1 P2 - m1^2 Q2 P1) at the axis energies."""
        e1, e2 = self.h1(s), self.h2(s)
        q1 = complex(self.axis1.pair.polynomials.q(e1))
        q2 = complex(self.axis2.pair.polynomials.q(e2))
        p1 = complex(self.axis1.pair.polynomials.p(e1))
        p2 = complex(self.axis2.pair.polynomials.p(e2))
        return (
            2.0
            * q1 ** (self.m1 - 1)
            * q2 ** (self.m2 - 1)
            * (self.m2**2 * q1 * p2 - self.m1**2 * q2 * p1)
        )


def compose(axis1: AxisSystem, axis2: AxisSystem, m1: int, m2: int) -> Hamiltonian2D:
    """Combine two 1D axes under the resonance m1 w1 = m2 w2."""
    return Hamiltonian2D(axis1, axis2, m1, m2)


def resonance_integers(w1: float, w2: float, max_m: int = 64) -> tuple:
    """Smallest coprime (m1, m2) with m1 w1 = m2 w2, or ResonanceError."""
    from fractions import Fraction

    ratio = Fraction(w2 / w1).limit_denominator(max_m)
    m1, m2 = ratio.numerator, ratio.denominator
    if abs(m1 * w1 - m2 * w2) >= 1e-9 * max(1.0, m1 * w1):
        raise ResonanceError(
            f"frequencies {w1} and {w2} admit no resonance with integers <= {max_m}",
            mismatch=m1 * w1 - m2 * w2,
        )
    return m1, m2


# ---------------------------------------------------------------------------
# numeric checks
# ---------------------------------------------------------------------------

#: Finite-difference step for brackets of the composed integrals.  The
#: high-degree products amplify the ~1e-11 evaluation noise of numerically
#: solved coefficient data, so a step well above the default keeps the
#: noise term (noise / h) below the truncation term.
_BRACKET_STEP = 1e-3


def sample_states_2d(
    h2d: Hamiltonian2D,
    count: int,
    rng: np.random.Generator,
    momentum_range=(-3.0, 3.0),
    span: float = 6.0,
) -> list:
    """Random in-domain 2D phase states."""
    from .verify import domain_samples

    x1 = domain_samples(h2d.axis1.branch, count, rng, span=span)
    x2 = domain_samples(h2d.axis2.branch, count, rng, span=span)
    p1 = rng.uniform(*momentum_range, size=count)
    p2 = rng.uniform(*momentum_range, size=count)
    return [
        PhaseState((a, b), (c, d)) for a, b, c, d in zip(x1, x2, p1, p2)
    ]


def conservation_bracket_check(
    h2d: Hamiltonian2D, states: Sequence[PhaseState]
) -> dict:
    """Max normalized |{H, F}| for F in {K, I1, I2} over the states."""
    ints = h2d.integral_set()
    out = {}
    for key, F in (("K", ints.K), ("I1", ints.I1), ("I2", ints.I2)):
        worst = 0.0
        for s in states:
            br = poisson_bracket(ints.H, F, s, h=_BRACKET_STEP)
            worst = max(worst, abs(br) / (1.0 + abs(F(s))))
        out[key] = worst
    return out


def fit_unit_constant(lhs: np.ndarray, rhs: np.ndarray) -> tuple:
    """Least-squares sigma in lhs = sigma * rhs and the max relative error."""
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    denom = np.vdot(rhs, rhs)
    if abs(denom) == 0:
        raise ValueError("cannot fit a constant against an identically zero side")
    sigma = complex(np.vdot(rhs, lhs) / denom)
    dev = float(np.max(np.abs(lhs - sigma * rhs) / (1.0 + np.abs(rhs))))
    return sigma, dev


@dataclass
class AlgebraReport:
    """Fitted constants and deviations of the polynomial bracket algebra."""

    sigma_k_i1: complex
    sigma_k_i2: complex
    sigma_i1_i2: complex
    deviations: dict = field(default_factory=dict)
    tolerance: float = 1e-5

    @property
    def passed(self) -> bool:
        unit = all(
            abs(abs(sig) - 1.0) < 1e-3
            for sig in (self.sigma_k_i1, self.sigma_k_i2, self.sigma_i1_i2)
        )
        return unit and all(d < self.tolerance for d in self.deviations.values())

    def to_text(self) -> str:
        lines = ["bracket algebra report"]
        for label, sig in (
            ("{K,I1} / (2 omega I2)", self.sigma_k_i1),
            ("{K,I2} / (2 omega I1)", self.sigma_k_i2),
            ("{I1,I2} / closed form", self.sigma_i1_i2),
        ):
            lines.append(f"  {label:24s} sigma = {sig:+.6f}")
        for key, dev in self.deviations.items():
            lines.append(f"  deviation[{key}] = {dev:.3e}")
        lines.append(f"  overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    __str__ = to_text


def algebra_check(
    h2d: Hamiltonian2D,
    states: Sequence[PhaseState],
    tol: float = 1e-5,
) -> AlgebraReport:
    """Verify the closure of {K, I1}, {K, I2} and {I1, I2}.

    Each relation is checked up to a fitted unit-modulus constant; a fit
    deviation above ``tol`` raises :class:`AlgebraMismatchError`.
    """
    ints = h2d.integral_set()
    two_w = 2.0 * h2d.omega
    rows = {"K-I1": ([], []), "K-I2": ([], []), "I1-I2": ([], [])}
    for s in states:
        rows["K-I1"][0].append(poisson_bracket(ints.K, ints.I1, s, h=_BRACKET_STEP))
        rows["K-I1"][1].append(two_w * ints.I2(s))
        rows["K-I2"][0].append(poisson_bracket(ints.K, ints.I2, s, h=_BRACKET_STEP))
        rows["K-I2"][1].append(two_w * ints.I1(s))
        rows["I1-I2"][0].append(poisson_bracket(ints.I1, ints.I2, s, h=_BRACKET_STEP))
        rows["I1-I2"][1].append(h2d.i1_i2_bracket_closed_form(s))
    sigmas = {}
    deviations = {}
    for key, (lhs, rhs) in rows.items():
        sigmas[key], deviations[key] = fit_unit_constant(lhs, rhs)
    report = AlgebraReport(
        sigma_k_i1=sigmas["K-I1"],
        sigma_k_i2=sigmas["K-I2"],
        sigma_i1_i2=sigmas["I1-I2"],
        deviations=deviations,
        tolerance=tol,
    )
    if not report.passed:
        raise AlgebraMismatchError(
            f"bracket algebra closure fails: deviations {deviations}",
            report=report,
        )
    return report


def independence_fraction(
    h2d: Hamiltonian2D, states: Sequence[PhaseState], sv_tol: float = 1e-8
) -> float:
    """Fraction of states where grad(H), grad(K), grad(I1/i) have rank 3."""
    ints = h2d.integral_set()
    obs = (ints.H, ints.K, Observable(2, lambda s: ints.I1(s).imag, name="Im I1"))
    good = 0
    for s in states:
        rows = np.array([estimate_gradient(f, s).real for f in obs])
        # normalize rows: independence is scale-free and the high-degree
        # integral's raw gradient dwarfs those of H and K
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        if np.any(norms == 0):
            continue
        sv = np.linalg.svd(rows / norms, compute_uv=False)
        if sv[2] > sv_tol * sv[0]:
            good += 1
    return good / len(states)
