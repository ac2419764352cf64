"""Ladder-operator pairs for orders 1, 3 and 4 and their product polynomials.

A classical ladder operator of order n is a complex polynomial in the
momentum,

    A(x, p) = sum_k g_k(x) p^k,   g_n = 1,

where the even-power coefficients carry a factor of i and the odd-power
coefficients are real (so for even n the leading momentum coefficient is
+-i and for odd n it is 1).  The pair (A_lower, A_upper) is related by
complex conjugation at real phase points and satisfies

    {H, A_lower} = +i omega A_lower,      A_lower A_upper = Q(H),
    {A_lower, A_upper} = P(H) = -i omega Q'(H),

with Q(E) = kappa_n prod_i (E - eps_i).  Which member of the assembled
conjugate pair is the lowering one is resolved empirically from a numeric
bracket probe rather than assumed from a sign convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    EvaluationFailure,
    InconsistentInputError,
    SignResolutionError,
)
from .phase import Observable, PhaseState, poisson_bracket
from .potentials import (
    PotentialBranch,
    RootSet,
    SymmetricInvariants,
    _f3_eliminant,
    _f3_scale,
    _g4_scale,
    _g4_system,
    order3_f0,
)

#: leading constant of Q(E) per operator order
KAPPA = {1: 2.0, 3: 8.0, 4: 16.0}

#: half-width below which coefficient functions with 1/x terms are computed
#: as a limit along the branch instead of evaluated directly
_ZERO_CUT = 1e-6
_ZERO_STEP = 1e-4

#: normalized residual ceiling for input-consistency and sign checks
_CONSISTENCY_TOL = 1e-6


# ---------------------------------------------------------------------------
# product polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaPolynomials:
    """The polynomials Q (real) and P = -i omega Q' of a ladder pair."""

    order: int
    omega: float
    q_coeffs: tuple  # real, highest degree first

    def __post_init__(self):
        object.__setattr__(self, "q_coeffs", tuple(float(c) for c in self.q_coeffs))

    @property
    def kappa(self) -> float:
        return KAPPA[self.order]

    def q(self, energy):
        return np.polyval(np.asarray(self.q_coeffs), energy)

    @property
    def p_coeffs(self) -> tuple:
        dq = np.polyder(np.asarray(self.q_coeffs))
        return tuple(-1j * self.omega * dq)

    def p(self, energy):
        return np.polyval(np.asarray(self.p_coeffs), energy)


def pha_polynomials(rs: Optional[RootSet] = None, omega: Optional[float] = None) -> PhaPolynomials:
    """Q(E) = kappa_n prod (E - eps_i) and P = -i omega Q'.

    Pass a :class:`RootSet` for orders 3/4, or ``omega`` alone for the
    order-1 harmonic pair (Q(E) = 2E).
    """
    if rs is None:
        if omega is None:
            raise ValueError("omega is required for the order-1 polynomials")
        return PhaPolynomials(1, omega, (2.0, 0.0))
    coeffs = KAPPA[rs.order] * np.poly(rs.roots)
    return PhaPolynomials(rs.order, rs.omega, tuple(coeffs))


# ---------------------------------------------------------------------------
# ladder operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LadderOperator:
    """One member of a conjugate ladder pair.

    ``fs`` holds the coefficient functions (f_0, ..., f_{n-1}); the leading
    coefficient g_n = 1 is implicit.  ``conj`` selects the conjugate
    assembly (i -> -i on even momentum powers); ``is_lowering`` records the
    empirical bracket label.
    """

    order: int
    omega: float
    fs: tuple
    is_lowering: bool
    conj: bool = False
    name: str = field(default="", compare=False)

    def coefficient(self, k: int, x: float) -> float:
        if k == self.order:
            return 1.0
        return float(self.fs[k](x))

    def value(self, x: float, p: float) -> complex:
        unit = -1j if self.conj else 1j
        total = 0.0 + 0.0j
        for k in range(self.order + 1):
            term = self.coefficient(k, x) * p**k
            total += term * unit if k % 2 == 0 else term
        return total

    def __call__(self, state: PhaseState, axis: int = 0) -> complex:
        return self.value(state.x(axis), state.p(axis))

    def conjugate(self) -> "LadderOperator":
        return replace(
            self,
            conj=not self.conj,
            is_lowering=not self.is_lowering,
            name=self.name + "*" if self.name else "",
        )

    def observable(self, dim: int = 1, axis: int = 0) -> Observable:
        return Observable(
            dim,
            lambda s: self.value(s.x(axis), s.p(axis)),
            name=self.name or ("A-" if self.is_lowering else "A+"),
        )


@dataclass(frozen=True)
class LadderPair:
    """A lowering/raising pair with its product polynomials."""

    lowering: LadderOperator
    raising: LadderOperator
    polynomials: PhaPolynomials
    branch: Optional[PotentialBranch] = None

    @property
    def order(self) -> int:
        return self.lowering.order

    @property
    def omega(self) -> float:
        return self.lowering.omega

    def product(self, state: PhaseState, axis: int = 0) -> complex:
        return self.lowering(state, axis) * self.raising(state, axis)


def hamiltonian_observable(
    branch: PotentialBranch, dim: int = 1, axis: int = 0
) -> Observable:
    """H = p^2 / 2 + V(x) on the given axis (unit mass)."""

    def fn(s: PhaseState) -> float:
        return 0.5 * s.p(axis) ** 2 + float(branch.v(s.x(axis)))

    return Observable(dim, fn, name="H")


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------


def _sample_xs(branch: PotentialBranch, count: int = 9, span: float = 8.0):
    """Interior sample abscissae, clipped to |x| <= span, away from x = 0.

    The span widens automatically for branches whose domain lies entirely
    outside the requested window (e.g. a radicand gap around the origin).
    """
    for widened in (span, 8.0 * span, 64.0 * span):
        xs = []
        for lo, hi in branch.domain:
            a, b = max(lo, -widened), min(hi, widened)
            if not b > a:
                continue
            pad = 0.05 * (b - a)
            for x in np.linspace(a + pad, b - pad, count):
                if abs(x) > 1e-2:
                    xs.append(float(x))
        if xs:
            return xs
    raise DomainError(
        f"no usable sample points in domain {branch.domain} of {branch.provenance}"
    )


def _limit_at_zero(g: Callable[[float], float], branch: PotentialBranch) -> float:
    """Limit of g at x = 0 along the branch via one-step Richardson.

    Raises :class:`DomainError` when the two-sided extrapolations disagree,
    i.e. the singularity is not removable.
    """
    vals = []
    for sgn in (1.0, -1.0):
        d1, d2 = sgn * _ZERO_STEP, 2.0 * sgn * _ZERO_STEP
        if branch.contains(d1) and branch.contains(d2):
            vals.append(2.0 * g(d1) - g(d2))
    if not vals:
        raise DomainError(f"cannot take the x=0 limit on {branch.provenance}")
    if len(vals) == 2 and abs(vals[0] - vals[1]) > 1e-4 * (
        1.0 + max(abs(v) for v in vals)
    ):
        raise DomainError(
            f"coefficient singular at x=0 on {branch.provenance}: "
            f"one-sided limits {vals[0]:.6g} / {vals[1]:.6g}"
        )
    return sum(vals) / len(vals)


def _guard_zero(g: Callable[[float], float], branch: PotentialBranch):
    def wrapped(x: float) -> float:
        if abs(x) >= _ZERO_CUT:
            return g(x)
        return _limit_at_zero(g, branch)

    return wrapped


def _resolve_orientation(base: LadderOperator, branch: PotentialBranch) -> LadderOperator:
    """Return the lowering member of {base, conj(base)} by a bracket probe.

    The lowering member is the one with {H, A} = +i omega A; sigma is
    measured numerically at a few interior states.
    """
    H = hamiltonian_observable(branch)
    votes = []
    for x in _sample_xs(branch, count=5, span=4.0):
        for p in (0.7, -1.3):
            a_val = base.value(x, p)
            if abs(a_val) < 1e-6:
                continue
            state = PhaseState((x,), (p,))
            try:
                br = poisson_bracket(H, base.observable(), state)
            except (DomainError, EvaluationFailure):
                continue
            sigma = br / (base.omega * a_val)
            if abs(abs(sigma) - 1.0) < 1e-3 and abs(abs(sigma.imag) - 1.0) < 1e-3:
                votes.append(sigma.imag > 0)
            if len(votes) >= 3:
                break
        if len(votes) >= 3:
            break
    if not votes:
        raise EvaluationFailure(
            "could not measure the bracket phase of the assembled operator",
            component="orientation probe",
        )
    lowering_is_base = sum(votes) * 2 > len(votes)
    low = base if lowering_is_base else base.conjugate()
    return replace(low, is_lowering=True, name="A-")


def _make_pair(base: LadderOperator, branch, polynomials) -> LadderPair:
    lowering = _resolve_orientation(base, branch)
    raising = replace(lowering.conjugate(), name="A+")
    return LadderPair(lowering, raising, polynomials, branch)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_ladder1(omega: float) -> LadderPair:
    """Harmonic pair a_lower = p - i omega x, Q(E) = 2E."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    w2 = omega * omega
    branch = PotentialBranch(
        v_fn=lambda x: 0.5 * w2 * np.asarray(x) ** 2,
        dv_fn=lambda x: w2 * np.asarray(x),
        domain=((-math.inf, math.inf),),
        provenance="harmonic",
        params={"omega": omega},
    )
    base = LadderOperator(1, omega, (lambda x: -omega * x,), is_lowering=True)
    return _make_pair(base, branch, pha_polynomials(omega=omega))


def build_ladder3(
    branch: PotentialBranch, omega: float, inv: SymmetricInvariants
) -> LadderPair:
    """Order-3 pair from a potential branch and its (d, c) invariants.

    Coefficients: f2 = omega x, f1 = -omega^2 x^2 / 2 + 3V and
    f0 = 3V^2/(2 omega x) + (3/2) omega x V - omega^3 x^3 / 8 - d/(2 omega x).
    The branch is validated against the defining quartic relation in V
    before assembly.
    """
    d, c = inv.d, inv.c
    if c is None:
        raise ValueError("order-3 invariants require both d and c")
    xs = _sample_xs(branch)
    worst = 0.0
    for x in xs:
        V = float(branch.v(x))
        res = abs(_f3_eliminant(omega, d, c, V, x)) / _f3_scale(omega, d, c, V, x)
        worst = max(worst, res)
    if worst > _CONSISTENCY_TOL:
        raise InconsistentInputError(
            f"branch {branch.provenance} does not satisfy the order-3 defining "
            f"relation for d={d}, c={c}: normalized residual {worst:.3e}"
        )

    w2 = omega * omega

    @lru_cache(maxsize=65536)
    def vx(x: float) -> float:
        return float(branch.v(x))

    def f2(x: float) -> float:
        return omega * x

    def f1(x: float) -> float:
        return -0.5 * w2 * x * x + 3.0 * vx(x)

    def f0_raw(x: float) -> float:
        return order3_f0(omega, d, vx(x), x)

    base = LadderOperator(
        3, omega, (_guard_zero(f0_raw, branch), f1, f2), is_lowering=True
    )
    d_roots = np.roots([1.0, 0.0, -d / 4.0, c / (32.0 * w2)])
    rs = None
    if np.all(np.abs(d_roots.imag) < 1e-9 * (1.0 + np.abs(d_roots))):
        rs = RootSet(3, tuple(d_roots.real), omega)
    poly = (
        pha_polynomials(rs)
        if rs is not None
        else PhaPolynomials(3, omega, tuple(8.0 * np.array([1.0, 0.0, -d / 4.0, c / (32.0 * w2)])))
    )
    return _make_pair(base, branch, poly)


def _order4_data(branch: PotentialBranch, omega: float, inv: SymmetricInvariants):
    """x -> (V, f0, f1) for an order-4 branch.

    Prefers the branch's own ladder data; otherwise reconstructs the signed
    f0 from the coefficient chain f0 = V' B0 / (8 (omega^2 x - V')) and f1
    from the linear defining relation.
    """
    if branch.ladder_data is not None:
        return branch.ladder_data
    d = inv.d
    w2 = omega * omega

    def data(x: float):
        V = float(branch.v(x))
        dV = float(branch.dv(x))
        B0 = 16.0 * d + w2 * w2 * x**4 - 16.0 * w2 * x * x * V - 32.0 * V * V
        den = 8.0 * (w2 * x - dV)
        if abs(den) <= 1e-9 * (1.0 + abs(w2 * x) + abs(dV)):
            raise EvaluationFailure(
                f"f0 reconstruction degenerate at x={x} (V'' ~ omega^2)",
                component="f0",
            )
        f0 = dV * B0 / den
        f1 = (B0 + 8.0 * f0) / (8.0 * omega * x)
        return V, f0, f1

    return data


def _order4_chain_residual(data, omega: float, xs) -> float:
    """Worst normalized residual of the two sign-sensitive coefficient ODEs.

    Checks f0' = 2 f2 V' + omega f1 and f1 V' = omega f0 with central
    finite differences; both flip under f0 -> -f0.
    """
    w2 = omega * omega
    worst = 0.0
    for x in xs:
        # branch data is Newton-polished to near machine precision, so a
        # tiny step keeps the truncation error small near branch folds
        # without hitting a noise floor
        h = 1e-6 * max(1.0, abs(x))
        V, f0, f1 = data(x)
        Vm, f0m, _ = data(x - h)
        Vp, f0p, _ = data(x + h)
        dV = (Vp - Vm) / (2.0 * h)
        df0 = (f0p - f0m) / (2.0 * h)
        f2 = -0.5 * w2 * x * x + 4.0 * V
        r1 = df0 - 2.0 * f2 * dV - omega * f1
        r2 = f1 * dV - omega * f0
        s1 = 1.0 + abs(df0) + abs(2.0 * f2 * dV) + abs(omega * f1)
        s2 = 1.0 + abs(f1 * dV) + abs(omega * f0)
        worst = max(worst, abs(r1) / s1, abs(r2) / s2)
    return worst


def build_ladder4(branch: PotentialBranch, omega: float, rs: RootSet) -> LadderPair:
    """Order-4 pair from a potential branch and its root set.

    f3 = -omega x, f2 = -omega^2 x^2 / 2 + 4V, f1 and the signed f0 come
    from the defining algebraic system; the f0 sign branch is validated
    against the coefficient ODEs and flipped globally if the opposite sign
    is the consistent one.
    """
    if rs.order != 4:
        raise ValueError(f"expected an order-4 root set, got order {rs.order}")
    inv = rs.invariants()
    d, c, e = inv.d, inv.c, inv.e
    data = _order4_data(branch, omega, inv)
    xs = _sample_xs(branch)

    worst = 0.0
    for x in xs:
        V, f0, f1 = data(x)
        res = np.abs(_g4_system(omega, d, c, e, x, V, f0, f1))
        res /= _g4_scale(omega, d, c, e, x, V, f0, f1)
        worst = max(worst, float(res.max()))
    if worst > _CONSISTENCY_TOL:
        raise InconsistentInputError(
            f"branch {branch.provenance} does not satisfy the order-4 defining "
            f"system for roots {rs.roots}: normalized residual {worst:.3e}"
        )

    def flipped(x: float):
        V, f0, _ = data(x)
        B0 = (
            16.0 * d
            + (omega * x) ** 4 * 1.0
            - 16.0 * omega * omega * x * x * V
            - 32.0 * V * V
        )
        f0 = -f0
        return V, f0, (B0 + 8.0 * f0) / (8.0 * omega * x)

    res_as_is = _order4_chain_residual(data, omega, xs)
    if res_as_is <= _CONSISTENCY_TOL:
        chosen = data
    else:
        res_flipped = _order4_chain_residual(flipped, omega, xs)
        if res_flipped <= _CONSISTENCY_TOL:
            chosen = flipped
        else:
            raise SignResolutionError(
                f"neither f0 sign satisfies the coefficient ODEs on "
                f"{branch.provenance} (residuals {res_as_is:.3e} / {res_flipped:.3e})",
                residuals=(res_as_is, res_flipped),
            )

    # branch evaluation may run a Newton solve per point; memoize so the
    # coefficient functions and bracket stencils share one solve per x
    chosen = lru_cache(maxsize=65536)(chosen)

    w2 = omega * omega

    def f3(x: float) -> float:
        return -omega * x

    def f2(x: float) -> float:
        return -0.5 * w2 * x * x + 4.0 * chosen(x)[0]

    def f1_raw(x: float) -> float:
        return chosen(x)[2]

    def f0_raw(x: float) -> float:
        return chosen(x)[1]

    base = LadderOperator(
        4,
        omega,
        (_guard_zero(f0_raw, branch), _guard_zero(f1_raw, branch), f2, f3),
        is_lowering=True,
    )
    return _make_pair(base, branch, pha_polynomials(rs))
