"""Construction of the 1D potential branches V(x).

Closed-form families (double- and triple-root special cases, the known
x**2 + sqrt deformation) plus general branches obtained by solving the
order-3 quartic eliminant and the order-4 symmetric algebraic system with
continuation in x.

Conventions used throughout:

* order 3: the defining pair of equations in (f0, V) is

      omega^4 x^4 / 4 + d + 2 omega x f0 - 3 omega^2 x^2 V - 3 V^2 = 0
      -c / (4 omega^2) + f0^2 + 2 d V - 8 V^3 = 0

  with d = 4 (eps1^2 + eps1 eps2 + eps2^2) and
  c = 32 omega^2 (eps1^2 eps2 + eps1 eps2^2).  Eliminating f0 yields the
  quartic whose coefficients :func:`quartic_coefficients` returns.

* order 4: the defining system in (f0, f1, V), after f3 = -omega x and
  f2 = -omega^2 x^2 / 2 + 4 V, is

      G1 = 8 omega x f1 - B0 - 8 f0 = 0,
           B0 = 16 d + omega^4 x^4 - 16 omega^2 x^2 V - 32 V^2
      G2 = f1^2 + 2 f0 f2 - 8 c + 16 d V - 32 V^3 = 0
      G3 = f0^2 - 16 (V^4 - d V^2 + c V - e) = 0

  with (d, c, e) = (-e2, -e3, -e4) in elementary symmetric polynomials of
  the roots.  Note f0^2 = Q(V): the ladder product polynomial evaluated at
  the potential itself.

Square-root families are assembled with the smooth combination
``x * sqrt(r + x^2)`` rather than ``sqrt(x^2 (r + x^2))`` so a single sign
choice is differentiable across x = 0; for x > 0 the two notations agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    ContinuationFailure,
    DegenerateDegreeError,
    DomainError,
)

_COLLISION_TOL = 1e-7
_NODE_RESIDUAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# root sets and symmetric invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootSet:
    """Zero-mode energies eps_1..eps_n of the ladder product polynomial."""

    order: int
    roots: tuple
    omega: float

    def __post_init__(self):
        if self.order not in (3, 4):
            raise ValueError(f"order must be 3 or 4, got {self.order}")
        roots = tuple(sorted(float(r) for r in self.roots))
        object.__setattr__(self, "roots", roots)
        if len(roots) != self.order:
            raise ValueError(f"expected {self.order} roots, got {len(roots)}")
        scale = max(1.0, max(abs(r) for r in roots))
        if abs(sum(roots)) > 1e-12 * scale:
            raise ValueError(f"roots must sum to zero, got sum {sum(roots)}")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def e2(self) -> float:
        r = self.roots
        return sum(r[i] * r[j] for i in range(len(r)) for j in range(i + 1, len(r)))

    @property
    def e3(self) -> float:
        r = self.roots
        n = len(r)
        return sum(
            r[i] * r[j] * r[k]
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(j + 1, n)
        )

    @property
    def e4(self) -> float:
        if self.order != 4:
            raise ValueError("e4 only defined for order 4")
        return math.prod(self.roots)

    def invariants(self) -> "SymmetricInvariants":
        if self.order == 3:
            # d = -4 e2, c = -32 omega^2 e3 for traceless root triples
            return SymmetricInvariants(d=-4.0 * self.e2, c=-32.0 * self.omega**2 * self.e3)
        return SymmetricInvariants(d=-self.e2, c=-self.e3, e=-self.e4)


@dataclass(frozen=True)
class SymmetricInvariants:
    """The (d, c[, e]) parameters of the reduced algebraic systems."""

    d: float
    c: float
    e: Optional[float] = None


def triple_root_set(eps2: float, omega: float) -> RootSet:
    """Order-4 root set (eps2, eps2, eps2, -3 eps2)."""
    return RootSet(4, (eps2, eps2, eps2, -3.0 * eps2), omega)


def double_root_set(eps2: float, omega: float) -> RootSet:
    """Order-3 root set (eps2, eps2, -2 eps2)."""
    return RootSet(3, (eps2, eps2, -2.0 * eps2), omega)


# ---------------------------------------------------------------------------
# potential branches
# ---------------------------------------------------------------------------


@dataclass
class PotentialBranch:
    """An evaluable V(x), V'(x) on explicit open domain intervals."""

    v_fn: Callable[[np.ndarray], np.ndarray]
    dv_fn: Callable[[np.ndarray], np.ndarray]
    domain: tuple
    provenance: str
    params: dict = field(default_factory=dict)
    #: optional x -> (V, f0, f1) used by the order-4 ladder builder
    ladder_data: Optional[Callable[[float], tuple]] = None

    def contains(self, x: float, margin: float = 0.0) -> bool:
        return any(lo + margin < x < hi - margin for lo, hi in self.domain)

    def _check(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        for xi in xs:
            if not self.contains(xi):
                raise DomainError(
                    f"x={xi} outside domain {self.domain} of {self.provenance}"
                )

    def v(self, x):
        self._check(x)
        return self.v_fn(np.asarray(x, dtype=float))

    def dv(self, x):
        self._check(x)
        return self.dv_fn(np.asarray(x, dtype=float))

    __call__ = v

    def sample(self, xs: Sequence[float], margin: float = 0.0):
        """Restrict xs to the domain and evaluate (x, V, dV) arrays."""
        xs = np.asarray(xs, dtype=float)
        keep = np.array([self.contains(x, margin) for x in xs])
        xs = xs[keep]
        return xs, self.v_fn(xs), self.dv_fn(xs)

    def write_csv(self, path, xs: Sequence[float]):
        xs, V, dV = self.sample(xs)
        with open(path, "w") as fh:
            fh.write("x,V,dV\n")
            for row in zip(xs, np.atleast_1d(V), np.atleast_1d(dV)):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return path


def _interval_for_radicand(r0: float) -> tuple:
    """Open intervals where r0 + x^2 >= 0 (endpoints at radicand zeros)."""
    if r0 >= 0:
        return ((-math.inf, math.inf),)
    x0 = math.sqrt(-r0)
    return ((-math.inf, -x0), (x0, math.inf))


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------


def closed_form_v3(omega: float, eps2: float, variant: str, sign: int = 1) -> PotentialBranch:
    """Double-root order-3 families.

    ``harmonic``: V = -2 eps2 + omega^2 x^2 / 2.
    ``deformed``: V = 2 eps2 + 5 omega^2 x^2 / 18
                      + sign * (2/9) omega x sqrt(18 eps2 + omega^2 x^2),
    which for x > 0 matches the +-sqrt(18 eps2 omega^2 x^2 + omega^4 x^4)
    notation and is smooth through x = 0 when eps2 > 0.
    """
    w2 = omega * omega
    if variant == "harmonic":
        return PotentialBranch(
            v_fn=lambda x: -2.0 * eps2 + 0.5 * w2 * x * x,
            dv_fn=lambda x: w2 * x,
            domain=((-math.inf, math.inf),),
            provenance="closed-form-v3-harmonic",
            params={"omega": omega, "eps2": eps2},
        )
    if variant != "deformed":
        raise ValueError(f"unknown order-3 variant {variant!r}")
    s = float(sign)
    r0 = 18.0 * eps2 / w2  # radicand = w2 * (r0 + x^2)

    def v_fn(x):
        root = np.sqrt(w2 * (r0 + x * x))
        return 2.0 * eps2 + 5.0 * w2 * x * x / 18.0 + s * (2.0 / 9.0) * omega * x * root

    def dv_fn(x):
        root = np.sqrt(w2 * (r0 + x * x))
        with np.errstate(divide="ignore", invalid="ignore"):
            droot = np.where(root > 0, w2 * x / root, np.inf)
        return 5.0 * w2 * x / 9.0 + s * (2.0 / 9.0) * omega * (root + x * droot)

    return PotentialBranch(
        v_fn=v_fn,
        dv_fn=dv_fn,
        domain=_interval_for_radicand(r0),
        provenance=f"closed-form-v3-deformed[{'+' if s > 0 else '-'}]",
        params={"omega": omega, "eps2": eps2, "sign": int(s)},
    )


def _order4_ladder_data(omega: float, d: float, c: float, e: float):
    """Return x -> (V, f0, f1) for an order-4 branch with analytic V, dV.

    f0 follows from the coefficient chain -omega f0 + f1 V' = 0 combined
    with G1, which gives the signed value f0 = V' B0 / (8 (omega^2 x - V'));
    f1 then comes from G1 directly.
    """

    def make(v_fn, dv_fn):
        def data(x: float):
            V = float(v_fn(np.asarray(x)))
            dV = float(dv_fn(np.asarray(x)))
            w2 = omega * omega
            B0 = 16.0 * d + w2 * w2 * x**4 - 16.0 * w2 * x * x * V - 32.0 * V * V
            den = 8.0 * (w2 * x - dV)
            if abs(den) > 1e-9 * max(1.0, abs(w2 * x) + abs(dV)):
                f0 = dV * B0 / den
            else:
                # fall back to the magnitude relation with the sign of a
                # nearby regular point
                g = 16.0 * (V**4 - d * V * V + c * V - e)
                mag = math.sqrt(max(g, 0.0))
                near = data(x + 1e-4 * max(1.0, abs(x)))
                f0 = math.copysign(mag, near[1]) if near[1] != 0 else mag
            f1 = (B0 + 8.0 * f0) / (8.0 * omega * x)
            return V, f0, f1

        return data

    return make


def closed_form_v4(omega: float, eps2: float, variant: str, sign: int = 1) -> PotentialBranch:
    """Triple-root order-4 families.

    ``rational``: V = -eps2 + omega^2 x^2 / 8 + 8 eps2^2 / (omega^2 x^2).
    ``deformed``: V = (96 eps2 + 5 omega^2 x^2
                       + 3 sign omega x sqrt(64 eps2 + omega^2 x^2)) / 64,
    smooth through x = 0 when eps2 > 0 (for x > 0 the sign matches the
    -+3 sqrt(64 eps2 omega^2 x^2 + omega^4 x^4) notation with the lower
    printed branch corresponding to sign = -1).
    """
    w2 = omega * omega
    rs = triple_root_set(eps2, omega)
    inv = rs.invariants()
    attach = _order4_ladder_data(omega, inv.d, inv.c, inv.e)

    if variant == "rational":
        def v_fn(x):
            return -eps2 + w2 * x * x / 8.0 + 8.0 * eps2 * eps2 / (w2 * x * x)

        def dv_fn(x):
            return w2 * x / 4.0 - 16.0 * eps2 * eps2 / (w2 * x**3)

        branch = PotentialBranch(
            v_fn=v_fn,
            dv_fn=dv_fn,
            domain=((-math.inf, 0.0), (0.0, math.inf)),
            provenance="closed-form-v4-rational",
            params={"omega": omega, "eps2": eps2},
        )
        branch.ladder_data = attach(v_fn, dv_fn)
        return branch

    if variant != "deformed":
        raise ValueError(f"unknown order-4 variant {variant!r}")
    s = float(sign)
    r0 = 64.0 * eps2 / w2

    def v_fn(x):
        root = np.sqrt(w2 * (r0 + x * x))
        return (96.0 * eps2 + 5.0 * w2 * x * x + 3.0 * s * omega * x * root) / 64.0

    def dv_fn(x):
        root = np.sqrt(w2 * (r0 + x * x))
        with np.errstate(divide="ignore", invalid="ignore"):
            droot = np.where(root > 0, w2 * x / root, np.inf)
        return (10.0 * w2 * x + 3.0 * s * omega * (root + x * droot)) / 64.0

    branch = PotentialBranch(
        v_fn=v_fn,
        dv_fn=dv_fn,
        domain=_interval_for_radicand(r0),
        provenance=f"closed-form-v4-deformed[{'+' if s > 0 else '-'}]",
        params={"omega": omega, "eps2": eps2, "sign": int(s)},
    )
    branch.ladder_data = attach(v_fn, dv_fn)
    return branch


def gravel_potential(omega: float, b: float, sign: int = 1) -> PotentialBranch:
    """The known third-order-ladder system V = w^2/18 (2b + 5x^2 + s 4x sqrt(b+x^2))."""
    w2 = omega * omega
    s = float(sign)

    def v_fn(x):
        return w2 / 18.0 * (2.0 * b + 5.0 * x * x + 4.0 * s * x * np.sqrt(b + x * x))

    def dv_fn(x):
        root = np.sqrt(b + x * x)
        with np.errstate(divide="ignore", invalid="ignore"):
            droot = np.where(root > 0, x / root, np.inf)
        return w2 / 18.0 * (10.0 * x + 4.0 * s * (root + x * droot))

    return PotentialBranch(
        v_fn=v_fn,
        dv_fn=dv_fn,
        domain=_interval_for_radicand(b),
        provenance=f"gravel[{'+' if s > 0 else '-'}]",
        params={"omega": omega, "b": b, "sign": int(s)},
    )


# ---------------------------------------------------------------------------
# polynomial machinery
# ---------------------------------------------------------------------------


def quartic_coefficients(omega: float, inv: SymmetricInvariants, x: float) -> np.ndarray:
    """Coefficients (highest degree first) of the order-3 eliminant in V.

    9 V^4 - 14 w^2 x^2 V^3 + (15/2 w^4 x^4 - 6d) V^2
      + (2 d w^2 x^2 - 3/2 w^6 x^6) V
      + (d^2 + d w^4 x^4 / 2 + w^8 x^8 / 16 - c x^2) = 0
    """
    d, c = inv.d, inv.c
    w2x2 = (omega * x) ** 2
    return np.array(
        [
            9.0,
            -14.0 * w2x2,
            7.5 * w2x2**2 - 6.0 * d,
            2.0 * d * w2x2 - 1.5 * w2x2**3,
            d * d + 0.5 * d * w2x2**2 + w2x2**4 / 16.0 - c * x * x,
        ]
    )


def _polish_root(coeffs: np.ndarray, z: complex, steps: int = 2) -> complex:
    dcoeffs = np.polyder(coeffs)
    for _ in range(steps):
        p = np.polyval(coeffs, z)
        dp = np.polyval(dcoeffs, z)
        if dp == 0:
            break
        z = z - p / dp
    return z


def _poly_scale(coeffs, r):
    n = len(coeffs) - 1
    return sum(abs(ck) * abs(r) ** (n - k) for k, ck in enumerate(coeffs)) + 1e-300


def _multiple_real_roots(coeffs):
    """Real roots of multiplicity >= 2, as (root, multiplicity) pairs.

    An m-fold root of p is a simple root of p^(m-1), so multiple roots are
    recovered from the derivative chain instead of by clustering the output
    of the companion-matrix solver, which loses half the working precision
    per extra multiplicity.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(coeffs) - 1
    if n < 2:
        return []
    derivs = [coeffs]
    for _ in range(n - 1):
        derivs.append(np.polyder(derivs[-1]))
    out = []
    for z in np.roots(derivs[1]):
        if abs(z.imag) > 1e-6 * (1.0 + abs(z)):
            continue
        r = float(np.real(_polish_root(derivs[1], complex(z.real), steps=10)))
        if abs(np.polyval(coeffs, r)) > 3e-13 * _poly_scale(coeffs, r):
            continue
        m = 2
        while m < n and abs(np.polyval(derivs[m], r)) <= 1e-7 * _poly_scale(derivs[m], r):
            cand = float(np.real(_polish_root(derivs[m], complex(r), steps=10)))
            if abs(np.polyval(coeffs, cand)) <= 3e-13 * _poly_scale(coeffs, cand) and all(
                abs(np.polyval(derivs[j], cand)) <= 1e-9 * _poly_scale(derivs[j], cand)
                for j in range(1, m)
            ):
                r, m = cand, m + 1
            else:
                break
        if not any(abs(r - r0) <= 1e-8 * (1.0 + abs(r)) for r0, _ in out):
            out.append((r, m))
    return out


def _deflate(coeffs, root, multiplicity):
    for _ in range(multiplicity):
        coeffs, _rem = np.polydiv(coeffs, np.array([1.0, -root]))
    return coeffs


def _real_poly_roots(coeffs):
    """Real roots of a real polynomial as [(root, multiplicity), ...] ascending.

    Multiple roots come from the derivative chain (see
    :func:`_multiple_real_roots`); the remaining simple roots from the
    deflated polynomial, each with a Newton polish.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if len(coeffs) < 2:
        return []
    found = _multiple_real_roots(coeffs)
    work = coeffs
    for r, m in found:
        work = _deflate(work, r, m)
    if len(work) > 1:
        for z in np.roots(work):
            if abs(z.imag) > 1e-6 * (1.0 + abs(z)):
                continue
            r = float(np.real(_polish_root(coeffs, complex(z.real), steps=6)))
            if abs(np.polyval(coeffs, r)) > 1e-9 * _poly_scale(coeffs, r):
                continue
            if not any(abs(r - r0) <= 1e-8 * (1.0 + abs(r)) for r0, _ in found):
                found.append((r, 1))
    return sorted((float(r), int(m)) for r, m in found)


def solve_quartic_real(coeffs: Sequence[float]):
    """All real roots of a quartic, as [(root, multiplicity), ...] ascending."""
    coeffs = np.asarray(coeffs, dtype=float)
    if len(coeffs) != 5:
        raise ValueError("expected 5 coefficients, highest degree first")
    scale = np.max(np.abs(coeffs))
    if coeffs[0] == 0 or (scale > 0 and abs(coeffs[0]) < 1e-14 * scale):
        raise DegenerateDegreeError("leading quartic coefficient is zero")
    return _real_poly_roots(coeffs)


# ---------------------------------------------------------------------------
# order-3 defining relation and implicit derivative
# ---------------------------------------------------------------------------


def _f3_eliminant(omega, d, c, V, x):
    w2x2 = (omega * x) ** 2
    return (
        9.0 * V**4
        - 14.0 * w2x2 * V**3
        + (7.5 * w2x2**2 - 6.0 * d) * V**2
        + (2.0 * d * w2x2 - 1.5 * w2x2**3) * V
        + d * d
        + 0.5 * d * w2x2**2
        + w2x2**4 / 16.0
        - c * x * x
    )


def _f3_dV(omega, d, c, V, x):
    w2x2 = (omega * x) ** 2
    return (
        36.0 * V**3
        - 42.0 * w2x2 * V**2
        + (15.0 * w2x2**2 - 12.0 * d) * V
        + 2.0 * d * w2x2
        - 1.5 * w2x2**3
    )


def _f3_dVV(omega, d, c, V, x):
    w2x2 = (omega * x) ** 2
    return 108.0 * V**2 - 84.0 * w2x2 * V + 15.0 * w2x2**2 - 12.0 * d


def _f3_dVx(omega, d, c, V, x):
    w2 = omega * omega
    return (
        -84.0 * w2 * x * V**2
        + 60.0 * w2**2 * x**3 * V
        + 4.0 * d * w2 * x
        - 9.0 * w2**3 * x**5
    )


def _f3_dV_scale(omega, d, c, V, x):
    """Magnitude of dF/dV's individual terms, for degeneracy checks."""
    w2x2 = (omega * x) ** 2
    a = abs(V)
    return (
        36.0 * a**3
        + 42.0 * w2x2 * a * a
        + (15.0 * w2x2**2 + 12.0 * abs(d)) * a
        + 2.0 * abs(d) * w2x2
        + 1.5 * w2x2**3
        + 1.0
    )


def _f3_dx(omega, d, c, V, x):
    w2 = omega * omega
    return (
        -28.0 * w2 * x * V**3
        + 30.0 * w2**2 * x**3 * V**2
        + (4.0 * d * w2 * x - 9.0 * w2**3 * x**5) * V
        + 2.0 * d * w2**2 * x**3
        + 0.5 * w2**4 * x**7
        - 2.0 * c * x
    )


def _f3_dxx(omega, d, c, V, x):
    w2 = omega * omega
    return (
        -28.0 * w2 * V**3
        + 90.0 * w2**2 * x * x * V**2
        + (4.0 * d * w2 - 45.0 * w2**3 * x**4) * V
        + 6.0 * d * w2**2 * x * x
        + 3.5 * w2**4 * x**6
        - 2.0 * c
    )


def order3_f0(omega: float, d: float, V: float, x: float) -> float:
    """f0 = (3 V^2 + 3 w^2 x^2 V - w^4 x^4 / 4 - d) / (2 w x)."""
    w2x2 = (omega * x) ** 2
    return (3.0 * V * V + 3.0 * w2x2 * V - 0.25 * w2x2 * w2x2 - d) / (2.0 * omega * x)


def _f3_scale(omega, d, c, V, x):
    """Magnitude of the eliminant's individual terms, for residual checks."""
    w2x2 = (omega * x) ** 2
    a = abs(V)
    return (
        9.0 * a**4
        + 14.0 * w2x2 * a**3
        + (7.5 * w2x2**2 + 6.0 * abs(d)) * a**2
        + (2.0 * abs(d) * w2x2 + 1.5 * w2x2**3) * a
        + d * d
        + 0.5 * abs(d) * w2x2**2
        + w2x2**4 / 16.0
        + abs(c) * x * x
        + 1.0
    )


def _newton_v3(omega, d, c, x, V, tol=1e-14, max_iter=50):
    """Polish a root of the quartic eliminant, robust to double roots.

    Double-root sets (eps1 = eps2) make the closed-form branch a squared
    factor of the eliminant; there plain Newton stagnates, so we finish by
    Newton on dF/dV and accept on a residual check.
    """
    V0 = V
    cap = 0.05 * (1.0 + abs(V0))
    scale = _f3_scale(omega, d, c, V0, x)

    def stationary(Vk):
        # on a squared factor, a stationary point of F that annihilates F to
        # roundoff is far more accurate than plain Newton, which is
        # noise-limited to ~sqrt(eps) relative error there
        for _ in range(max_iter):
            dF = _f3_dV(omega, d, c, Vk, x)
            ddF = _f3_dVV(omega, d, c, Vk, x)
            if ddF == 0 or abs(Vk - V0) > cap:
                return None
            step = dF / ddF
            Vk -= step
            if abs(step) <= tol * (1.0 + abs(Vk)):
                if abs(Vk - V0) <= cap and abs(
                    _f3_eliminant(omega, d, c, Vk, x)
                ) <= 1e-12 * scale:
                    return Vk
                return None
        return None

    Vs = stationary(V0)
    if Vs is not None:
        return Vs
    best_V = V
    best_F = abs(_f3_eliminant(omega, d, c, V, x))
    for _ in range(max_iter):
        F = _f3_eliminant(omega, d, c, V, x)
        dF = _f3_dV(omega, d, c, V, x)
        if dF == 0:
            break
        step = F / dF
        if abs(step) > cap:
            step = math.copysign(cap, step)
        V -= step
        if abs(V - V0) > 2.0 * cap:
            break
        Fn = abs(_f3_eliminant(omega, d, c, V, x))
        if Fn < best_F:
            best_V = V
            best_F = Fn
        if abs(step) <= tol * (1.0 + abs(V)):
            break
    if best_F <= 1e-9 * scale and abs(best_V - V0) <= cap:
        # a seed too far from a squared-factor root can push the first
        # stationary attempt into the wrong basin; retry from the converged
        # iterate before settling for the noise-limited value
        Vs = stationary(best_V)
        return best_V if Vs is None else Vs
    return None


# ---------------------------------------------------------------------------
# order-4 defining system
# ---------------------------------------------------------------------------


def _g4_system(omega, d, c, e, x, V, f0, f1):
    w2 = omega * omega
    B0 = 16.0 * d + w2 * w2 * x**4 - 16.0 * w2 * x * x * V - 32.0 * V * V
    f2 = -0.5 * w2 * x * x + 4.0 * V
    g1 = 8.0 * omega * x * f1 - B0 - 8.0 * f0
    g2 = f1 * f1 + 2.0 * f0 * f2 - 8.0 * c + 16.0 * d * V - 32.0 * V**3
    g3 = f0 * f0 - 16.0 * (V**4 - d * V * V + c * V - e)
    return np.array([g1, g2, g3])


def _g4_jacobian(omega, d, c, e, x, V, f0, f1):
    w2 = omega * omega
    f2 = -0.5 * w2 * x * x + 4.0 * V
    # rows: g1, g2, g3; columns: V, f0, f1
    return np.array(
        [
            [16.0 * w2 * x * x + 64.0 * V, -8.0, 8.0 * omega * x],
            [8.0 * f0 + 16.0 * d - 96.0 * V * V, 2.0 * f2, 2.0 * f1],
            [-64.0 * V**3 + 32.0 * d * V - 16.0 * c, 2.0 * f0, 0.0],
        ]
    )


def _g4_dx(omega, d, c, e, x, V, f0, f1):
    w2 = omega * omega
    dB0 = 4.0 * w2 * w2 * x**3 - 32.0 * w2 * x * V
    return np.array(
        [8.0 * omega * f1 - dB0, 2.0 * f0 * (-w2 * x), 0.0]
    )


def _g4_scale(omega, d, c, e, x, V, f0, f1):
    w2 = omega * omega
    aB0 = 16.0 * abs(d) + w2 * w2 * x**4 + 16.0 * w2 * x * x * abs(V) + 32.0 * V * V
    af2 = 0.5 * w2 * x * x + 4.0 * abs(V)
    return np.array(
        [
            8.0 * omega * abs(x) * abs(f1) + aB0 + 8.0 * abs(f0) + 1.0,
            f1 * f1 + 2.0 * abs(f0) * af2 + 8.0 * abs(c) + 16.0 * abs(d * V) + 32.0 * abs(V) ** 3 + 1.0,
            f0 * f0 + 16.0 * (V**4 + abs(d) * V * V + abs(c * V) + abs(e)) + 1.0,
        ]
    )


def _newton_v4(omega, d, c, e, x, V, f0, f1, tol=1e-14, max_iter=80):
    """Polish a solution of the order-4 symmetric system.

    Uses least squares instead of a direct solve so that the degenerate
    triple-root families (where the Jacobian is singular along the branch)
    still converge, linearly, to the solution; acceptance is by residual.
    """
    y = np.array([V, f0, f1], dtype=float)
    best = None
    best_res = math.inf
    for _ in range(max_iter):
        G = _g4_system(omega, d, c, e, x, *y)
        res = float(np.max(np.abs(G / _g4_scale(omega, d, c, e, x, *y))))
        if res < best_res:
            best_res = res
            best = y.copy()
        if res <= 1e-15:
            break
        J = _g4_jacobian(omega, d, c, e, x, *y)
        step, *_ = np.linalg.lstsq(J, G, rcond=1e-12)
        if not np.all(np.isfinite(step)):
            break
        y = y - step
        if np.max(np.abs(step)) <= tol * (1.0 + np.max(np.abs(y))):
            break
    G = _g4_system(omega, d, c, e, x, *y)
    res = float(np.max(np.abs(G / _g4_scale(omega, d, c, e, x, *y))))
    if res < best_res:
        best_res = res
        best = y.copy()
    if best is not None and best_res <= 1e-10:
        return best
    return None


def _order4_eliminant(omega, d, c, e, x):
    """Exact quintic-in-V eliminant of the symmetric system, ascending coeffs.

    Formally P^2 - g S^2 is degree 8 in V, but the three top coefficients
    cancel identically; these are the expanded surviving coefficients, so no
    numerical cancellation noise enters the root finding.
    """
    u = (omega * x) ** 2
    e0 = (
        262144.0 * c * c * u * u
        - 262144.0 * c * d * d * u
        - 32768.0 * c * d * u**3
        + 1048576.0 * c * e * u
        - 1024.0 * c * u**5
        + 65536.0 * d**4
        + 16384.0 * d**3 * u * u
        + 524288.0 * d * d * e
        + 1536.0 * d * d * u**4
        - 458752.0 * d * e * u * u
        + 64.0 * d * u**6
        + 1048576.0 * e * e
        + 34816.0 * e * u**4
        + u**8
    )
    e1 = -64.0 * (
        16384.0 * c * c * u
        + 8192.0 * c * d * d
        + 1024.0 * c * d * u * u
        + 32768.0 * c * e
        + 32.0 * c * u**4
        - 4096.0 * d**3 * u
        - 256.0 * d * d * u**3
        - 16384.0 * d * e * u
        + 16.0 * d * u**5
        + 5120.0 * e * u**3
        + u**7
    )
    e2 = 128.0 * (
        8192.0 * c * c
        + 8192.0 * c * d * u
        + 1024.0 * c * u**3
        - 1280.0 * d * d * u * u
        + 96.0 * d * u**4
        + 11264.0 * e * u * u
        + 11.0 * u**6
    )
    e3 = -2048.0 * u * (192.0 * c * u + 256.0 * d * d + 64.0 * d * u * u + 1024.0 * e + 7.0 * u**4)
    e4 = 4096.0 * u * u * (128.0 * d + 17.0 * u * u)
    e5 = -131072.0 * u**3
    return np.array([e0, e1, e2, e3, e4, e5])


def _order4_eliminant_mp(omega, d, c, e, x):
    """The quintic eliminant with coefficients exact to extended precision."""
    w, d, c, e, x = (mp.mpf(float(t)) for t in (omega, d, c, e, x))
    u = (w * x) ** 2
    e0 = (
        262144 * c * c * u * u
        - 262144 * c * d * d * u
        - 32768 * c * d * u**3
        + 1048576 * c * e * u
        - 1024 * c * u**5
        + 65536 * d**4
        + 16384 * d**3 * u * u
        + 524288 * d * d * e
        + 1536 * d * d * u**4
        - 458752 * d * e * u * u
        + 64 * d * u**6
        + 1048576 * e * e
        + 34816 * e * u**4
        + u**8
    )
    e1 = -64 * (
        16384 * c * c * u
        + 8192 * c * d * d
        + 1024 * c * d * u * u
        + 32768 * c * e
        + 32 * c * u**4
        - 4096 * d**3 * u
        - 256 * d * d * u**3
        - 16384 * d * e * u
        + 16 * d * u**5
        + 5120 * e * u**3
        + u**7
    )
    e2 = 128 * (
        8192 * c * c
        + 8192 * c * d * u
        + 1024 * c * u**3
        - 1280 * d * d * u * u
        + 96 * d * u**4
        + 11264 * e * u * u
        + 11 * u**6
    )
    e3 = -2048 * u * (192 * c * u + 256 * d * d + 64 * d * u * u + 1024 * e + 7 * u**4)
    e4 = 4096 * u * u * (128 * d + 17 * u * u)
    e5 = -131072 * u**3
    return [e5, e4, e3, e2, e1, e0]


def _mp_poly_scale(coeffs, r):
    n = len(coeffs) - 1
    return sum(abs(ck) * abs(r) ** (n - k) for k, ck in enumerate(coeffs)) + mp.mpf("1e-300")


def _mp_newton(coeffs, dcoeffs, r, max_iter=60):
    tol = mp.mpf(10) ** (5 - mp.mp.dps)
    for _ in range(max_iter):
        f = mp.polyval(coeffs, r)
        df = mp.polyval(dcoeffs, r)
        if df == 0:
            break
        step = f / df
        r -= step
        if abs(step) <= tol * (1 + abs(r)):
            break
    return r


def _quintic_real_roots(omega, d, c, e, x):
    """Real roots of the exact quintic eliminant as (root, multiplicity).

    The coefficient scale can exceed the polynomial's size near its root
    cluster by many orders of magnitude, so double-precision evaluation
    cannot separate nearby branches; candidate locations still come cheaply
    from double-precision companion solves of the derivative chain (an
    m-fold root is a well-conditioned simple root of the (m-1)-th
    derivative), and polish plus verification run in extended precision.
    """
    with mp.workdps(40):
        coeffs = _order4_eliminant_mp(omega, d, c, e, x)
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs = coeffs[1:]
        n = len(coeffs) - 1
        if n < 1:
            return []
        derivs = [coeffs]
        for _ in range(n - 1):
            prev = derivs[-1]
            k = len(prev) - 1
            derivs.append([prev[i] * (k - i) for i in range(k)])
        accept = mp.mpf(10) ** (10 - mp.mp.dps)
        found = []

        def is_root(r, level):
            return abs(mp.polyval(derivs[level], r)) <= accept * _mp_poly_scale(
                derivs[level], r
            )

        for m in range(n - 1, 1, -1):
            dd = np.array([float(ck) for ck in derivs[m - 1]])
            if np.max(np.abs(dd)) == 0:
                continue
            for z in np.roots(dd):
                if abs(z.imag) > 1e-5 * (1.0 + abs(z)):
                    continue
                r = _mp_newton(derivs[m - 1], derivs[m], mp.mpf(float(z.real)))
                if not all(is_root(r, j) for j in range(m)):
                    continue
                if any(abs(r - r0) <= 1e-9 * (1 + abs(r)) for r0, _ in found):
                    continue
                found.append((r, m))
        work = list(coeffs)
        for r, m in found:
            for _ in range(m):
                out = []
                acc = mp.mpf(0)
                for ck in work:
                    acc = acc * r + ck
                    out.append(acc)
                work = out[:-1]
        if len(work) > 1:
            wd = np.array([float(ck) for ck in work])
            if np.max(np.abs(wd)) > 0:
                for z in np.roots(wd):
                    if abs(z.imag) > 1e-6 * (1.0 + abs(z)):
                        continue
                    r = _mp_newton(work, [ck * (len(work) - 1 - i) for i, ck in enumerate(work[:-1])], mp.mpf(float(z.real)))
                    if not is_root(r, 0):
                        continue
                    if not any(abs(r - r0) <= 1e-9 * (1 + abs(r)) for r0, _ in found):
                        found.append((r, 1))
        return sorted((float(r), int(m)) for r, m in found)


def _quintic_implicit_slope(omega, d, c, e, x, V):
    """dV/dx on an eliminant branch, valid at roots of any multiplicity.

    An m-fold root V(x) is a simple root of the (m-1)-th V-derivative of the
    eliminant, so implicit differentiation of that relation is well
    conditioned where the plain F_V division is 0/0.
    """
    roots = _quintic_real_roots(omega, d, c, e, x)
    if not roots:
        raise EvaluationFailure(
            f"no eliminant root at x={x}", component="implicit slope"
        )
    r_exact, m = min(roots, key=lambda rm: abs(rm[0] - V))
    with mp.workdps(40):
        coeffs = _order4_eliminant_mp(omega, d, c, e, x)
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs = coeffs[1:]
        n = len(coeffs) - 1
        derivs = [coeffs]
        for _ in range(n):
            prev = derivs[-1]
            k = len(prev) - 1
            derivs.append([prev[i] * (k - i) for i in range(k)])
        r = _mp_newton(derivs[m - 1], derivs[m], mp.mpf(float(r_exact)))
        h = 1e-7 * (1.0 + abs(x))
        cp = _order4_eliminant_mp(omega, d, c, e, x + h)
        cm = _order4_eliminant_mp(omega, d, c, e, x - h)
        dcoeffs = [(a - b) / (2 * mp.mpf(h)) for a, b in zip(cp, cm)]
        dcoeffs = dcoeffs[len(dcoeffs) - len(coeffs):]
        for _ in range(m - 1):
            k = len(dcoeffs) - 1
            dcoeffs = [dcoeffs[i] * (k - i) for i in range(k)]
        num = mp.polyval(dcoeffs, r)
        den = mp.polyval(derivs[m], r)
        if den == 0:
            raise EvaluationFailure(
                f"degenerate eliminant at x={x}", component="implicit slope"
            )
        return float(-num / den)


def _order4_candidates(omega, rs: RootSet, x):
    """All (V, f0, f1) solutions of the symmetric system at a single x."""
    inv = rs.invariants()
    d, c, e = inv.d, inv.c, inv.e
    w2x2 = (omega * x) ** 2
    # ascending coefficient arrays over V
    B0 = np.array([16.0 * d + w2x2 * w2x2, -16.0 * w2x2, -32.0])
    f2 = np.array([-0.5 * w2x2, 4.0])
    g = np.array([-16.0 * e, 16.0 * c, -16.0 * d, 0.0, 16.0])
    from numpy.polynomial import polynomial as npoly

    P = npoly.polyadd(npoly.polymul(B0, B0), 64.0 * g)
    P = npoly.polyadd(P, 64.0 * w2x2 * np.array([-8.0 * c, 16.0 * d, 0.0, -32.0]))
    S = npoly.polyadd(16.0 * B0, 128.0 * w2x2 * np.pad(f2, (0, 1)))
    sols = []
    for V, _mult in _quintic_real_roots(omega, d, c, e, x):
        Sv = npoly.polyval(V, S)
        gv = npoly.polyval(V, g)
        if abs(Sv) > 1e-9 * (1.0 + abs(npoly.polyval(V, P))):
            f0_cands = [-npoly.polyval(V, P) / Sv]
        else:
            if gv < -1e-9 * (1.0 + V**4):
                continue
            mag = math.sqrt(max(gv, 0.0))
            f0_cands = [mag, -mag] if mag > 0 else [0.0]
        for f0 in f0_cands:
            if abs(x) < 1e-12:
                continue
            f1 = (npoly.polyval(V, B0) + 8.0 * f0) / (8.0 * omega * x)
            seed = np.array([V, f0, f1])
            seed_res = float(
                np.max(
                    np.abs(
                        np.asarray(_g4_system(omega, d, c, e, x, *seed))
                        / _g4_scale(omega, d, c, e, x, *seed)
                    )
                )
            )
            sol = _newton_v4(omega, d, c, e, x, V, f0, f1)
            if sol is None or not all(np.isfinite(sol)):
                # on a multiple root the Jacobian is singular and the lstsq
                # polish can stall; the eliminant-derived seed is already exact
                if seed_res > 1e-9:
                    continue
                sol = seed
            else:
                sol_res = float(
                    np.max(
                        np.abs(
                            np.asarray(_g4_system(omega, d, c, e, x, *sol))
                            / _g4_scale(omega, d, c, e, x, *sol)
                        )
                    )
                )
                if seed_res < sol_res:
                    sol = seed
            if any(
                abs(sol[0] - s0[0]) < 1e-7 * (1.0 + abs(sol[0]))
                and abs(sol[1] - s0[1]) < 1e-7 * (1.0 + abs(sol[1]))
                for s0 in sols
            ):
                continue
            sols.append(tuple(sol))
    sols.sort()
    return sols


def _cluster_poly_roots(coeffs_desc):
    """Near-real root seeds of a numeric polynomial, multiplicity-polished.

    Multiple roots split into complex clusters under coefficient roundoff;
    the cluster mean is already accurate and a Newton polish on the
    (m-1)-th derivative restores machine precision for an m-fold root.
    """
    roots = np.roots(coeffs_desc)
    used = np.zeros(len(roots), dtype=bool)
    seeds = []
    for i, z in enumerate(roots):
        if used[i]:
            continue
        tol = 3e-5 * (1.0 + abs(z))
        members = [j for j in range(len(roots)) if not used[j] and abs(roots[j] - z) <= tol]
        for j in members:
            used[j] = True
        mean = np.mean(roots[members])
        if abs(mean.imag) > 1e-3 * (1.0 + abs(mean)):
            continue
        seed = float(mean.real)
        m = len(members)
        if m > 1:
            dpoly = coeffs_desc
            for _ in range(m - 1):
                dpoly = np.polyder(dpoly)
            seed = complex(_polish_root(dpoly, seed, steps=12)).real
        seeds.append(seed)
    return seeds


def _order3_candidates(omega, inv: SymmetricInvariants, x):
    out = [r for r, _m in solve_quartic_real(quartic_coefficients(omega, inv, x))]
    return [(V,) for V in sorted(out)]


# ---------------------------------------------------------------------------
# branch tracking
# ---------------------------------------------------------------------------


class _Track:
    __slots__ = ("xs", "vals", "alive", "note")

    def __init__(self, x, val):
        self.xs = [x]
        self.vals = [val]
        self.alive = True
        self.note = ""

    def extrapolate(self, x):
        n = min(len(self.xs), 3)
        pts = list(zip(self.xs[-n:], self.vals[-n:]))
        if len({p[0] for p in pts}) < n:
            return tuple(self.vals[-1])
        total = None
        for i, (xi, vi) in enumerate(pts):
            w = 1.0
            for j, (xj, _) in enumerate(pts):
                if i != j:
                    w *= (x - xj) / (xi - xj)
            term = w * np.asarray(vi)
            total = term if total is None else total + term
        return tuple(total)


def _dist(a, b):
    return max(abs(ai - bi) for ai, bi in zip(a, b))


def _step_cap(track, guess):
    last = np.asarray(track.vals[-1])
    return max(
        0.05 * (1.0 + float(np.max(np.abs(last)))),
        4.0 * float(np.max(np.abs(np.asarray(guess) - last))),
    )


def _advance(track, x0, x1, solve, depth, max_depth):
    """Follow the track from x0 to x1, bisecting when the step is too large.

    Intermediate solves are appended to the track; the matched solution at
    x1 itself is returned without being appended, so the caller can arbitrate
    between tracks competing for the same root.
    """
    sols = solve(x1)
    if sols:
        guess = track.extrapolate(x1)
        dists = [_dist(guess, s) for s in sols]
        k = int(np.argmin(dists))
        if dists[k] <= _step_cap(track, guess):
            return sols[k]
    if depth < max_depth:
        xm = 0.5 * (x0 + x1)
        mid = _advance(track, x0, xm, solve, depth + 1, max_depth)
        if mid is not None:
            track.xs.append(xm)
            track.vals.append(mid)
            return _advance(track, xm, x1, solve, depth + 1, max_depth)
    return None


def _track_branches(x_grid, solver, max_depth=6):
    """Follow solution tuples across the x grid.

    At each node every live track claims at most one solution and every
    solution at most one track (greedy, nearest first); tracks that lose the
    arbitration retry with bisection before being terminated, and solutions
    left unclaimed seed new tracks.
    """
    cache = {}

    def solve(x):
        if x not in cache:
            cache[x] = solver(x)
        return cache[x]

    tracks = []
    for x in x_grid:
        sols = solve(x)
        live = [t for t in tracks if t.alive]
        pairs = []
        for ti, t in enumerate(live):
            guess = t.extrapolate(x)
            cap = _step_cap(t, guess)
            for si, s in enumerate(sols):
                dd = _dist(guess, s)
                if dd <= cap:
                    pairs.append((dd, ti, si))
        pairs.sort(key=lambda p: p[0])
        assigned = {}
        taken = {}
        for dd, ti, si in pairs:
            if ti in assigned or si in taken:
                continue
            assigned[ti] = si
            taken[si] = ti
        for ti, si in assigned.items():
            live[ti].xs.append(x)
            live[ti].vals.append(sols[si])
        # losers of the arbitration: approach x in smaller steps
        for ti, t in enumerate(live):
            if ti in assigned:
                continue
            end = _advance(t, t.xs[-1], x, solve, 0, max_depth)
            if end is not None:
                free = [
                    si
                    for si, s in enumerate(sols)
                    if si not in taken and _dist(end, s) < _COLLISION_TOL
                ]
                if free:
                    taken[free[0]] = ti
                    t.xs.append(x)
                    t.vals.append(sols[free[0]])
                    continue
                if any(_dist(end, sols[si]) < _COLLISION_TOL for si in taken):
                    t.alive = False
                    t.note = "terminated: merged with another branch"
                    continue
            t.alive = False
            t.note = t.note or "terminated: no matching root"
        for si, s in enumerate(sols):
            if si not in taken:
                tracks.append(_Track(x, s))
    return [t for t in tracks if len(t.xs) >= 4]


def branch_continuation(rs: RootSet, x_grid: Sequence[float]):
    """Maximal continuous real potential branches over the x grid.

    Returns :class:`PotentialBranch` objects whose off-grid evaluation
    Newton-polishes the defining algebraic system seeded by interpolation,
    so residuals are at machine precision everywhere, not just at nodes.
    """
    omega = rs.omega
    inv = rs.invariants()
    x_grid = np.asarray(sorted(float(x) for x in x_grid))
    if len(x_grid) < 8:
        raise ValueError("x grid too coarse for continuation")
    # a node exactly at 0 makes the order-4 system singular in f1; nudge it
    span = x_grid[-1] - x_grid[0]
    x_grid = np.where(np.abs(x_grid) < 1e-9 * max(1.0, span), 1e-6 * max(1.0, span), x_grid)

    if rs.order == 3:
        solver = lambda x: _order3_candidates(omega, inv, x)  # noqa: E731
    else:
        solver = lambda x: _order4_candidates(omega, rs, x)  # noqa: E731

    tracks = _track_branches(x_grid, solver)
    if not tracks:
        raise ContinuationFailure(
            f"no real branches found for {rs}", last_good_x=float(x_grid[0])
        )
    branches = []
    for t in tracks:
        xs = np.asarray(t.xs)
        vals = np.asarray(t.vals)
        if rs.order == 3:
            branches.append(_order3_branch(rs, inv, xs, vals[:, 0], t.note))
        else:
            branches.append(_order4_branch(rs, inv, xs, vals, t.note))
    branches.sort(key=lambda b: float(b.params["grid_v"][len(b.params["grid_v"]) // 2]))
    return branches


def _order3_branch(rs, inv, xs, Vs, note):
    omega, d, c = rs.omega, inv.d, inv.c

    def v_scalar(x):
        seed = float(np.interp(x, xs, Vs))
        V = _newton_v3(omega, d, c, x, seed)
        if V is None:
            raise ContinuationFailure(
                f"Newton divergence at x={x}", last_good_x=float(xs[np.argmin(np.abs(xs - x))])
            )
        return V

    def v_fn(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return v_scalar(float(x))
        return np.array([v_scalar(xi) for xi in x.ravel()]).reshape(x.shape)

    def grid_slope(x):
        k = int(np.clip(np.searchsorted(xs, x), 1, len(xs) - 2))
        return (Vs[k + 1] - Vs[k - 1]) / (xs[k + 1] - xs[k - 1])

    def dv_scalar(x):
        V = v_scalar(x)
        dF = _f3_dV(omega, d, c, V, x)
        if abs(dF) <= 1e-9 * _f3_dV_scale(omega, d, c, V, x):
            # F_V vanishes on a squared-factor branch and at branch crossings;
            # there the slope solves F_VV V'^2 + 2 F_Vx V' + F_xx = 0
            A = _f3_dVV(omega, d, c, V, x)
            B = _f3_dVx(omega, d, c, V, x)
            C = _f3_dxx(omega, d, c, V, x)
            if A == 0:
                return -C / (2.0 * B)
            disc = B * B - A * C
            if abs(disc) <= 1e-12 * (B * B + abs(A * C)):
                # squared factor: the double slope, free of sqrt(eps) noise
                return -B / A
            sq = math.sqrt(max(disc, 0.0))
            slopes = ((-B + sq) / A, (-B - sq) / A)
            ref = grid_slope(x)
            return min(slopes, key=lambda s: abs(s - ref))
        return -_f3_dx(omega, d, c, V, x) / dF

    def dv_fn(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return dv_scalar(float(x))
        return np.array([dv_scalar(xi) for xi in x.ravel()]).reshape(x.shape)

    return PotentialBranch(
        v_fn=v_fn,
        dv_fn=dv_fn,
        domain=((float(xs[0]), float(xs[-1])),),
        provenance="continuation-order3" + (f" ({note})" if note else ""),
        params={"rootset": rs, "grid_x": xs, "grid_v": Vs, "d": d, "c": c},
    )


def _order4_branch(rs, inv, xs, vals, note):
    omega, d, c, e = rs.omega, inv.d, inv.c, inv.e
    xs, keep = np.unique(xs, return_index=True)
    vals = vals[keep]
    Vs, F0s, F1s = vals[:, 0], vals[:, 1], vals[:, 2]
    spline = CubicSpline(xs, vals)

    def solve_scalar(x):
        seed = spline(x)
        # Newton is only trustworthy off the degenerate families: a singular
        # Jacobian lets the least-squares step drift within the accepted
        # residual, so those fall through to the exact per-point solve
        if np.linalg.cond(_g4_jacobian(omega, d, c, e, x, *seed)) < 1e8:
            sol = _newton_v4(omega, d, c, e, x, *seed)
            # a polish should barely move a spline seed; a larger jump means
            # Newton hopped to a nearby branch (possible where branches
            # almost touch)
            if sol is not None and np.max(
                np.abs(np.asarray(sol) - seed) / (1.0 + np.abs(seed))
            ) <= 1e-6:
                return tuple(float(t) for t in sol)
        cands = _order4_candidates(omega, rs, x)
        if not cands:
            raise ContinuationFailure(
                f"Newton divergence at x={x}", last_good_x=float(xs[np.argmin(np.abs(xs - x))])
            )
        best = min(cands, key=lambda s: max(abs(a - b) for a, b in zip(s, seed)))
        return tuple(float(t) for t in best)

    def dv_scalar(x):
        V, f0, f1 = solve_scalar(x)
        J = _g4_jacobian(omega, d, c, e, x, V, f0, f1)
        gx = _g4_dx(omega, d, c, e, x, V, f0, f1)
        try:
            if np.linalg.cond(J) < 1e8:
                dy = np.linalg.solve(J, -gx)
                return float(dy[0])
        except np.linalg.LinAlgError:
            pass
        # singular along multiple-root families (and near branch tangencies)
        return _quintic_implicit_slope(omega, d, c, e, x, V)

    def v_fn(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return solve_scalar(float(x))[0]
        return np.array([solve_scalar(xi)[0] for xi in x.ravel()]).reshape(x.shape)

    def dv_fn(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return dv_scalar(float(x))
        return np.array([dv_scalar(xi) for xi in x.ravel()]).reshape(x.shape)

    branch = PotentialBranch(
        v_fn=v_fn,
        dv_fn=dv_fn,
        domain=((float(xs[0]), float(xs[-1])),),
        provenance="continuation-order4" + (f" ({note})" if note else ""),
        params={
            "rootset": rs,
            "grid_x": xs,
            "grid_v": Vs,
            "grid_f0": F0s,
            "grid_f1": F1s,
            "d": d,
            "c": c,
            "e": e,
        },
    )
    branch.ladder_data = lambda x: tuple(solve_scalar(float(x)))
    return branch
