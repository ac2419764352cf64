"""Phase-space states, complex observables and a numerical Poisson bracket.

Everything here is pure and immutable; the bracket engine is the single
derivative convention used by all verification suites:

    {f, g} = sum_i  df/dx_i dg/dp_i - df/dp_i dg/dx_i

Derivatives are central differences with one Richardson extrapolation level,
replaced by analytic gradients whenever both observables carry one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationFailure

#: Relative finite-difference step; the absolute step for a coordinate q is
#: DEFAULT_STEP_SCALE * max(1, |q|).
DEFAULT_STEP_SCALE = 1e-5

_COORD_NAMES = {1: ("x1", "p1"), 2: ("x1", "p1", "x2", "p2")}


@dataclass(frozen=True)
class PhaseState:
    """A point of 1D or 2D phase space (unit mass, dimensionless units)."""

    positions: tuple
    momenta: tuple

    def __post_init__(self):
        pos = tuple(float(v) for v in self.positions)
        mom = tuple(float(v) for v in self.momenta)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "momenta", mom)
        if len(pos) != len(mom) or len(pos) not in (1, 2):
            raise ValueError(
                f"positions/momenta must have equal length 1 or 2, "
                f"got {len(pos)}/{len(mom)}"
            )
        if not all(math.isfinite(v) for v in pos + mom):
            raise ValueError("phase-space components must be finite")

    @property
    def dim(self) -> int:
        return len(self.positions)

    def x(self, i: int = 0) -> float:
        return self.positions[i]

    def p(self, i: int = 0) -> float:
        return self.momenta[i]

    @property
    def coords(self) -> np.ndarray:
        """Interleaved coordinates (x1, p1[, x2, p2])."""
        out = np.empty(2 * self.dim)
        out[0::2] = self.positions
        out[1::2] = self.momenta
        return out

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> "PhaseState":
        c = np.asarray(coords, dtype=float)
        return cls(tuple(c[0::2]), tuple(c[1::2]))

    def shifted(self, index: int, delta: float) -> "PhaseState":
        c = self.coords
        c[index] += delta
        return PhaseState.from_coords(c)


@dataclass(frozen=True)
class Observable:
    """A deterministic complex-valued function on phase space.

    ``grad``, when given, must return the complex gradient ordered like
    :attr:`PhaseState.coords`.
    """

    dim: int
    fn: Callable[[PhaseState], complex]
    grad: Optional[Callable[[PhaseState], np.ndarray]] = None
    name: str = field(default="", compare=False)

    def __call__(self, state: PhaseState) -> complex:
        return complex(self.fn(state))


def coordinate_observable(i: int = 0, dim: int = 1) -> Observable:
    return Observable(dim, lambda s, i=i: s.x(i), name=f"x{i + 1}")


def momentum_observable(i: int = 0, dim: int = 1) -> Observable:
    return Observable(dim, lambda s, i=i: s.p(i), name=f"p{i + 1}")


def _partial(f: Observable, s: PhaseState, index: int, h: float, label: str) -> complex:
    """Central difference with one Richardson level: (4 D(h/2) - D(h)) / 3."""

    def central(step):
        hi = f(s.shifted(index, step))
        lo = f(s.shifted(index, -step))
        return (hi - lo) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    val = (4.0 * d2 - d1) / 3.0
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise EvaluationFailure(
            f"non-finite partial derivative of {f.name or 'observable'} "
            f"with respect to {label}",
            component=label,
        )
    return val


def estimate_gradient(f: Observable, s: PhaseState, h: float | None = None) -> np.ndarray:
    """Finite-difference gradient of ``f`` at ``s``, ordered (x1, p1[, x2, p2])."""
    if f.dim != s.dim:
        raise ValueError(f"observable arity {f.dim} != state arity {s.dim}")
    names = _COORD_NAMES[s.dim]
    coords = s.coords
    grad = np.empty(2 * s.dim, dtype=complex)
    for i in range(2 * s.dim):
        hi = h if h is not None else DEFAULT_STEP_SCALE * max(1.0, abs(coords[i]))
        if hi <= 0:
            raise ValueError("finite-difference step must be positive")
        grad[i] = _partial(f, s, i, hi, names[i])
    return grad


def poisson_bracket(
    f: Observable,
    g: Observable,
    s: PhaseState,
    h: float | None = None,
) -> complex:
    """Numerical canonical Poisson bracket {f, g}(s).

    Uses analytic gradients when both observables provide them, otherwise
    Richardson-extrapolated central differences with per-coordinate step
    ``h`` (default 1e-5 * max(1, |coordinate|)).
    """
    if f.dim != g.dim or f.dim != s.dim:
        raise ValueError("f, g and s must share the same arity")
    if f.grad is not None and g.grad is not None:
        gf = np.asarray(f.grad(s), dtype=complex)
        gg = np.asarray(g.grad(s), dtype=complex)
    else:
        gf = estimate_gradient(f, s, h)
        gg = estimate_gradient(g, s, h)
    out = 0.0 + 0.0j
    for i in range(s.dim):
        out += gf[2 * i] * gg[2 * i + 1] - gf[2 * i + 1] * gg[2 * i]
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise EvaluationFailure("non-finite Poisson bracket value")
    return out
