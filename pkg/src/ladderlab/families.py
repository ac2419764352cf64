"""Convenience constructors mapping family selectors to built axis systems."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .ladder import LadderPair, build_ladder1, build_ladder3, build_ladder4
from .potentials import (
    PotentialBranch,
    RootSet,
    branch_continuation,
    closed_form_v3,
    closed_form_v4,
    double_root_set,
    triple_root_set,
)
from .superint import AxisSystem


def closed_form_family(
    order: int, variant: str, omega: float, eps2: float, sign: int = 1
) -> tuple:
    """(branch, root set) for a degenerate-root closed-form family."""
    if order == 3:
        return closed_form_v3(omega, eps2, variant, sign), double_root_set(eps2, omega)
    if order == 4:
        return closed_form_v4(omega, eps2, variant, sign), triple_root_set(eps2, omega)
    raise ValueError(f"closed forms exist for orders 3 and 4, got {order}")


def continuation_family(
    order: int, roots: Sequence[float], omega: float, x_grid: Sequence[float]
) -> tuple:
    """(branches, root set) from Newton continuation over ``x_grid``."""
    rs = RootSet(order, tuple(roots), omega)
    return branch_continuation(rs, np.asarray(x_grid, dtype=float)), rs


def build_pair(branch: PotentialBranch, rs: RootSet) -> LadderPair:
    """Ladder pair for a branch of the family described by ``rs``."""
    if rs.order == 3:
        return build_ladder3(branch, rs.omega, rs.invariants())
    if rs.order == 4:
        return build_ladder4(branch, rs.omega, rs)
    raise ValueError(f"unsupported order {rs.order}")


def make_axis(
    order: int,
    omega: float,
    variant: Optional[str] = None,
    eps2: Optional[float] = None,
    sign: int = 1,
) -> AxisSystem:
    """One ready-to-compose 1D axis.

    Order 1 is the harmonic oscillator; orders 3 and 4 take a closed-form
    variant name and the zero-mode energy eps2.
    """
    if order == 1:
        pair = build_ladder1(omega)
        return AxisSystem(pair.branch, pair, None)
    if variant is None or eps2 is None:
        raise ValueError("orders 3 and 4 need a variant and eps2")
    branch, rs = closed_form_family(order, variant, omega, eps2, sign)
    return AxisSystem(branch, build_pair(branch, rs), rs)
