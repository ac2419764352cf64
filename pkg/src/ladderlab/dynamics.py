"""Hamiltonian integration, conservation monitoring and orbit closure.

Unit mass throughout: xdot = p, pdot = -V'(x) on each axis.  Integration
uses the adaptive 8(5,3) Runge-Kutta pair with dense output; conserved
quantities are monitored against their t=0 values.  A trajectory of a
verified 1D ladder family can alternatively be reconstructed without
integration from the two conserved quantities E = H and arg A_lower,
whose phase rotates uniformly: arg A_lower(t) = arg A_lower(0) - omega t.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .errors import DomainError, DomainExitError, EvaluationFailure, StiffnessError
from .ladder import LadderPair
from .phase import PhaseState
from .potentials import PotentialBranch
from .superint import AxisSystem, Hamiltonian2D, IntegralSet


@dataclass
class Trajectory:
    """Sampled solution of Hamilton's equations with conserved-series data."""

    times: np.ndarray
    coords: np.ndarray  # (n, 2*dim), interleaved x1, p1[, x2, p2]
    conserved: dict = field(default_factory=dict)
    drift: dict = field(default_factory=dict)
    period_estimate: Optional[float] = None
    closure_distance: Optional[float] = None
    dense: Optional[Callable] = None  # t -> interleaved coords

    def __post_init__(self):
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("trajectory states must be finite")

    @property
    def dim(self) -> int:
        return self.coords.shape[1] // 2

    def state(self, i: int) -> PhaseState:
        return PhaseState.from_coords(self.coords[i])

    def states(self) -> list:
        return [PhaseState.from_coords(c) for c in self.coords]

    def write_csv(self, path) -> str:
        cols = ["t", "x1", "p1"]
        if self.dim == 2:
            cols += ["x2", "p2"]
        names = [k for k in ("H", "K", "J1", "J2") if k in self.conserved]
        with open(path, "w") as fh:
            fh.write(",".join(cols + names) + "\n")
            for i, t in enumerate(self.times):
                row = [t, *self.coords[i]]
                row += [self.conserved[k][i] for k in names]
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return path


def _rhs_and_events(system):
    """Right-hand side, domain-exit events, and per-state H evaluators."""
    if isinstance(system, Hamiltonian2D):
        branches = (system.axis1.branch, system.axis2.branch)
        x_indices = (0, 2)
        dvs = (system.axis1.branch.dv_fn, system.axis2.branch.dv_fn)

        def rhs(t, y):
            return [y[1], -float(dvs[0](y[0])), y[3], -float(dvs[1](y[2]))]

    elif isinstance(system, PotentialBranch):
        branches = (system,)
        x_indices = (0,)

        def rhs(t, y):
            return [y[1], -float(system.dv_fn(y[0]))]

    else:
        raise TypeError(f"cannot integrate a {type(system).__name__}")

    events = []
    edges = []
    for branch, ix in zip(branches, x_indices):
        for lo, hi in branch.domain:
            for edge, sgn in ((lo, 1.0), (hi, -1.0)):
                if not math.isfinite(edge):
                    continue
                # stop a whisker inside the edge: V' may blow up exactly at
                # a radicand zero and poison the integrator stages
                stop = edge + sgn * 1e-7 * (1.0 + abs(edge))

                def ev(t, y, stop=stop, ix=ix):
                    return y[ix] - stop

                ev.terminal = True
                events.append(ev)
                edges.append((ix, stop, sgn))
    return rhs, events, edges


def integrate(
    system,
    s0: PhaseState,
    t_end: float,
    rel_tol: float = 1e-10,
    n_samples: int = 1000,
) -> Trajectory:
    """Integrate Hamilton's equations from ``s0`` to ``t_end``.

    ``system`` is a 1D :class:`PotentialBranch` (or the :class:`AxisSystem`
    that wraps one) or a :class:`Hamiltonian2D`.  Dense output is sampled at
    ``max(n_samples, 1000)`` uniform times.  Raises :class:`DomainExitError`
    when the trajectory reaches a potential domain edge and
    :class:`StiffnessError` on integrator failure.
    """
    if isinstance(system, AxisSystem):
        system = system.branch
    rhs, events, edges = _rhs_and_events(system)
    branches = (
        (system.axis1.branch, system.axis2.branch)
        if isinstance(system, Hamiltonian2D)
        else (system,)
    )
    for branch, ix in zip(branches, (0, 2)):
        if not branch.contains(s0.coords[ix]):
            raise DomainError(
                f"initial x={s0.coords[ix]} outside domain of {branch.provenance}"
            )
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        s0.coords,
        method="DOP853",
        rtol=rel_tol,
        atol=1e-2 * rel_tol,
        dense_output=True,
        events=events,
    )
    if sol.status == 1:
        exit_time = min(float(te[0]) for te in sol.t_events if len(te))
        raise DomainExitError(
            f"trajectory reached a potential domain edge at t={exit_time:.6g}",
            exit_time=exit_time,
        )
    if not sol.success:
        # step collapse right at a domain edge is an exit, not stiffness
        y_last = sol.y[:, -1] if sol.y.size else s0.coords
        for ix, stop, sgn in edges:
            if sgn * (y_last[ix] - stop) < 1e-3 * (1.0 + abs(stop)):
                raise DomainExitError(
                    f"trajectory reached a potential domain edge at "
                    f"t={sol.t[-1]:.6g}",
                    exit_time=float(sol.t[-1]),
                )
        raise StiffnessError(f"integration failed: {sol.message}")

    times = np.linspace(0.0, t_end, max(n_samples, 1000) + 1)
    coords = sol.sol(times).T

    conserved = {}
    if isinstance(system, Hamiltonian2D):
        sts = [PhaseState.from_coords(c) for c in coords]
        conserved["H"] = np.array([system.h(s) for s in sts])
        conserved["K"] = np.array([system.k(s) for s in sts])
    else:
        conserved["H"] = np.array(
            [0.5 * c[1] ** 2 + float(system.v(c[0])) for c in coords]
        )
    drift = {
        key: float(np.max(np.abs(series - series[0])) / (1.0 + abs(series[0])))
        for key, series in conserved.items()
    }
    return Trajectory(
        times=times,
        coords=coords,
        conserved=conserved,
        drift=drift,
        dense=lambda t: sol.sol(t),
    )


def conservation_report(traj: Trajectory, ints: IntegralSet) -> dict:
    """Max relative drift of H, K, J1, J2 along the trajectory.

    Also attaches the evaluated series and drifts to the trajectory.
    """
    sts = traj.states()
    for key, obs in ints.named().items():
        series = np.array([float(np.real(obs(s))) for s in sts])
        traj.conserved[key] = series
        traj.drift[key] = float(
            np.max(np.abs(series - series[0])) / (1.0 + abs(series[0]))
        )
    return dict(traj.drift)


# ---------------------------------------------------------------------------
# algebraic trajectories
# ---------------------------------------------------------------------------


def algebraic_trajectory(
    branch: PotentialBranch,
    pair: LadderPair,
    s0: PhaseState,
    t_grid: Sequence[float],
) -> list:
    """Reconstruct x(t), p(t) from the conserved pair (H, arg A_lower).

    At each time the 2x2 system H(x, p) = E, arg A_lower(x, p) =
    arg A_lower(s0) - omega t is solved by a damped Newton iteration warm
    started from the previous instant.  |A_lower| stays equal to
    sqrt(Q(E)) automatically -- the caller can check it, it is never
    imposed.
    """
    A = pair.lowering
    omega = pair.omega
    x0, p0 = s0.x(), s0.p()
    E = 0.5 * p0 * p0 + float(branch.v(x0))
    a0 = A.value(x0, p0)
    if abs(a0) < 1e-12:
        raise EvaluationFailure(
            "A_lower vanishes at the initial state; the phase is undefined",
            component="algebraic trajectory",
        )
    theta0 = cmath.phase(a0)
    scale_a = abs(a0)

    def residual(x, p, t):
        ph = cmath.exp(-1j * (theta0 - omega * t))
        rotated = A.value(x, p) * ph
        return np.array(
            [0.5 * p * p + float(branch.v(x)) - E, rotated.imag / scale_a]
        ), rotated.real

    out = []
    x, p = x0, p0
    for t in t_grid:
        converged = False
        res = None
        for _ in range(60):
            res, re_part = residual(x, p, t)
            if np.max(np.abs(res)) < 1e-12 * (1.0 + abs(E)) and re_part > 0:
                converged = True
                break
            h = 1e-7
            jac = np.empty((2, 2))
            jac[:, 0] = (residual(x + h, p, t)[0] - residual(x - h, p, t)[0]) / (2 * h)
            jac[:, 1] = (residual(x, p + h, t)[0] - residual(x, p - h, t)[0]) / (2 * h)
            try:
                step = np.linalg.solve(jac, res)
            except np.linalg.LinAlgError:
                break
            # keep steps bounded through turning points
            cap = 0.25 * (1.0 + max(abs(x), abs(p)))
            norm = float(np.max(np.abs(step)))
            if norm > cap:
                step *= cap / norm
            x, p = x - step[0], p - step[1]
        if not converged:
            raise EvaluationFailure(
                f"phase reconstruction failed at t={t:.6g} "
                f"(residual {np.max(np.abs(res)) if res is not None else math.nan:.3e})",
                component="algebraic trajectory",
            )
        out.append(PhaseState((x,), (p,)))
    return out


# ---------------------------------------------------------------------------
# closure detection
# ---------------------------------------------------------------------------


def closure_detect(traj: Trajectory, tol: float = 1e-6) -> tuple:
    """Earliest return time and phase-space distance to the initial state.

    Scans the dense output for local minima of |state(t) - state(0)|,
    refines the best candidates by golden-section search, and returns
    (t*, distance) for the earliest refined minimum below ``10 * tol``;
    if none qualifies, returns the globally best (t*, distance) found, so
    a closure distance above ``tol`` signals a non-closed orbit.
    """
    s0 = traj.coords[0]
    evaluate = traj.dense
    if evaluate is None:
        raise ValueError("closure detection requires dense output")

    def dist(t):
        return float(np.linalg.norm(np.asarray(evaluate(t)) - s0))

    times = np.linspace(traj.times[0], traj.times[-1], 8 * len(traj.times))
    d = np.array([dist(t) for t in times])
    # ignore the trivial minimum at t=0: start once the state has left the
    # neighborhood of s0
    threshold = 0.25 * d.max()
    start = int(np.argmax(d > threshold))
    if start == 0 and d[0] > threshold:
        start = 1

    candidates = []
    for i in range(max(start, 1), len(times) - 1):
        if d[i] <= d[i - 1] and d[i] <= d[i + 1]:
            res = minimize_scalar(
                dist,
                bracket=None,
                bounds=(times[i - 1], times[i + 1]),
                method="bounded",
                options={"xatol": 1e-12 * max(1.0, times[-1])},
            )
            candidates.append((float(res.x), float(res.fun)))
    if not candidates:
        return None, float(d[start:].min()) if start < len(d) else math.inf
    closed = [c for c in candidates if c[1] < 10.0 * tol]
    if closed:
        t_star, dist_star = min(closed, key=lambda c: c[0])
    else:
        t_star, dist_star = min(candidates, key=lambda c: c[1])
    traj.period_estimate = t_star
    traj.closure_distance = dist_star
    return t_star, dist_star
