"""Command-line interface: build families, verify, simulate, emit figures.

Exit codes: 0 success/pass, 1 verification failure, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import families, figures, svgplot
from .dynamics import closure_detect, conservation_report, integrate
from .errors import (
    InconsistentInputError,
    LadderLabError,
    NotALadderError,
    SignResolutionError,
)
from .phase import PhaseState
from .potentials import PotentialBranch, RootSet
from .superint import compose, conservation_bracket_check, resonance_integers, sample_states_2d
from .verify import verify_family

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


def read_config(path: str) -> dict:
    """Parse a plain-text ``key = value`` config file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


def _config_argv(path: str) -> list:
    """Config entries as flag tokens, prepended so command-line flags win."""
    tokens = []
    for key, val in read_config(path).items():
        tokens += ["--" + key.replace("_", "-"), val]
    return tokens


def _parse_roots(text: str) -> tuple:
    try:
        roots = tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"roots must be comma-separated numbers, got {text!r}")
    return roots


def _parse_range(text: str) -> tuple:
    try:
        lo, hi = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise ValueError(f"range must look like 'lo:hi', got {text!r}")
    if not hi > lo:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


def _parse_state(text: str) -> PhaseState:
    vals = tuple(float(tok) for tok in text.split(","))
    if len(vals) not in (2, 4):
        raise ValueError(f"state must be 'x1,p1' or 'x1,p1,x2,p2', got {text!r}")
    return PhaseState(vals[0::2], vals[1::2])


# ---------------------------------------------------------------------------
# family construction from parsed flags
# ---------------------------------------------------------------------------


def _tabulated_branch(path: str) -> PotentialBranch:
    """Interpolated potential branch from a CSV with an ``x,V[,dV]`` header."""
    from scipy.interpolate import CubicSpline

    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or "x" not in data.dtype.names or "V" not in data.dtype.names:
        raise ValueError(f"{path}: expected CSV columns x,V[,dV]")
    xs = np.asarray(data["x"], dtype=float)
    vs = np.asarray(data["V"], dtype=float)
    order = np.argsort(xs)
    spline = CubicSpline(xs[order], vs[order])
    return PotentialBranch(
        v_fn=spline,
        dv_fn=spline.derivative(),
        domain=((float(xs.min()), float(xs.max())),),
        provenance="tabulated",
        params={"source": str(path)},
    )


def _root_set_from_args(args) -> RootSet:
    if args.roots is not None:
        return RootSet(args.order, _parse_roots(args.roots), args.omega)
    if args.eps2 is None:
        raise ValueError("need either --roots or --variant/--eps2")
    if args.order == 3:
        from .potentials import double_root_set

        return double_root_set(args.eps2, args.omega)
    from .potentials import triple_root_set

    return triple_root_set(args.eps2, args.omega)


def _branches_from_args(args, x_grid) -> tuple:
    """(branches, root set) for the 1D family named by the parsed flags."""
    if args.variant is not None:
        if args.eps2 is None:
            raise ValueError("--variant requires --eps2")
        branch, rs = families.closed_form_family(
            args.order, args.variant, args.omega, args.eps2, args.sign
        )
        return [branch], rs
    if args.roots is not None:
        return families.continuation_family(
            args.order, _parse_roots(args.roots), args.omega, x_grid
        )
    raise ValueError("need either --variant/--eps2 or --roots")


def _axis_from_suffixed(args, suffix: str):
    omega = getattr(args, f"omega{suffix}")
    order = getattr(args, f"order{suffix}")
    if omega is None:
        raise ValueError(f"--omega{suffix} is required")
    if order == 1:
        return families.make_axis(1, omega)
    variant = getattr(args, f"variant{suffix}")
    eps2 = getattr(args, f"eps2_{suffix}")
    sign = getattr(args, f"sign{suffix}")
    if variant is None or eps2 is None:
        raise ValueError(
            f"axis {suffix}: orders 3 and 4 need --variant{suffix} and --eps2-{suffix}"
        )
    return families.make_axis(order, omega, variant=variant, eps2=eps2, sign=sign)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve_potential(args) -> int:
    lo, hi = _parse_range(args.x_range)
    x_grid = np.linspace(lo, hi, args.samples)
    branches, rs = _branches_from_args(args, x_grid)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = [f"order {rs.order} roots {rs.roots} omega {rs.omega}"]
    for i, branch in enumerate(branches, start=1):
        csv_path = out / f"branch_{i:02d}.csv"
        branch.write_csv(csv_path, x_grid)
        xs, vs, _ = branch.sample(x_grid)
        if xs.size:
            figures.potential_png(
                out / f"branch_{i:02d}.png", xs, vs, title=f"branch {i:02d}"
            )
        intervals = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in branch.domain)
        summary.append(
            f"branch {i:02d}: provenance={branch.provenance} domain={intervals}"
            f" samples={xs.size} file={csv_path.name}"
        )
    (out / "branches.txt").write_text("\n".join(summary) + "\n")
    print("\n".join(summary))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.potential_csv is not None:
        branch = _tabulated_branch(args.potential_csv)
        rs = _root_set_from_args(args)
        branches = [branch]
        tabulated = True
    else:
        lo, hi = _parse_range(args.x_range)
        branches, rs = _branches_from_args(args, np.linspace(lo, hi, args.samples))
        tabulated = False

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    all_passed = True
    for i, branch in enumerate(branches, start=1):
        try:
            pair = families.build_pair(branch, rs)
        except (InconsistentInputError, SignResolutionError, NotALadderError) as exc:
            # a potential that cannot carry the ladder structure at all
            print(f"branch {i:02d}: FAIL ({exc})", file=sys.stderr)
            (out / f"report_{i:02d}.txt").write_text(f"build failed: {exc}\n")
            all_passed = False
            if not tabulated:
                return EXIT_NUMERICAL
            continue
        report = verify_family(branch, pair, rs, n_states=args.states, seed=args.seed)
        report.write_csv(out / f"report_{i:02d}.csv")
        text = report.to_text()
        (out / f"report_{i:02d}.txt").write_text(text + "\n")
        print(f"branch {i:02d}:")
        print(text)
        all_passed = all_passed and report.passed
    return EXIT_OK if all_passed else EXIT_FAIL


def _simulate_2d(h2d, s0, t_end, rel_tol, n_samples, out_dir, stem, annotation):
    """Integrate one 2D system and write CSV + SVG + PNG + stats line."""
    ints = h2d.integral_set()
    traj = integrate(h2d, s0, t_end, rel_tol=rel_tol, n_samples=n_samples)
    drifts = conservation_report(traj, ints)
    period, dist = closure_detect(traj, tol=1e-6)

    out_dir.mkdir(parents=True, exist_ok=True)
    traj.write_csv(out_dir / f"{stem}.csv")
    xs, ys = traj.coords[:, 0], traj.coords[:, 2]
    svgplot.write_curve(
        out_dir / f"{stem}.svg",
        xs,
        ys,
        title=stem,
        annotation=annotation,
    )
    figures.trajectory_png(out_dir / f"{stem}.png", xs, ys, title=stem)
    stats = (
        f"{stem}: period={period:.9g} closure={dist:.3g} "
        + " ".join(f"drift[{k}]={v:.3g}" for k, v in drifts.items())
    )
    print(stats)
    return traj, period, dist, stats


def cmd_simulate(args) -> int:
    axis1 = _axis_from_suffixed(args, "1")
    axis2 = _axis_from_suffixed(args, "2")
    if args.m1 is not None and args.m2 is not None:
        m1, m2 = args.m1, args.m2
    else:
        m1, m2 = resonance_integers(axis1.omega, axis2.omega)
    h2d = compose(axis1, axis2, m1, m2)

    # cheap precondition: the composed integrals must actually commute with H
    rng = np.random.default_rng(0)
    states = sample_states_2d(h2d, 20, rng)
    checks = conservation_bracket_check(h2d, states)
    worst = max(checks.values())
    if worst > 1e-6:
        print(f"composed system fails bracket check (max {worst:.3g})", file=sys.stderr)
        return EXIT_FAIL

    s0 = _parse_state(args.s0)
    if s0.dim != 2:
        raise ValueError("simulate needs a 2D state 'x1,p1,x2,p2'")
    annotation = (
        f"w1={axis1.omega:g} w2={axis2.omega:g} m=({m1},{m2}) "
        f"s0=({args.s0}) t=[0,{args.t_end:g}]"
    )
    _simulate_2d(
        h2d,
        s0,
        args.t_end,
        args.rel_tol,
        args.n_samples,
        Path(args.out_dir),
        args.stem,
        annotation,
    )
    return EXIT_OK


#: hard-coded figure reproduction parameters: order-4 deformed potentials on
#: both axes, resonance 1:2, the published initial state, both signs.
FIGURE_PARAMS = {
    "fig1": 1,
    "fig2": -1,
}


def cmd_reproduce_figures(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sidecar = []
    for stem, sign in FIGURE_PARAMS.items():
        axis1 = families.make_axis(4, 1.0, variant="deformed", eps2=4.0, sign=sign)
        axis2 = families.make_axis(4, 2.0, variant="deformed", eps2=16.0, sign=sign)
        h2d = compose(axis1, axis2, 2, 1)
        s0 = PhaseState((1.0, 1.0), (1.0, -3.0))
        annotation = (
            f"order-4 deformed, sign={sign:+d}, w1=1 w2=2, eps2=(4,16), "
            "s0=(1,1,1,-3), t=[0,20]"
        )
        _, period, dist, stats = _simulate_2d(
            h2d, s0, 20.0, 1e-10, 4000, out_dir, stem, annotation
        )
        sidecar.append(stats)
    (out_dir / "figures.txt").write_text("\n".join(sidecar) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_family_flags(sp):
    sp.add_argument("--order", type=int, choices=(3, 4), required=True)
    sp.add_argument("--variant", choices=("harmonic", "deformed", "rational"))
    sp.add_argument("--eps2", type=float)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)
    sp.add_argument("--roots", help="comma-separated zero-mode energies")
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--x-range", default="-3:3", help="grid extent as lo:hi")
    sp.add_argument("--samples", type=int, default=601)


def _add_axis_flags(sp, suffix):
    sp.add_argument(f"--order{suffix}", type=int, choices=(1, 3, 4), default=1)
    sp.add_argument(f"--variant{suffix}", choices=("harmonic", "deformed", "rational"))
    sp.add_argument(f"--eps2-{suffix}", type=float, dest=f"eps2_{suffix}")
    sp.add_argument(f"--sign{suffix}", type=int, choices=(1, -1), default=1)
    sp.add_argument(f"--omega{suffix}", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ladderlab",
        description="Classical ladder-operator families, verification, and dynamics.",
    )
    parser.add_argument("--config", help="key = value config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-potential", help="tabulate family branches to CSV")
    _add_family_flags(sp)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_solve_potential)

    sp = sub.add_parser("verify", help="run the residual suite on a family")
    _add_family_flags(sp)
    sp.add_argument("--potential-csv", help="tabulated x,V CSV to verify instead")
    sp.add_argument("--states", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="integrate a composed 2D system")
    _add_axis_flags(sp, "1")
    _add_axis_flags(sp, "2")
    sp.add_argument("--m1", type=int)
    sp.add_argument("--m2", type=int)
    sp.add_argument("--s0", default="1,1,1,-3", help="initial state x1,p1,x2,p2")
    sp.add_argument("--t-end", type=float, default=20.0)
    sp.add_argument("--rel-tol", type=float, default=1e-10)
    sp.add_argument("--n-samples", type=int, default=2000)
    sp.add_argument("--stem", default="trajectory", help="output file stem")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reproduce-figures", help="emit fig1.svg and fig2.svg")
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(func=cmd_reproduce_figures)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)

    # splice config-file values in front of the explicit flags so that
    # anything given on the command line wins
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            print("--config needs a path", file=sys.stderr)
            return EXIT_USAGE
        path = argv[idx + 1]
        rest = argv[:idx] + argv[idx + 2 :]
        try:
            extra = _config_argv(path)
        except (OSError, ValueError) as exc:
            print(f"bad config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        head = rest[:1] if rest and not rest[0].startswith("-") else []
        argv = head + extra + rest[len(head) :]

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK

    try:
        return args.func(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LadderLabError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
