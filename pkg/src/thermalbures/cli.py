"""Command-line front end.

Usage examples::

    thermalbures fidelity --beta1 0.6931 --beta2 0.6931 --p2 1.7321 --q2 1.7321
    thermalbures geometry --beta 1.5668 --format json
    thermalbures trajectory --pure0 --p0 1 --omega 1 --gdown 0.75 --gup 0.25 --tmax 5 --steps 51
    thermalbures sweep --variable beta --start 0.1 --stop 10 --steps 100
    thermalbures verify --dim 12

Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from typing import Iterable, Sequence

import numpy as np

from . import dynamics, geometry, states, verify
from .errors import DomainError

FIDELITY_FIELDS = ("beta1", "p1", "q1", "beta2", "p2", "q2", "P", "D_B")
GEOMETRY_FIELDS = ("beta", "g_pp", "g_qq", "g_bb", "dv", "R")
TRAJECTORY_FIELDS = ("t", "p", "q", "beta", "speed", "thermal_speed")
STATE_SWEEP_FIELDS = ("beta", "p", "q", "P", "D_B", "g_pp", "g_qq", "g_bb", "dv", "R")


class CliError(Exception):
    """Domain problem reported to the user with exit code 1."""


def _fmt(x):
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(float(x), ".12g")
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        return float(format(float(x), ".12g")) if math.isfinite(x) else None
    return x


def write_records(records: Iterable[dict], fields: Sequence[str], fmt: str, stream) -> None:
    """Write records as CSV (header + rows) or JSON lines.

    Non-finite values become ``inf`` in CSV. In JSON they become ``null`` with a
    companion ``<field>_divergent`` (or ``pure_limit`` for ``beta``) flag.
    """
    if fmt == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow([_fmt(rec[f]) for f in fields])
        return
    for rec in records:
        out = {}
        for f in fields:
            v = rec[f]
            out[f] = _json_value(v)
            if isinstance(v, float) and math.isinf(v):
                out["pure_limit" if f.startswith("beta") else f + "_divergent"] = True
        stream.write(json.dumps(out) + "\n")


def _state(beta, p, q, pure, flag):
    if pure:
        return states.DisplacedThermalState.coherent(p, q)
    if beta is None:
        raise CliError(f"{flag} is required unless the matching --pure flag is given")
    try:
        return states.DisplacedThermalState(beta, p, q)
    except DomainError as exc:
        raise CliError(f"{flag}: {exc}") from None


def _params(args):
    try:
        return dynamics.DampedOscillatorParams(args.omega, args.gdown, args.gup)
    except DomainError as exc:
        raise CliError(f"--omega/--gdown/--gup: {exc}") from None


def _geometry_record(beta):
    try:
        m = geometry.metric_at(beta)
    except DomainError as exc:
        raise CliError(f"--beta: {exc}") from None
    return {"beta": beta, "g_pp": m.g_pp, "g_qq": m.g_qq, "g_bb": m.g_bb,
            "dv": geometry.volume_element(beta), "R": geometry.scalar_curvature(beta)}


def _trajectory_record(sample: dynamics.TrajectorySample):
    return {"t": sample.t, "p": sample.p, "q": sample.q, "beta": sample.beta,
            "speed": sample.speed, "thermal_speed": sample.thermal_speed}


def cmd_fidelity(args, out):
    s1 = _state(args.beta1, args.p1, args.q1, args.pure1, "--beta1")
    s2 = _state(args.beta2, args.p2, args.q2, args.pure2, "--beta2")
    rec = {"beta1": s1.beta, "p1": s1.p, "q1": s1.q,
           "beta2": s2.beta, "p2": s2.p, "q2": s2.q,
           "P": states.transition_probability(s1, s2),
           "D_B": states.bures_distance(s1, s2)}
    write_records([rec], FIDELITY_FIELDS, args.format, out)
    return 0


def cmd_geometry(args, out):
    write_records([_geometry_record(args.beta)], GEOMETRY_FIELDS, args.format, out)
    return 0


def _times(start, stop, steps, flag="--steps"):
    if steps < 2:
        raise CliError(f"{flag} must be at least 2")
    if not stop > start:
        raise CliError(f"stop ({stop:g}) must exceed start ({start:g})")
    return np.linspace(start, stop, steps)


def cmd_trajectory(args, out):
    initial = _state(args.beta0, args.p0, args.q0, args.pure0, "--beta0")
    params = _params(args)
    times = _times(0.0, args.tmax, args.steps)
    rows = (_trajectory_record(s) for s in dynamics.trajectory(initial, params, times))
    write_records(rows, TRAJECTORY_FIELDS, args.format, out)
    return 0


def _parse_fixed(pairs):
    fixed = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--set expects key=value, got {item!r}")
        try:
            fixed[key.strip()] = float(value)
        except ValueError:
            raise CliError(f"--set {key}: not a number: {value!r}") from None
    return fixed


_STATE_KEYS = {"beta", "p", "q", "ref_beta", "ref_p", "ref_q"}
_DYNAMICS_KEYS = {"beta0", "p0", "q0", "omega", "gdown", "gup"}


def cmd_sweep(args, out):
    """Sweep one variable; ``beta``/``p``/``q`` sweep a state, ``t`` a trajectory."""
    fixed = _parse_fixed(args.set)
    grid = _times(args.start, args.stop, args.steps)
    if args.variable == "t":
        unknown = set(fixed) - _DYNAMICS_KEYS
        if unknown:
            raise CliError(f"--set: unknown key(s) for a t sweep: {', '.join(sorted(unknown))}")
        if args.start < 0:
            raise CliError("--start must be non-negative for a t sweep")
        beta0 = fixed.get("beta0", 2.0)
        initial = _state(None if math.isinf(beta0) else beta0, fixed.get("p0", 1.0),
                         fixed.get("q0", 1.0), math.isinf(beta0), "--set beta0")
        try:
            params = dynamics.DampedOscillatorParams(
                fixed.get("omega", 1.0), fixed.get("gdown", 0.75), fixed.get("gup", 0.25))
        except DomainError as exc:
            raise CliError(f"--set omega/gdown/gup: {exc}") from None
        rows = (_trajectory_record(s) for s in dynamics.trajectory(initial, params, grid))
        write_records(rows, TRAJECTORY_FIELDS, args.format, out)
        return 0

    unknown = set(fixed) - _STATE_KEYS
    if unknown:
        raise CliError(f"--set: unknown key(s) for a state sweep: {', '.join(sorted(unknown))}")
    base = {"beta": 1.0, "p": 0.0, "q": 0.0}
    base.update({k: v for k, v in fixed.items() if k in base})
    ref = _state(fixed.get("ref_beta", base["beta"]), fixed.get("ref_p", 0.0),
                 fixed.get("ref_q", 0.0), False, "--set ref_beta")

    def rows():
        for value in grid:
            point = dict(base, **{args.variable: float(value)})
            s = _state(point["beta"], point["p"], point["q"], False, "--start/--stop")
            rec = {"beta": s.beta, "p": s.p, "q": s.q,
                   "P": states.transition_probability(ref, s),
                   "D_B": states.bures_distance(ref, s)}
            rec.update(_geometry_record(s.beta))
            yield rec

    records = list(rows())  # validate the whole grid before writing anything
    write_records(records, STATE_SWEEP_FIELDS, args.format, out)
    return 0


def cmd_verify(args, out):
    results = verify.run_all(dim=args.dim, grid_size=args.grid_size, tol=args.tol)
    for r in results:
        if args.format == "json":
            out.write(json.dumps({"suite": r.name, "max_deviation": r.max_deviation,
                                  "tolerance": r.tolerance, "passed": r.passed,
                                  "worst_point": r.worst_point, "notes": r.notes}) + "\n")
        else:
            out.write(r.summary() + "\n")
            for note in r.notes:
                out.write(f"  note: {note}\n")
    ok = all(r.passed for r in results)
    if args.format != "json":
        out.write("all suites passed\n" if ok else "verification FAILED\n")
    return 0 if ok else 1


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS,
                        help="output format (default csv)")
    common.add_argument("--out", default=argparse.SUPPRESS, metavar="FILE",
                        help="write output to FILE instead of stdout")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="accepted for harness compatibility; has no effect")

    parser = argparse.ArgumentParser(
        prog="thermalbures", parents=[common],
        description="Bures geometry of displaced thermal oscillator states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", parents=[common], help="transition probability and Bures distance")
    for i in (1, 2):
        p.add_argument(f"--beta{i}", type=float)
        p.add_argument(f"--p{i}", type=float, default=0.0)
        p.add_argument(f"--q{i}", type=float, default=0.0)
        p.add_argument(f"--pure{i}", action="store_true", help=f"state {i} is a coherent state")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("geometry", parents=[common], help="metric, volume element and curvature")
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("trajectory", parents=[common], help="damped-oscillator trajectory and speed")
    p.add_argument("--beta0", type=float)
    p.add_argument("--pure0", action="store_true")
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--gdown", type=float, required=True)
    p.add_argument("--gup", type=float, default=0.0)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, default=101)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("sweep", parents=[common], help="sweep one parameter over a grid")
    p.add_argument("--variable", choices=("beta", "p", "q", "t"), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="fix another parameter (beta, p, q, ref_beta, ref_p, ref_q; "
                        "or beta0, p0, q0, omega, gdown, gup for t)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="compare closed forms with the Fock oracle")
    p.add_argument("--dim", type=_positive_int, default=80)
    p.add_argument("--grid-size", type=_positive_int, default=None)
    p.add_argument("--tol", type=float, default=None, help="fidelity tolerance (default 1e-6)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = getattr(args, "format", "csv")
    out_path = getattr(args, "out", None)
    try:
        with contextlib.ExitStack() as stack:
            out = sys.stdout
            if out_path:
                out = stack.enter_context(open(out_path, "w", encoding="utf-8", newline=""))
            return args.func(args, out)
    except (CliError, DomainError) as exc:
        print(f"thermalbures {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
