"""Command-line interface.

Usage::

    convexwidth analyze BODY.json
    convexwidth profile BODY.json --samples 4096 --seed 42
    convexwidth verify BODY.json --pairs 100000 [--metric euclid-min]
    convexwidth ekmap BODY.json --bounds -2 2 -2 2 --nx 64 --ny 64
    convexwidth continuity BODY.json --boundary-samples 300
    convexwidth paper-examples

Exit status is 0 on success, 1 when a bound or example check fails, and 2
for any input error (unreadable or invalid body, bad flag, wrong dimension).
"""

import argparse
import io
import json
import sys

import numpy as np

from . import __version__
from .bodies import Ball, BodyError, Polytope, load_body
from .geometry import sample_directions
from .harness import sup_delta_estimate, verify_bounds
from .metrics import body_stats, hat_constants, profile
from .point_diameter import boundary_points, continuity_check, ek_grid, grid_csv
from .reference import paper_examples

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2

# names accepted by --tol NAME=VALUE; both default to 1e-9 * delta
#   violation   additive slack in the Lipschitz bound checks
#   continuity  gap below which e(O) counts as the farthest distance from O
TOLERANCES = ("violation", "continuity")


class InputError(Exception):
    pass


def _fmt(x):
    return f"{float(x):.17g}"


def _finite(x):
    """Replace NaN and infinities (not valid JSON) by None, recursively."""
    if isinstance(x, float):
        return x if np.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    if isinstance(x, (np.ndarray, np.generic)):
        return _finite(x.tolist())
    return x


def _dump_json(doc):
    return json.dumps(_finite(doc), indent=2, allow_nan=False) + "\n"


def _parse_tol(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    if name not in TOLERANCES:
        raise argparse.ArgumentTypeError(f"unknown tolerance {name!r}; choose from {', '.join(TOLERANCES)}")
    try:
        val = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {name} needs a number, got {value!r}") from None
    if not np.isfinite(val) or val < 0:
        raise argparse.ArgumentTypeError(f"tolerance {name} must be finite and >= 0")
    return name, val


def _positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return n


def _tolerances(args, delta):
    tol = {name: 1e-9 * delta for name in TOLERANCES}
    tol.update(dict(args.tol))
    return tol


def _meta(command, args, tolerances):
    return {
        "command": command,
        "tool_version": __version__,
        "seed": args.seed,
        "tolerances": tolerances,
    }


def _load(args):
    try:
        return load_body(args.body)
    except OSError as exc:
        raise InputError(f"cannot read {args.body}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise InputError(f"{args.body} is not UTF-8 text") from exc


def _require_planar(body, command):
    if body.dim != 2:
        raise InputError(f"{command} needs a planar body, got dimension {body.dim}")


def _csv(header, rows):
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(x if isinstance(x, str) else _fmt(x) for x in row) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------- commands


def cmd_analyze(args):
    body = _load(args)
    stats = body_stats(body)
    hat = hat_constants(body, resolution=args.samples, seed=args.seed)
    doc = _meta("analyze", args, _tolerances(args, stats.delta))
    doc.update({
        "body": body.kind,
        "dim": body.dim,
        "delta": stats.delta,
        "omega": stats.omega,
        "M": stats.M,
        "N": stats.N,
        "M_hat": hat.M_hat,
        "N_hat": hat.N_hat,
        "N_hat_generic": hat.N_hat_generic,
        "hat_exact": hat.exact,
        "omega_direction": stats.omega_direction,
        "diameter_chord": [stats.diameter_chord[0], stats.diameter_chord[1]],
    })
    if args.format == "csv":
        keys = ["delta", "omega", "M", "N", "M_hat", "N_hat", "N_hat_generic"]
        return _csv(["quantity", "value"], [(k, _fmt(doc[k])) for k in keys]), EXIT_OK
    return _dump_json(doc), EXIT_OK


def cmd_profile(args):
    body = _load(args)
    U = sample_directions(body.dim, args.samples, args.seed)
    table = profile(body, U)
    header = [f"u_{i + 1}" for i in range(body.dim)] + ["w", "d", "s", "p", "r", "q"]
    if args.format == "json":
        doc = _meta("profile", args, _tolerances(args, body_stats(body).delta))
        doc.update({"columns": header, "rows": np.column_stack([U, table])})
        return _dump_json(doc), EXIT_OK
    return _csv(header, np.column_stack([U, table])), EXIT_OK


def cmd_verify(args):
    body = _load(args)
    delta = body_stats(body).delta
    tol = _tolerances(args, delta)
    report = verify_bounds(body, pairs=args.pairs, seed=args.seed, tol=tol["violation"], metric=args.metric,
                           body_id=args.body, hat_resolution=args.samples)
    report.sup_delta_w = sup_delta_estimate(body, "width", seed=args.seed)
    report.sup_delta_d = sup_delta_estimate(body, "diameter", seed=args.seed)
    report.tolerances = {**report.tolerances, **tol}
    code = EXIT_OK if report.ok else EXIT_VIOLATION
    doc = report.to_dict()
    if args.format == "csv":
        rows = [(k, _fmt(doc[k])) for k in ("max_delta_w", "max_delta_d", "M", "N", "M_hat", "N_hat")]
        rows += [(f"violations_{k}", str(v)) for k, v in doc["violations"].items()]
        return _csv(["quantity", "value"], rows), code
    return _dump_json(doc), code


def _default_bounds(body):
    E = np.eye(2)
    hi = body.support_values(E)
    lo = -body.support_values(-E)
    pad = 0.5 * (hi - lo)
    return [lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1]]


def cmd_ekmap(args):
    body = _load(args)
    _require_planar(body, "ekmap")
    bounds = args.bounds if args.bounds is not None else _default_bounds(body)
    if not (bounds[1] > bounds[0] and bounds[3] > bounds[2]):
        raise InputError("--bounds must enclose a positive area (x0 < x1, y0 < y1)")
    if args.nx < 2 or args.ny < 2:
        raise InputError("--nx and --ny must be at least 2")
    xs, ys, table = ek_grid(body, bounds, args.nx, args.ny)
    if args.format == "json":
        doc = _meta("ekmap", args, _tolerances(args, body_stats(body).delta))
        doc.update({"bounds": [float(b) for b in bounds], "x": xs, "y": ys, "e": table})
        return _dump_json(doc), EXIT_OK
    return grid_csv(xs, ys, table), EXIT_OK


def cmd_continuity(args):
    body = _load(args)
    _require_planar(body, "continuity")
    if not isinstance(body, (Polytope, Ball)):
        raise InputError("continuity needs a polygon or a disc")
    tol = _tolerances(args, body_stats(body).delta)
    verdicts = [continuity_check(body, O, tol["continuity"]) for O in boundary_points(body, args.boundary_samples)]
    rows = [(v.O[0], v.O[1], "1" if v.continuous else "0", v.e_value, v.farthest_value, v.gap) for v in verdicts]
    if args.format == "csv":
        return _csv(["x", "y", "continuous", "e", "farthest", "gap"], rows), EXIT_OK
    doc = _meta("continuity", args, tol)
    doc.update({
        "boundary_samples": args.boundary_samples,
        "continuous_count": sum(v.continuous for v in verdicts),
        "points": [{"O": v.O, "continuous": bool(v.continuous), "e": v.e_value,
                    "farthest": v.farthest_value, "gap": v.gap} for v in verdicts],
    })
    return _dump_json(doc), EXIT_OK


def cmd_paper_examples(args):
    rows = paper_examples(seed=args.seed)
    code = EXIT_OK if all(r.passed for r in rows) else EXIT_VIOLATION
    if args.format == "csv":
        table = [(r.name, _fmt(r.computed), _fmt(r.expected), _fmt(r.deviation), _fmt(r.tolerance),
                  "pass" if r.passed else "fail") for r in rows]
        return _csv(["example", "computed", "expected", "deviation", "tolerance", "result"], table), code
    doc = _meta("paper-examples", args, {r.name: r.tolerance for r in rows})
    doc["rows"] = [r.to_dict() for r in rows]
    return _dump_json(doc), code


COMMANDS = {
    "analyze": (cmd_analyze, "json", "diameter, thickness and all Lipschitz constants"),
    "profile": (cmd_profile, "csv", "w, d, s, p, r, q on seeded directions"),
    "verify": (cmd_verify, "json", "sample pairs and check the Lipschitz bounds"),
    "ekmap": (cmd_ekmap, "csv", "point-diameter values on a planar grid"),
    "continuity": (cmd_continuity, "json", "classify continuity of e at boundary points"),
    "paper-examples": (cmd_paper_examples, "json", "recompute the worked examples"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--samples", type=_positive_int, default=4096,
                        help="sampled directions for profile and hat constants (default 4096)")
    common.add_argument("--pairs", type=_positive_int, default=100_000, help="pairs for verify (default 100000)")
    common.add_argument("--metric", choices=["rho", "euclid-min"], default="rho",
                        help="denominator of the difference quotients; euclid-min only reports")
    common.add_argument("--tol", type=_parse_tol, action="append", default=[], metavar="NAME=VALUE",
                        help=f"override a tolerance; NAME in {{{', '.join(TOLERANCES)}}}")
    common.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], help="output format")

    parser = argparse.ArgumentParser(prog="convexwidth", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name != "paper-examples":
            p.add_argument("body", help="body description (JSON)")
        if name == "ekmap":
            p.add_argument("--bounds", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
            p.add_argument("--nx", type=int, default=64)
            p.add_argument("--ny", type=int, default=64)
        if name == "continuity":
            p.add_argument("--boundary-samples", type=_positive_int, default=300)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on bad flags
    func, default_format, _ = COMMANDS[args.command]
    if args.format is None:
        args.format = default_format
    try:
        text, code = func(args)
    except (InputError, BodyError) as exc:
        print(f"convexwidth {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError) as exc:
        print(f"convexwidth {args.command}: cannot process input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"convexwidth {args.command}: cannot write {args.output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
