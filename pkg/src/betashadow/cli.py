"""Command-line front end.

Every verb prints one JSON object (or CSV with ``--format csv``) and exits
0 on success, 1 when a checked property fails, 2 on invalid input and 3
when a resource cap is hit.  Errors are reported as a single-line JSON
object ``{"error": ..., "message": ..., "exit_code": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ShadowingError
from .expansions import coding, expansion_target, reconstruct, truncation_bound
from .maps import BetaParams, PiecewiseAffineMap, beta_map, beta_params_of
from .numeric import UNCERTAIN, format_number, parse_number
from .orbits import DEFAULT_MAX_DEPTH, DEFAULT_MAX_PIECES, iterate, parse_points, validate_pseudo_orbit
from .renorm import DEFAULT_TOL, SWEEP_COLUMNS, is_transitive, renormalize, sweep, theorem_b_witness
from .shadowing import NOT_SHADOWED, SHADOWED, check_shadowing, grid_shadow_oracle
from .witness import theorem_a_witness

VERBS = ("map-info", "iterate", "validate", "shadow-check", "witness", "renormalize", "expand", "sweep")


class UsageError(ShadowingError):
    """Bad command line (exit 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _verdict(v) -> str:
    return "uncertain" if v is UNCERTAIN else str(bool(v)).lower()


# -- argument handling -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--beta")
    common.add_argument("--alpha")
    common.add_argument("--map", type=Path, help="JSON file with a general piecewise affine map")
    common.add_argument("--backend", choices=("rational", "float"), default="rational")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", type=Path)
    common.add_argument("--epsilon")
    common.add_argument("--delta")
    common.add_argument("--x")
    common.add_argument("--n", type=int)
    common.add_argument("--length", type=int)
    common.add_argument("--orbit", help="comma-separated points")
    common.add_argument("--grid", type=int, help="sweep resolution per axis")
    common.add_argument("--samples", type=int, default=0, help="grid oracle sample count")
    common.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    common.add_argument("--max-pieces", type=int, default=DEFAULT_MAX_PIECES)
    common.add_argument("--tolerance", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--beta-min", default="1.05")
    common.add_argument("--beta-max", default="1.4")

    parser = _Parser(prog="betashadow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in VERBS:
        sub.add_parser(verb, parents=[common])
    return parser


def _exact(args) -> bool:
    return args.backend == "rational"


def _num(args, text, name):
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        return parse_number(text, _exact(args))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--{name}: cannot parse {text!r}") from exc


def _params(args) -> BetaParams:
    return BetaParams(_num(args, args.beta, "beta"), _num(args, args.alpha, "alpha"))


def _map(args) -> PiecewiseAffineMap:
    if args.map is not None:
        if args.beta is not None or args.alpha is not None:
            raise UsageError("give either --map or --beta/--alpha, not both")
        try:
            data = json.loads(args.map.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read map file: {exc}") from exc
        return PiecewiseAffineMap.from_json(data, _exact(args))
    return beta_map(_params(args))


def _orbit(args):
    if not args.orbit:
        raise UsageError("--orbit is required")
    try:
        return parse_points(args.orbit, _exact(args))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--orbit: {exc}") from exc


def _tolerance(args, default):
    return default if args.tolerance is None else float(args.tolerance)


# -- verbs ---------------------------------------------------------------------------


def cmd_map_info(args):
    fmap = _map(args)
    out = {
        "map": fmap.to_json(),
        "cell_lengths": [format_number(v) for v in fmap.cell_lengths()],
        "jumps": [format_number(v) for v in fmap.jumps()],
        "max_abs_slope": format_number(fmap.max_abs_slope()),
        "transitive": _verdict(is_transitive(fmap, _tolerance(args, DEFAULT_TOL))),
    }
    params = beta_params_of(fmap)
    if params is not None:
        out["params"] = params.to_json()
    return out, 0


def cmd_iterate(args):
    fmap = _map(args)
    steps = args.n if args.n is not None else args.length
    if steps is None:
        raise UsageError("--n is required")
    orbit = iterate(fmap, _num(args, args.x, "x"), steps)
    return {"points": [format_number(p) for p in orbit.points]}, 0


def cmd_validate(args):
    fmap = _map(args)
    report = validate_pseudo_orbit(fmap, _orbit(args), _num(args, args.delta, "delta"))
    return report.to_json(), 0 if report.valid is True else 1


def cmd_shadow_check(args):
    fmap = _map(args)
    points = _orbit(args)
    epsilon = _num(args, args.epsilon, "epsilon")
    report = check_shadowing(fmap, points, epsilon, args.max_pieces)
    out = report.to_json()
    code = 0 if report.status in (SHADOWED, NOT_SHADOWED) else 1
    if args.samples:
        hit = grid_shadow_oracle(fmap, points, epsilon, args.samples)
        out["grid_oracle"] = None if hit is None else repr(hit)
        if hit is not None and report.status == NOT_SHADOWED:
            code = 1
    return out, code


def cmd_witness(args):
    epsilon = _num(args, args.epsilon, "epsilon")
    delta = None if args.delta is None else _num(args, args.delta, "delta")
    if args.map is not None:
        fmap = _map(args)
        trace = theorem_a_witness(fmap, epsilon, delta, max_depth=args.max_depth)
    else:
        params = _params(args)
        fmap = beta_map(params)
        trace = theorem_b_witness(params, epsilon, delta, max_depth=args.max_depth)
    out = trace.to_json()
    gaps = validate_pseudo_orbit(fmap, trace.pseudo.points, trace.delta)
    out["validate"] = gaps.to_json()
    code = 0 if trace.report.status == NOT_SHADOWED and gaps.valid is True else 1
    if args.samples:
        hit = grid_shadow_oracle(fmap, trace.pseudo, epsilon, args.samples)
        out["grid_oracle"] = None if hit is None else repr(hit)
        if hit is not None:
            code = 1
    return out, code


def cmd_renormalize(args):
    data = renormalize(_params(args), tol=_tolerance(args, 1e-9), seed=args.seed)
    return data.to_json(), 0


def cmd_expand(args):
    params = _params(args)
    N = args.n if args.n is not None else args.length
    if N is None:
        raise UsageError("--n is required")
    x = _num(args, args.x, "x")
    word = coding(params, x, N)
    value = reconstruct(word)
    error = abs(value - expansion_target(params, x))
    bound = truncation_bound(params, N)
    out = {
        **word.to_json(),
        "value": format_number(value),
        "error": format_number(error),
        "bound": format_number(bound),
    }
    return out, 0 if error <= bound else 1


def cmd_sweep(args):
    resolution = args.grid if args.grid is not None else 200
    tol = _tolerance(args, DEFAULT_TOL)
    rows = list(sweep(float(args.beta_min), float(args.beta_max), resolution, tol))
    return rows, 0


COMMANDS = {
    "map-info": cmd_map_info,
    "iterate": cmd_iterate,
    "validate": cmd_validate,
    "shadow-check": cmd_shadow_check,
    "witness": cmd_witness,
    "renormalize": cmd_renormalize,
    "expand": cmd_expand,
    "sweep": cmd_sweep,
}


# -- output ----------------------------------------------------------------------------


def _flatten(obj, prefix="") -> dict:
    flat = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        elif isinstance(value, list):
            flat[name] = ";".join("" if v is None else str(v) for v in value)
        else:
            flat[name] = "" if value is None else value
    return flat


def render(payload, fmt: str, verb: str) -> str:
    if fmt == "json":
        return json.dumps(payload) + "\n"
    buf = io.StringIO()
    if isinstance(payload, list):
        fields = list(SWEEP_COLUMNS) if verb == "sweep" else sorted({k for r in payload for k in r})
        rows = payload
    elif verb in ("iterate", "witness") and "points" in payload:
        fields = ["index", "x"]
        rows = [{"index": i, "x": x} for i, x in enumerate(payload["points"])]
    else:
        rows = [_flatten(payload)]
        fields = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def run(argv=None) -> int:
    """Parse ``argv``, execute the verb and return the exit status."""
    args = None
    try:
        args = build_parser().parse_args(argv)
        payload, code = COMMANDS[args.verb](args)
        fmt = args.format or ("csv" if args.verb == "sweep" else "json")
        _emit(render(payload, fmt, args.verb), args.out)
        return code
    except ShadowingError as exc:
        code = exc.exit_code
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        code = 2
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stdout.write(json.dumps(err) + "\n")
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
