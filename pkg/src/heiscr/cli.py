"""Command-line front end: ``heiscr {verify,eval,kelvin,movesphere,list-checks}``.

Exit codes: 0 on success, 1 when a check or a moving-spheres centre fails,
2 on usage, configuration or field-spec errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import (
    BracketError,
    ConfigurationError,
    EqualityError,
    HeisError,
    MonotonicityError,
    ParseError,
)
from .fields import ScalarField, kelvin, parse_field_spec
from .hgroup import HPoint
from .movesphere import SphereConfig, moving_spheres_demo, reports_to_csv, reports_to_json
from .verify import default_suite, registered_checks, report_json, run_suite

__all__ = ["format_point", "main", "parse_point"]

SEED_ENV = "HEISCR_SEED"


def parse_point(s: str, n: int) -> HPoint:
    """Parse ``x1,..,xn,y1,..,yn,t`` into a point of H^n."""
    tokens = s.split(",")
    if len(tokens) != 2 * n + 1:
        raise ParseError(
            f"point {s!r}: expected {2 * n + 1} comma-separated values for n={n}, "
            f"got {len(tokens)}")
    coords = []
    for pos, tok in enumerate(tokens, start=1):
        try:
            coords.append(float(tok))
        except ValueError:
            raise ParseError(f"point {s!r}: value {pos} ({tok.strip()!r}) is not a number") from None
    if not np.all(np.isfinite(coords)):
        raise ParseError(f"point {s!r}: coordinates must be finite")
    return HPoint.from_coords(np.array(coords))


def format_point(a: HPoint) -> str:
    """Inverse of :func:`parse_point`; ``repr`` floats round-trip exactly."""
    return ",".join(repr(float(c)) for c in a.coords())


def _load_field(text: str) -> ScalarField:
    if text.lstrip().startswith("{"):
        return parse_field_spec(text)
    try:
        return parse_field_spec(Path(text).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read field spec file {text!r}: {exc.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${SEED_ENV} or 42)")
    common.add_argument("--n", type=int, default=None, help="dimension of H^n")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="heiscr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the identity checks")
    p.add_argument("--tol", type=float, default=None, help="override every tolerance")
    p.add_argument("--check", action="append", default=None,
                   help="run only this check (repeatable)")
    p.add_argument("--timings", action="store_true", help="record runtime_ms")

    p = sub.add_parser("eval", parents=[common], help="evaluate a field at a point")
    p.add_argument("--field", required=True, help="field spec: inline JSON or a file path")
    p.add_argument("--point", required=True)

    p = sub.add_parser("kelvin", parents=[common], help="evaluate a Kelvin transform")
    p.add_argument("--field", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)

    p = sub.add_parser("movesphere", parents=[common], help="run moving spheres over centres")
    p.add_argument("--field", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--xi", action="append", default=None,
                   help="centre (repeatable; default: the origin)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--lambda-min", type=float, default=1e-2)
    p.add_argument("--lambda-max", type=float, default=1e2)

    sub.add_parser("list-checks", parents=[common], help="list registered checks")
    return parser


def _dimension(args, field: ScalarField) -> int:
    if args.n is not None and args.n != field.n:
        raise ParseError(f"--n {args.n} disagrees with the field dimension {field.n}")
    return field.n


def _run(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.command == "list-checks":
        checks = registered_checks()
        width = max(len(name) for name, _ in checks)
        _write("".join(f"{name:<{width}}  {anchor}\n" for name, anchor in checks), args.out)
        return 0
    if args.command == "verify":
        if args.format != "json":
            raise ParseError("verify reports are JSON only")
        suite = default_suite(seed, args.tol)
        if args.check:
            by_name = {s.name: s for s in suite}
            suite = [by_name.get(nm) or _unknown(nm) for nm in args.check]
        results = run_suite(suite, timings=args.timings)
        _write(report_json(results), args.out)
        return 0 if all(r.passed for r in results) else 1
    field = _load_field(args.field)
    n = _dimension(args, field)
    if args.command == "eval":
        _write(f"{float(field(parse_point(args.point, n)))!r}\n", args.out)
        return 0
    if args.command == "kelvin":
        value = kelvin(field, parse_point(args.xi, n), args.lam, args.beta,
                       parse_point(args.point, n))
        _write(f"{float(value)!r}\n", args.out)
        return 0
    grid = [parse_point(s, n) for s in (args.xi or [format_point(HPoint.origin(n))])]
    cfg = SphereConfig(lambda_min=args.lambda_min, lambda_max=args.lambda_max,
                       samples=args.samples, seed=seed)
    render = reports_to_json if args.format == "json" else reports_to_csv
    try:
        reports = moving_spheres_demo(field, args.beta, grid, cfg)
    except BracketError as exc:
        _write(render(getattr(exc, "reports", [])), args.out)
        print(f"heiscr: {exc}", file=sys.stderr)
        return 1
    except (EqualityError, MonotonicityError) as exc:
        print(f"heiscr: {exc}", file=sys.stderr)
        return 1
    _write(render(reports), args.out)
    return 0


def _unknown(name: str):
    raise ConfigurationError(f"unknown check: {name}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except HeisError as exc:
        print(f"heiscr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
