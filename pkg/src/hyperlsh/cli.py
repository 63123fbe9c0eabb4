"""Command-line front end: ``hyperlsh gen|rho|index build|index query|validate``.

Results go to standard output or the ``--out`` file; diagnostics go to
standard error.  Exit codes: 0 success, 1 usage error, 2 data error,
3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .ann_index import LshIndex
from .experiments import (
    ExperimentConfig,
    InsufficientPairs,
    csv_rows,
    rho_curve,
    sample_uniform_ball,
    split_seed,
    to_csv,
)
from .geometry import DomainError, halfspace_to_poincare, poincare_to_halfspace
from .lsh2d import choose_radius
from .validate import SUITES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VALIDATION = 3

logger = logging.getLogger("hyperlsh")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- point files --------------------------------------------------------


def points_to_jsonl(points: np.ndarray, model: str) -> str:
    lines = [json.dumps({"id": i, "model": model, "coords": row.tolist()}) for i, row in enumerate(points)]
    return "".join(line + "\n" for line in lines)


def read_points(path: str) -> tuple[np.ndarray, str]:
    """Parse a JSONL point file into an ``(n, d)`` array ordered by id, plus its model."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            records.append((int(rec["id"]), rec["model"], [float(v) for v in rec["coords"]]))
        except (ValueError, KeyError, TypeError) as exc:
            raise DataError(f"{path}:{lineno}: malformed point record ({exc})") from None
    if not records:
        raise DataError(f"{path}: no point records")
    models = {m for _, m, _ in records}
    dims = {len(c) for _, _, c in records}
    if len(models) != 1 or len(dims) != 1:
        raise DataError(f"{path}: records mix models or dimensions")
    model = models.pop()
    if model not in ("ball", "halfspace"):
        raise DataError(f"{path}: unknown model {model!r}")
    records.sort(key=lambda rec: rec[0])
    if [rec[0] for rec in records] != list(range(len(records))):
        raise DataError(f"{path}: ids must be 0..n-1")
    points = np.array([c for _, _, c in records], dtype=np.float64)
    if points.shape[1] < 2:
        raise DataError(f"{path}: points need at least 2 coordinates")
    return points, model


def _write(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror}") from None


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.replace("[", "").replace("]", "").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers") from None
    if not vals:
        raise UsageError(f"{what} is empty")
    return vals


# -- commands -----------------------------------------------------------


def cmd_gen(args) -> int:
    if args.d < 2 or args.n < 0 or not args.radius > 0:
        raise UsageError("need --d >= 2, --n >= 0 and --radius > 0")
    data_rng, _ = split_seed(args.seed)
    pts = sample_uniform_ball(args.d, args.radius, args.n, data_rng)
    if args.model == "halfspace":
        pts = poincare_to_halfspace(pts).reshape(args.n, args.d)
    _write(args.out, points_to_jsonl(pts, args.model))
    logger.info("wrote %d points", args.n)
    return EXIT_OK


def cmd_rho(args) -> int:
    points, model = read_points(args.data)
    ball = points if model == "ball" else halfspace_to_poincare(points)
    radius = args.radius if args.radius is not None else choose_radius(ball)
    config = ExperimentConfig(
        d=ball.shape[1],
        n=len(ball),
        R_hyp=radius,
        r=args.r,
        c_grid=tuple(_parse_floats(args.c_grid, "--c-grid")),
        reps=args.reps,
        seed=args.seed,
    )
    results = rho_curve(config, boundary=args.boundary, points=ball)
    for c, res in zip(config.c_grid, results):
        if isinstance(res, InsufficientPairs):
            logger.warning("c=%g: insufficient pairs (near=%d, far=%d)", c, res.n_near, res.n_far)
    _write(args.out, to_csv(csv_rows(config, results)))
    return EXIT_OK


def cmd_index_build(args) -> int:
    if (args.K is None) != (args.L is None):
        raise UsageError("--K and --L must be given together")
    points, model = read_points(args.data)
    overrides = (args.K, args.L) if args.K is not None else None
    index = LshIndex.build(points, args.r, args.c, np.random.default_rng(args.seed), model=model, overrides=overrides)
    logger.info("built index K=%d L=%d over %d points", index.params.K, index.params.L, len(points))
    _write(args.out, index.dumps())
    return EXIT_OK


def cmd_index_query(args) -> int:
    try:
        index = LshIndex.loads(Path(args.index).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {args.index}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"{args.index}: malformed index ({exc})") from None
    q = np.array(_parse_floats(args.point, "--point"))
    res = index.query(q, args.budget)
    print("none" if res is None else f"{res[0]},{res[1]!r}")
    return EXIT_OK


def cmd_validate(args) -> int:
    names = SUITES if args.which == "all" else (args.which,)
    ok = True
    for name in names:
        for check in run_suite(name):
            print(check.line())
            ok &= check.passed
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperlsh", description="Locality-sensitive hashing in hyperbolic space.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample points uniformly from a hyperbolic ball")
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--radius", type=float, default=math.log(199.0), help="hyperbolic radius (default ln 199)")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--model", choices=("ball", "halfspace"), default="ball")
    gen.add_argument("--out", default="-")
    gen.set_defaults(func=cmd_gen)

    rho = sub.add_parser("rho", help="estimate p1, p2 and rho over a grid of c")
    rho.add_argument("--data", required=True)
    rho.add_argument("--r", type=float, required=True)
    rho.add_argument("--c-grid", required=True, help="comma-separated approximation factors")
    rho.add_argument("--reps", type=int, default=1000)
    rho.add_argument("--seed", type=int, required=True)
    rho.add_argument("--radius", type=float, help="hashing radius (default: covers the data)")
    rho.add_argument("--boundary", action="store_true", help="use pairs in [0.9r, r] and [cr, 1.1cr]")
    rho.add_argument("--out", default="-")
    rho.set_defaults(func=cmd_rho)

    index = sub.add_parser("index", help="build or query an ANN index")
    isub = index.add_subparsers(dest="index_command", required=True)
    build = isub.add_parser("build")
    build.add_argument("--data", required=True)
    build.add_argument("--r", type=float, required=True)
    build.add_argument("--c", type=float, required=True)
    build.add_argument("--seed", type=int, required=True)
    build.add_argument("--K", type=int)
    build.add_argument("--L", type=int)
    build.add_argument("--out", required=True)
    build.set_defaults(func=cmd_index_build)
    query = isub.add_parser("query")
    query.add_argument("--index", required=True)
    query.add_argument("--point", required=True, help="comma-separated coordinates in the index's model")
    query.add_argument("--budget", type=int)
    query.set_defaults(func=cmd_index_query)

    val = sub.add_parser("validate", help="run a numerical invariant suite")
    val.add_argument("which", choices=SUITES + ("all",))
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hyperlsh: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DomainError) as exc:
        print(f"hyperlsh: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
