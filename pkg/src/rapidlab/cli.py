"""Command-line front end: ``rapidlab {derive,characterize,pipeline,bench-jpeg}``.

Results go to stdout (or ``--out``); progress and status lines go to stderr.
Exit codes: 0 success, 2 usage error, 3 data or plan error, 4 invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import appbench, charlab, pipeline, rapidscheme
from .mitchell import DivUnit, MulUnit, QuotientOverflow
from .wordcore import ConfigurationError

EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 2, 3, 4

UNITS = ("mitchell-mul", "mitchell-div", "rapid-mul", "rapid-div", "exact-mul", "exact-div")
DEFAULT_SCHEME = {"mul": "RAPID-10-mul", "div": "RAPID-9-div"}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class InvariantError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rapidlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, unit=True):
        if unit:
            sp.add_argument("--unit", choices=UNITS, default="mitchell-mul")
            sp.add_argument("--scheme", action="append",
                            help="scheme name or file (repeat to sweep; rapid units only)")
            sp.add_argument("--width", type=int, default=8,
                            help="multiplier width, or divisor width N of a 2N/N divider")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--threads", type=int, default=1)

    d = sub.add_parser("derive", help="derive a scheme and write its JSON file")
    d.add_argument("--scheme", required=True, choices=rapidscheme.SCHEME_NAMES)
    d.add_argument("--out")

    c = sub.add_parser("characterize", help="ARE / PRE / bias of a unit")
    common(c)
    mode = c.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--monte-carlo", type=int, metavar="N")
    c.add_argument("--seed", type=int)
    c.add_argument("--format", choices=("csv", "json"), default="csv")

    pl = sub.add_parser("pipeline", help="stream operand pairs through a pipelined unit")
    common(pl)
    pl.add_argument("--stages", type=int, default=2, choices=(1, 2, 3, 4))
    src = pl.add_mutually_exclusive_group()
    src.add_argument("--input", help="CSV of operand pairs (a,b); '-' for stdin")
    src.add_argument("--monte-carlo", type=int, metavar="N", help="N random valid pairs instead of --input")
    pl.add_argument("--seed", type=int)
    pl.add_argument("--check", action="store_true", help="compare with the combinational unit")
    pl.add_argument("--format", choices=("csv",), default="csv")

    b = sub.add_parser("bench-jpeg", help="PSNR of the JPEG-style codec under arithmetic profiles")
    b.add_argument("images", nargs="+", help="8-bit binary PGM files")
    b.add_argument("--profile", action="append", choices=tuple(appbench.PROFILES),
                   help="repeatable; default: exact and rapid")
    b.add_argument("--quality", type=int, default=50)
    b.add_argument("--out")
    b.add_argument("--format", choices=("json",), default="json")
    b.add_argument("--threads", type=int, default=1)
    return p


# --- helpers ------------------------------------------------------------------


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e
    with fh:
        yield fh


def _build_units(args) -> list:
    family, kind = args.unit.split("-")
    cls = MulUnit if kind == "mul" else DivUnit
    if family != "rapid" and args.scheme:
        raise UsageError("--scheme applies to rapid-* units only")
    try:
        if family == "exact":
            return [charlab.ExactUnit(kind, args.width)]
        if family == "mitchell":
            return [cls(args.width)]
        names = args.scheme or [DEFAULT_SCHEME[kind]]
        return [cls(args.width, rapidscheme.resolve_scheme(n)) for n in names]
    except ConfigurationError as e:
        raise UsageError(str(e)) from e
    except (rapidscheme.SchemeError, OSError) as e:
        raise DataError(str(e)) from e


def _progress(label):
    def report(done, total):
        if total >= 64 and (done * 10 // total != (done - 1) * 10 // total or done == total):
            print(f"{label}: {done}/{total} chunks", file=sys.stderr, flush=True)
    return report


def _random_pairs(unit, n: int, seed: int):
    return charlab.sample_pairs(unit, np.random.default_rng(seed), n)


def _read_pairs(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    a, b = [], []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        if lineno == 1 and not row[0].strip().isdigit():
            continue  # header
        if len(row) != 2:
            raise DataError(f"{path}:{lineno}: expected two operands, got {len(row)} fields")
        try:
            x, y = int(row[0]), int(row[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: operands must be nonnegative integers") from None
        if x < 0 or y < 0:
            raise DataError(f"{path}:{lineno}: operands must be nonnegative integers")
        a.append(x)
        b.append(y)
    return np.array(a, dtype=np.uint64), np.array(b, dtype=np.uint64)


# --- subcommands ----------------------------------------------------------------


def cmd_derive(args) -> int:
    text = rapidscheme.dumps_scheme(rapidscheme.derive_scheme(args.scheme))
    with _output(args.out) as fh:
        fh.write(text)
    return 0


def cmd_characterize(args) -> int:
    if args.exhaustive and args.seed is not None:
        raise UsageError("--seed only applies to --monte-carlo")
    if args.monte_carlo is not None and args.seed is None:
        raise UsageError("--monte-carlo needs --seed")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    units = _build_units(args)
    try:
        plan = (charlab.SamplingPlan.exhaustive() if args.exhaustive
                else charlab.SamplingPlan.monte_carlo(args.monte_carlo, args.seed))
        reports = [charlab.characterize(u, plan, args.threads, _progress(u.name)) for u in units]
    except charlab.PlanError as e:
        raise DataError(str(e)) from e
    text = charlab.to_csv(reports) if args.format == "csv" else charlab.to_json(reports)
    with _output(args.out) as fh:
        fh.write(text)
    return 0


def cmd_pipeline(args) -> int:
    units = _build_units(args)
    if len(units) != 1:
        raise UsageError("pipeline takes a single --scheme")
    unit = units[0]
    if isinstance(unit, charlab.ExactUnit):
        raise UsageError("pipeline models the approximate datapath; choose a mitchell-* or rapid-* unit")
    if args.monte_carlo is not None:
        if args.seed is None:
            raise UsageError("--monte-carlo needs --seed")
        a, b = _random_pairs(unit, args.monte_carlo, args.seed)
    elif args.input is not None:
        if args.seed is not None:
            raise UsageError("--seed only applies to --monte-carlo")
        a, b = _read_pairs(args.input)
    else:
        raise UsageError("pipeline needs --input or --monte-carlo")
    pu = pipeline.make_pipeline(unit, pipeline.PipelinePlan.canonical(unit.kind, args.stages), trace=True)
    try:
        results = pipeline.stream(pu, zip(a.tolist(), b.tolist()))
    except (QuotientOverflow, ZeroDivisionError, ValueError) as e:
        raise DataError(f"rejected operand pair at cycle {pu.cycle}: {e}") from e
    with _output(args.out) as fh:
        pipeline.write_trace(pu.trace, fh)
    if args.check:
        expected = unit.evaluate(a, b) if a.size else np.zeros(0, dtype=np.uint64)
        got = np.array([r for _, r in results], dtype=np.uint64)
        latency = all(c == i + pu.stages for i, (c, _) in enumerate(results))
        if got.size != a.size or np.any(got != expected) or not latency:
            print("status: MISMATCH", file=sys.stderr)
            raise InvariantError("pipelined outputs differ from the combinational unit")
        print(f"status: equivalent ({a.size} pairs, latency {pu.stages}, interval 1)", file=sys.stderr)
    return 0


def cmd_bench_jpeg(args) -> int:
    if not 1 <= args.quality <= 100:
        raise UsageError("--quality must be in 1..100")
    profiles = args.profile or ["exact", "rapid"]
    q = appbench.quality_table(args.quality)
    rows = []
    for path in args.images:
        try:
            img = appbench.read_pgm(path)
        except appbench.ImageError as e:
            raise DataError(str(e)) from e
        _, base = appbench.run_codec(img, q, appbench.exact_profile())
        for name in profiles:
            profile = appbench.get_profile(name)
            _, rep = appbench.run_codec(img, q, profile, baseline_psnr=base.psnr)
            rows.append(appbench.report_json(Path(path).name, profile.name, args.quality, rep))
    with _output(args.out) as fh:
        fh.write(appbench.dumps_reports(rows))
    return 0


COMMANDS = {
    "derive": cmd_derive,
    "characterize": cmd_characterize,
    "pipeline": cmd_pipeline,
    "bench-jpeg": cmd_bench_jpeg,
}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"rapidlab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"rapidlab: error: {e}", file=sys.stderr)
        return EXIT_DATA
    except InvariantError as e:
        print(f"rapidlab: invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
