"""``gnp-extremes`` command-line front end.

Subcommands ``bounds``, ``rate``, ``oracle``, ``simulate`` and ``baseline``
emit CSV (tables) or JSON (nested reports).  Every output carries a run
manifest; rerunning with the same manifest reproduces it byte for byte.
Wall-clock duration and the thread count do not affect the numbers, so they
go to stderr and, with ``--out``, to a ``PATH.manifest.json`` sidecar.

Exit status: 0 success, 1 usage error, 2 precondition failure or refusal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import time
from typing import Sequence

from . import __version__, experiments
from .errors import DomainError, PreconditionError
from .oracle import MAX_VERTICES

SCHEMA_VERSION = 1
TOOL = "gnp-extremes"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUSED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for refusals here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_value(text: str) -> int:
    value = float(text)
    if not math.isfinite(value) or value != int(value):
        raise ValueError(text)
    return int(value)


def _list(kind):
    def parse(text: str):
        try:
            return [kind(part) for part in text.split(",") if part.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
    return parse


def _schema(command: str) -> str:
    return f"{TOOL}.{command}/{SCHEMA_VERSION}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL, description="Extreme degrees of G(n, p): bounds, "
                     "exact oracle and Monte Carlo experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    edge = common.add_mutually_exclusive_group()
    edge.add_argument("--p", type=float, default=None, help="edge probability (default 0.5)")
    edge.add_argument("--p-schedule", default=None, metavar="EXPR",
                      help="edge probability as a function of n, e.g. 'n^-0.25' or '0.5*n^-0.1'")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, metavar="PATH", help="write here instead of stdout")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads (a hint; results do not depend on it)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_bounds = sub.add_parser("bounds", parents=[common], help="closed-form bound table")
    p_bounds.add_argument("--n", type=_list(_int_value), required=True)
    p_bounds.add_argument("--t", type=_list(float), default=list(experiments.DEFAULT_T_GRID))
    p_bounds.add_argument("--centering", choices=("n-1", "n", "both"), default="n-1",
                          help="degree centering: exact (n-1)p moments, np, or both")

    p_rate = sub.add_parser("rate", parents=[common], help="convergence-rate table")
    p_rate.add_argument("--n", type=_list(_int_value), default=list(experiments.DEFAULT_RATE_NS))
    p_rate.add_argument("--t", type=float, default=0.0)

    p_oracle = sub.add_parser("oracle", parents=[common], help="exhaustive small-n checks")
    p_oracle.add_argument("--n", type=_list(_int_value), required=True)
    p_oracle.add_argument("--y", type=_list(float), default=None,
                          help="thresholds (default -0.5, 0.5, ..., n-0.5)")

    for name, help_text in (("simulate", "Monte Carlo on G(n, p)"),
                            ("baseline", "Monte Carlo on i.i.d. standard normals")):
        p_sim = sub.add_parser(name, parents=[common], help=help_text)
        p_sim.add_argument("--n", type=_list(_int_value), required=True)
        p_sim.add_argument("--t", type=_list(float), default=list(experiments.DEFAULT_T_GRID))
        p_sim.add_argument("--m", type=_list(_int_value), default=list(experiments.DEFAULT_M_GRID))
        p_sim.add_argument("--trials", type=_int_value, default=1000)
        p_sim.add_argument("--seed", type=_int_value, default=0)
    return parser


# -- formatting -------------------------------------------------------------

def _clean(value):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else "nan"
    return str(value)


def render_csv(rows: Sequence[dict], manifest: dict, footer: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {manifest['schema']}\n")
    buf.write(f"# manifest: {json.dumps(manifest, sort_keys=True)}\n")
    columns: list[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(col, "")) for col in columns])
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def render_json(body: dict, manifest: dict) -> str:
    return json.dumps(_clean({"manifest": manifest, **body}), indent=2) + "\n"


# -- subcommands ------------------------------------------------------------

def _edge_args(args) -> tuple[float | None, object]:
    if args.p_schedule is not None:
        return None, experiments.parse_schedule(args.p_schedule)
    return args.p, None


def _single_n(args) -> int:
    if len(args.n) != 1:
        raise UsageError(f"{args.command} takes a single --n value")
    return args.n[0]


def _params(args) -> dict:
    skip = {"command", "format", "out", "threads"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def run_command(args) -> tuple[str, dict]:
    """Execute a parsed command; returns ``(text, manifest)``."""
    fmt = args.format
    if args.command == "baseline":
        args.p = args.p_schedule = None
    elif args.p is None and args.p_schedule is None:
        args.p = 0.5
    p, schedule = _edge_args(args)
    manifest = {
        "tool": TOOL,
        "version": __version__,
        "schema": _schema(args.command),
        "subcommand": args.command,
        "params": _params(args),
        "seed": getattr(args, "seed", None),
    }
    if args.command == "bounds":
        centerings = ("n-1", "n") if args.centering == "both" else (args.centering,)
        rows = experiments.bounds_rows(args.n, args.t, p, schedule, centerings)
        return _table(rows, manifest, fmt or "csv"), manifest
    if args.command == "rate":
        ns = list(args.n)
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise UsageError("--n must be strictly increasing for rate")
        rows = experiments.rate_rows(ns, args.t, p, schedule)
        trend = experiments.rate_trend(rows)
        if (fmt or "csv") == "json":
            return render_json({"rows": rows, "trend": trend}, manifest), manifest
        footer = [] if trend is None else [
            f"trend {col}: first={v['first']!r} last={v['last']!r} improves={_cell(v['improves'])}"
            for col, v in trend.items()]
        return render_csv(rows, manifest, footer), manifest
    if args.command == "oracle":
        if p is None:
            raise UsageError("oracle needs a fixed --p")
        for n in args.n:
            if n > MAX_VERTICES:
                raise PreconditionError(
                    f"oracle refuses n = {n}: exhaustive enumeration is capped at "
                    f"n = {MAX_VERTICES} (2^{n * (n - 1) // 2} graphs)")
        rows = [row for n in args.n for row in experiments.oracle_rows(n, p, args.y)]
        return _table(rows, manifest, fmt or "csv"), manifest
    n = _single_n(args)
    if args.command == "simulate":
        pn = experiments.edge_prob(n, p, schedule)
        manifest["params"]["p_value"] = pn
        report = experiments.simulate_report(n, pn, args.t, args.m, args.trials, args.seed,
                                             workers=max(1, args.threads))
    else:
        report = experiments.baseline_report(n, args.t, args.m, args.trials, args.seed,
                                             workers=max(1, args.threads))
    if (fmt or "json") == "json":
        return render_json(report, manifest), manifest
    return render_csv(experiments.extremes_rows(report), manifest), manifest


def _table(rows, manifest, fmt) -> str:
    if fmt == "json":
        return render_json({"rows": rows}, manifest)
    return render_csv(rows, manifest)


_NEGATIVE = re.compile(r"^-\.?\d")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--t -1,0,1`` as ``--t=-1,0,1`` so argparse does not see a flag."""
    out: list[str] = []
    tokens = list(argv)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(tokens)
                and _NEGATIVE.match(tokens[i + 1])):
            out.append(f"{tok}={tokens[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    start = time.perf_counter()
    try:
        text, manifest = run_command(args)
    except (UsageError, DomainError) as exc:
        print(f"{TOOL} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"{TOOL} {args.command}: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    duration = time.perf_counter() - start
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        sidecar = {**manifest, "threads": args.threads, "duration_s": duration}
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(_clean(sidecar), fh, indent=2)
            fh.write("\n")
    print(f"{TOOL} {args.command}: done in {duration:.3f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
