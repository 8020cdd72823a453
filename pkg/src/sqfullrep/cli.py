"""Command line entry point: ``sqfullrep <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from decimal import Decimal, InvalidOperation

from . import asymptotics as asym
from .arith import compute_zeta_constants
from .campaign import CampaignConfig, ConfigError, emit_report, metadata, run_campaign
from .representation import (
    IntervalSpec,
    interval_sum_direct,
    interval_sum_rearranged,
    repr_sqfull,
    repr_truncated,
)
from .sieve import build_lambda_table, log_sum, primes_between
from .squarefull import (
    TruncationLevel,
    count_squarefull,
    decompose,
    iter_squarefull,
)


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Integers written plainly or as exact scientific notation (``1e9``)."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_grid(text: str) -> list[int]:
    return [parse_int(t) for t in text.split(",") if t.strip()]


class Output:
    def __init__(self, args):
        self.format = args.format
        self.path = args.out
        self._chunks: list[str] = []

    def write(self, text: str) -> None:
        self._chunks.append(text if text.endswith("\n") else text + "\n")

    def json(self, obj) -> None:
        self.write(json.dumps(obj))

    def rows(self, header, rows) -> None:
        if self.format == "json":
            self.json([dict(zip(header, r)) for r in rows])
            return
        lines = [",".join(header)] + [",".join(_fmt(v) for v in r) for r in rows]
        self.write("\n".join(lines))

    def flush(self) -> None:
        text = "".join(self._chunks)
        if self.path:
            try:
                with open(self.path, "w") as fh:
                    fh.write(text)
            except OSError as exc:
                raise OSError(f"cannot write output to {self.path}: {exc.strerror or exc}") from exc
        else:
            sys.stdout.write(text)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return "" if v is None else str(v)


def _trunc(args) -> TruncationLevel | None:
    return None if args.B is None else TruncationLevel(args.B)


# ---------------------------------------------------------------- commands


def cmd_constants(args, out: Output) -> int:
    c = compute_zeta_constants(args.precision_bits)
    d = c.as_dict()
    d["digits"] = c.digits
    out.json(d)
    return 0


def cmd_sieve(args, out: Output) -> int:
    if not 0 <= args.lo < args.hi <= 1 << 62:
        raise UsageError("need 0 <= lo < hi <= 2^62")
    width = 1 << 22
    if args.emit == "theta":
        total, bound = [], 0.0
        for a in range(args.lo, args.hi, width):
            v, e = log_sum(primes_between(a, min(a + width, args.hi)))
            total.append(v)
            bound += e
        out.json(math.fsum(total))
        return 0
    primes = []
    for a in range(args.lo, args.hi, width):
        primes.extend(primes_between(a, min(a + width, args.hi)).tolist())
    if args.format == "json":
        out.json(primes)
    else:
        out.write("\n".join(map(str, primes)) if primes else "")
    return 0


def cmd_squarefull(args, out: Output) -> int:
    header = ["f", "a", "b"]
    if args.action == "list":
        rows = [(d.f, d.a, d.b) for d in iter_squarefull(args.lo, args.hi, _trunc(args))]
        out.rows(header, rows)
    elif args.action == "count":
        out.json(count_squarefull(args.x, _trunc(args)))
    else:
        d = decompose(args.f)
        out.rows(header, [(d.f, d.a, d.b)])
    return 0


def cmd_repr(args, out: Output) -> int:
    trunc = _trunc(args)
    if args.N is not None:
        table = build_lambda_table(max(args.N - 1, 2))
        r = repr_sqfull(args.N, table) if trunc is None else repr_truncated(args.N, trunc, table)
        out.json({"N": args.N, "value": r.value, "term_count": r.term_count, "route_delta": None})
        return 0
    if args.X is None or args.H is None:
        raise UsageError("repr needs --N or both --X and --H")
    spec = IntervalSpec(args.X, args.H)
    results = {}
    if args.route in ("rearranged", "both"):
        results["rearranged"] = interval_sum_rearranged(spec, trunc, threads=args.threads)
    if args.route in ("direct", "both"):
        table = build_lambda_table(args.X + args.H)
        results["direct"] = interval_sum_direct(spec, trunc, table)
    first = results.get("rearranged") or results["direct"]
    delta = None
    if len(results) == 2:
        delta = abs(results["direct"].value - results["rearranged"].value) / abs(first.value)
    out.json({"value": first.value, "term_count": first.term_count, "route_delta": delta})
    return 0


_FIT_HEADER = ["x_or_X", "predicted", "actual", "abs_error", "rel_error", "error_normalizer"]


def _fit_rows(fits):
    return [tuple(getattr(f, k) for k in _FIT_HEADER) for f in fits]


def cmd_asym(args, out: Output) -> int:
    c = compute_zeta_constants()
    if args.action == "main-term":
        spec = IntervalSpec(args.X, args.H)
        out.json({"X": args.X, "H": args.H, "main_term": asym.main_term(spec, c),
                  "admissible": spec.admissible})
    elif args.action == "qx-fit":
        fits = asym.qx_fit(args.x_grid, c, args.variant)
        out.rows(_FIT_HEADER, _fit_rows(fits))
    elif args.action == "window-fit":
        H = args.H if args.H is not None else math.floor(args.x ** args.h_exponent)
        out.rows(_FIT_HEADER, _fit_rows([asym.window_fit(args.x, H, c)]))
    elif args.action == "sigma":
        spec = IntervalSpec(args.X, args.H)
        B = args.B if args.B is not None else math.log(args.X) ** 4
        sd = asym.sigma_decomposition(spec, TruncationLevel(B), threads=args.threads)
        mt = asym.main_term(spec, c)
        out.rows(["X", "H", "B", "sigma1", "sigma2", "main_term", "sigma1_over_main"],
                 [(args.X, args.H, B, sd.sigma1, sd.sigma2, mt, sd.sigma1 / mt)])
    else:
        seed = args.seed if args.seed is not None else 0
        mv = asym.mean_value_sample(args.X, args.H, args.samples, seed, threads=args.threads)
        d = asdict(mv)
        out.rows(list(d), [tuple(d.values())])
    return 0


def cmd_verify(args, out: Output) -> int:
    try:
        config = CampaignConfig(
            x_grid=tuple(args.x_grid), h_exponent=args.h_exponent,
            b_rule="log4" if args.B_rule == "log4" else "fixed",
            fixed_B=None if args.B_rule == "log4" else float(args.B_rule.split(":", 1)[1]),
            epsilon=args.epsilon, threads=args.threads, format=args.format,
            output_path=args.out,
        )
    except (IndexError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    rows = run_campaign(config)
    text = emit_report(rows, config.format, None)
    out.write(text)
    if args.metadata:
        print(json.dumps(metadata()), file=sys.stderr)
    return 1 if any(r.status != "ok" for r in rows) else 0


# ------------------------------------------------------------------ parser


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--threads", type=int, default=d(1), help="worker threads")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    parser.add_argument("--out", default=d(None), metavar="PATH", help="write output here")
    parser.add_argument("--seed", type=int, default=d(None))
    parser.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqfullrep",
        description="Prime + square-full representation counts and their asymptotics.",
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    p = add("constants", "zeta constants as JSON")
    p.add_argument("--precision-bits", type=int, default=128)
    p.set_defaults(func=cmd_constants)

    p = add("sieve", "primes or theta over (lo, hi]")
    p.add_argument("--lo", type=parse_int, required=True)
    p.add_argument("--hi", type=parse_int, required=True)
    p.add_argument("--emit", choices=("primes", "theta"), default="primes")
    p.set_defaults(func=cmd_sieve)

    p = add("squarefull", "list, count or decompose square-full numbers")
    ssub = p.add_subparsers(dest="action", required=True)
    q = ssub.add_parser("list")
    q.add_argument("--lo", type=parse_int, default=0)
    q.add_argument("--hi", type=parse_int, required=True)
    q.add_argument("--B", type=float)
    q = ssub.add_parser("count")
    q.add_argument("--x", type=parse_int, required=True)
    q.add_argument("--B", type=float)
    q = ssub.add_parser("decompose")
    q.add_argument("--f", type=parse_int, required=True)
    q.set_defaults(B=None)
    for q in ssub.choices.values():
        _global_flags(q, suppress=True)
    p.set_defaults(func=cmd_squarefull)

    p = add("repr", "representation function at N or summed over (X, X+H]")
    p.add_argument("--N", type=parse_int)
    p.add_argument("--X", type=parse_int)
    p.add_argument("--H", type=parse_int)
    p.add_argument("--B", type=float)
    p.add_argument("--route", choices=("direct", "rearranged", "both"), default="rearranged")
    p.set_defaults(func=cmd_repr)

    p = add("asym", "asymptotic predictions and measured residuals")
    asub = p.add_subparsers(dest="action", required=True)
    q = asub.add_parser("main-term")
    q.add_argument("--X", type=parse_int, required=True)
    q.add_argument("--H", type=parse_int, required=True)
    q = asub.add_parser("qx-fit")
    q.add_argument("--x-grid", type=parse_grid, default=[10 ** k for k in range(4, 11)])
    q.add_argument("--variant", choices=asym.SECOND_TERM_VARIANTS)
    q = asub.add_parser("window-fit")
    q.add_argument("--x", type=parse_int, required=True)
    q.add_argument("--H", type=parse_int)
    q.add_argument("--h-exponent", type=float, default=0.7)
    q = asub.add_parser("sigma")
    q.add_argument("--X", type=parse_int, required=True)
    q.add_argument("--H", type=parse_int, required=True)
    q.add_argument("--B", type=float)
    q = asub.add_parser("meanvalue")
    q.add_argument("--X", type=parse_int, required=True)
    q.add_argument("--H", type=parse_int, required=True)
    q.add_argument("--samples", type=int, default=100)
    for q in asub.choices.values():
        _global_flags(q, suppress=True)
    p.set_defaults(func=cmd_asym)

    p = add("verify", "run the main-term verification campaign")
    p.add_argument("--x-grid", type=parse_grid, required=True)
    p.add_argument("--h-exponent", type=float, default=0.55)
    p.add_argument("--B-rule", default="log4", help="log4 or fixed:<B>")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--metadata", action="store_true", help="print constants to stderr")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Output(args)
    try:
        code = args.func(args, out)
    except (ConfigError, UsageError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        out.flush()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
