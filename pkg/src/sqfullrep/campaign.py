"""Verification campaigns over a grid of X and their reports."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from .arith import compute_zeta_constants
from .asymptotics import calibrate_second_term, main_term
from .representation import IntervalSpec, interval_sum_direct, interval_sum_rearranged
from .sieve import build_lambda_table
from .squarefull import TruncationLevel

log = logging.getLogger(__name__)

SIG_DIGITS = 12
DIRECT_CHECK_LIMIT = 10 ** 7
ROUTE_TOLERANCE = 1e-9


class ConfigError(ValueError):
    pass


def round_sig(x: float | None, digits: int = SIG_DIGITS) -> float | None:
    if x is None or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


@dataclass(frozen=True)
class CampaignConfig:
    x_grid: tuple = ()
    h_exponent: float = 0.55
    b_rule: str = "log4"  # or "fixed"
    fixed_B: Optional[float] = None
    epsilon: float = 0.05
    threads: int = 1
    format: str = "csv"
    output_path: Optional[str] = None
    direct_check_limit: int = DIRECT_CHECK_LIMIT

    def __post_init__(self):
        if not 0 < self.h_exponent < 1:
            raise ConfigError(f"h_exponent must lie in (0, 1), got {self.h_exponent}")
        if self.b_rule not in ("log4", "fixed"):
            raise ConfigError(f"unknown B rule {self.b_rule!r}")
        if self.b_rule == "fixed" and not (self.fixed_B and self.fixed_B >= 1):
            raise ConfigError("fixed B rule needs fixed_B >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for X in self.x_grid:
            H = self.H_for(X)
            if not 4 <= H <= X:
                raise ConfigError(f"X={X} gives H={H}, outside 4 <= H <= X")

    def H_for(self, X: int) -> int:
        return math.floor(X ** self.h_exponent)

    def B_for(self, X: int) -> float:
        if self.b_rule == "log4":
            return float(math.ceil(math.log(X) ** 4))
        return float(self.fixed_B)


@dataclass(frozen=True)
class VerificationRow:
    X: int
    H: int
    B: float
    computed_sum: float
    main_term: float
    rel_error: float
    log_x_normalized_error: float
    route: str
    wall_time_ms: int
    constants_fingerprint: str
    route_delta: Optional[float] = None
    status: str = "ok"


FIELDS = [f.name for f in fields(VerificationRow)]
_INT_FIELDS = {"X", "H", "wall_time_ms"}
_STR_FIELDS = {"route", "constants_fingerprint", "status"}


def run_row(X: int, config: CampaignConfig) -> VerificationRow:
    constants = compute_zeta_constants()
    H, B = config.H_for(X), config.B_for(X)
    t0 = time.perf_counter()
    spec = IntervalSpec(X, H, config.epsilon)
    trunc = TruncationLevel(B)
    got = interval_sum_rearranged(spec, trunc, threads=config.threads)
    route, delta, status = "rearranged", None, "ok"
    if X <= config.direct_check_limit:
        table = build_lambda_table(X + H)
        direct = interval_sum_direct(spec, trunc, table)
        delta = abs(direct.value - got.value) / abs(got.value)
        route = "both"
        if delta > ROUTE_TOLERANCE:
            status = f"route_mismatch:{delta:.3g}"
    mt = main_term(spec, constants)
    rel = abs(got.value / mt - 1)
    wall = int(round((time.perf_counter() - t0) * 1000))
    log.info("X=%d H=%d B=%g rel_error=%.4g (%d ms)", X, H, B, rel, wall)
    return VerificationRow(
        X=X, H=H, B=round_sig(B), computed_sum=round_sig(got.value), main_term=round_sig(mt),
        rel_error=round_sig(rel), log_x_normalized_error=round_sig(rel * math.log(X)),
        route=route, wall_time_ms=wall, constants_fingerprint=constants.fingerprint(),
        route_delta=round_sig(delta), status=status,
    )


def run_campaign(config: CampaignConfig) -> list[VerificationRow]:
    """One row per X, sorted by X.

    Rows run one after another; each row's sweep uses ``config.threads``
    workers.  A failing row is recorded with its error in ``status``.
    """
    rows = []
    for X in sorted(config.x_grid):
        try:
            rows.append(run_row(X, config))
        except Exception as exc:  # recorded in-row, grid continues
            log.exception("row X=%d failed", X)
            rows.append(VerificationRow(
                X=X, H=config.H_for(X), B=round_sig(config.B_for(X)), computed_sum=math.nan,
                main_term=math.nan, rel_error=math.nan, log_x_normalized_error=math.nan,
                route="rearranged", wall_time_ms=0,
                constants_fingerprint=compute_zeta_constants().fingerprint(),
                status=f"error:{type(exc).__name__}:{exc}",
            ))
    return rows


def metadata() -> dict:
    constants = compute_zeta_constants()
    return {
        "constants": constants.as_dict(),
        "second_term_variant": calibrate_second_term(constants),
    }


# ---------------------------------------------------------------- reports


def _render(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def render_report(rows: list[VerificationRow], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for row in rows:
            writer.writerow([_render(getattr(row, name)) for name in FIELDS])
        return buf.getvalue()
    if fmt == "json":
        out = []
        for row in rows:
            d = asdict(row)
            out.append({k: (round_sig(v) if isinstance(v, float) else v) for k, v in d.items()})
        return json.dumps(out, indent=1) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def emit_report(rows: list[VerificationRow], fmt: str = "csv", path=None) -> str:
    """Write the report to ``path`` (overwriting) and return its text."""
    text = render_report(rows, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text


def _parse_value(name: str, raw):
    if raw is None or raw == "":
        return None
    if name in _STR_FIELDS:
        return str(raw)
    if name in _INT_FIELDS:
        return int(raw)
    return float(raw)


def parse_report(text: str, fmt: str = "csv") -> list[VerificationRow]:
    if fmt == "csv":
        records = list(csv.DictReader(io.StringIO(text)))
    elif fmt == "json":
        records = json.loads(text)
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    return [VerificationRow(**{k: _parse_value(k, rec.get(k)) for k in FIELDS}) for rec in records]
