"""Command-line front end.

Usage::

    frdtm solve|table|surface|sweep CONFIG [--out PATH] [--threads K]

``CONFIG`` is a line-oriented ``key = value`` file; ``#`` starts a comment
and ``a:b:c`` denotes the inclusive range ``a, a+c, ..., b``.  Recognized
keys::

    problem = ex41 | ex42 | ex43 | ex44      (required)
    alpha   = 1.0 [, 0.7, ...]               (default: 1 for ex41-43, 2 for ex44)
    N       = 12                             truncation order
    x       = 2.0 | lo:hi:step               probe site, or x range for surfaces
    t       = 0:0.01:0.001 | t1, t2, ...     output times
    mode    = series | compare | table | surface | printed
    method  = series | reference             (surface only)
    dt      = 1e-4                           reference time step
    cells   = 1024                           reference grid cells
    out     = path.csv

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .closedforms import printed_eval, printed_series
from .jets import JetOrderError
from .reference import StepFailure, integrate, reference_grid
from .solver import BUILTIN_IDS, builtin_problem, eval_grid, eval_series, solve_frdtm

__all__ = [
    "ConfigError",
    "RunConfig",
    "ErrorTable",
    "parse_config",
    "parse_range",
    "format_number",
    "write_csv",
    "read_csv",
    "run_table",
    "run_surface",
    "run_alpha_sweep",
    "main",
]

KEYS = ("problem", "alpha", "N", "x", "t", "mode", "method", "dt", "cells", "out")
MODES = ("series", "compare", "table", "surface", "printed")
TABLE_HEADER = ("t", "frdtm", "irk", "abs_err", "rel_err")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class RunConfig:
    problem: str
    alphas: tuple[float, ...]
    N: int = 12
    x: tuple[float, ...] = (0.0,)
    t: tuple[float, ...] = (0.0,)
    mode: str = "series"
    method: str = "series"
    dt: float = 1e-4
    cells: int = 1024
    out: str | None = None

    @property
    def alpha(self) -> float:
        return self.alphas[0]

    @property
    def probe_x(self) -> float:
        return self.x[0]


def parse_range(text: str) -> tuple[float, ...]:
    """``a:b:c`` inclusive range, a comma list, or a single number."""
    text = text.strip()
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"range {text!r} must look like start:end:step")
        start, end, step = (float(p) for p in parts)
        if not step > 0.0 or end < start:
            raise ValueError(f"range {text!r} is not increasing")
        n = int(round((end - start) / step))
        if abs(start + n * step - end) > 1e-9 * max(1.0, abs(end)):
            raise ValueError(f"step {step} does not divide [{start}, {end}]")
        # rounding keeps e.g. 3*0.1 printing as 0.3
        return tuple(round(start + i * step, 12) for i in range(n + 1))
    values = tuple(float(p) for p in text.split(","))
    if list(values) != sorted(values):
        raise ValueError(f"values {text!r} are not increasing")
    return values


def _admissible(problem: str, alpha: float) -> bool:
    if problem == "ex44":
        return 1.0 < alpha <= 2.0
    return 0.0 < alpha <= 1.0


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration."""
    seen: dict[str, tuple[object, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key, raw_value = line.split("=", 1)
        key = key.strip()
        value = raw_value.strip()
        # 1-based column where the value starts
        col = len(line) - len(raw_value) + (len(raw_value) - len(raw_value.lstrip())) + 1
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, len(line) - len(line.lstrip()) + 1)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            parsed = _parse_value(key, value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, col) from None
        seen[key] = (parsed, lineno)

    if "problem" not in seen:
        raise ConfigError("missing required key 'problem'")
    problem = seen["problem"][0]
    default_alpha = (2.0,) if problem == "ex44" else (1.0,)
    alphas, alpha_line = seen.get("alpha", (default_alpha, None))
    for a in alphas:
        if not _admissible(problem, a):
            raise ConfigError(f"alpha = {a} outside the admissible range of {problem}", alpha_line)

    cfg = RunConfig(problem=problem, alphas=alphas)
    for key in ("N", "x", "t", "mode", "method", "dt", "cells", "out"):
        if key in seen:
            setattr(cfg, key, seen[key][0])
    if cfg.mode in ("table", "compare"):
        for a in cfg.alphas:
            if a not in (1.0, 2.0):
                raise ConfigError(f"table mode needs an integer order for the reference column, got {a}",
                                  alpha_line)
    if cfg.mode == "printed":
        top = printed_series(problem, cfg.alpha).max_k
        if top is not None and cfg.N > top:
            raise ConfigError(f"{problem} prints terms only up to U_{top}, got N = {cfg.N}",
                              seen.get("N", (None, None))[1])
    return cfg


def _parse_value(key: str, value: str):
    if key == "problem":
        if value not in BUILTIN_IDS:
            raise ValueError(f"unknown problem {value!r}; expected one of {', '.join(BUILTIN_IDS)}")
        return value
    if key == "alpha":
        alphas = tuple(float(v) for v in value.split(","))
        for a in alphas:
            if not 0.0 < a <= 2.0 or math.isnan(a):
                raise ValueError(f"alpha = {a} outside the admissible range (0, 2]")
        return alphas
    if key == "N":
        n = int(value)
        if n < 1:
            raise ValueError("N must be >= 1")
        return n
    if key in ("x", "t"):
        values = parse_range(value)
        if key == "t" and values[0] < 0.0:
            raise ValueError("times must be non-negative")
        return values
    if key == "mode":
        if value not in MODES:
            raise ValueError(f"unknown mode {value!r}; expected one of {', '.join(MODES)}")
        return value
    if key == "method":
        if value not in ("series", "reference"):
            raise ValueError("method must be 'series' or 'reference'")
        return value
    if key == "dt":
        dt = float(value)
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        return dt
    if key == "cells":
        cells = int(value)
        if cells < 2:
            raise ValueError("cells must be >= 2")
        return cells
    return value


def format_number(v: float) -> str:
    return f"{v:.15g}"


def write_csv(header: Sequence[str], rows: Sequence[Sequence[float]], dest: str | Path | io.TextIOBase | None) -> str:
    """Comma-separated, LF line endings, 15 significant digits. Returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(float(v)) for v in row])
    text = buf.getvalue()
    if dest is None:
        return text
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="", encoding="ascii") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return text


def read_csv(text: str) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [[float(v) for v in row] for row in reader]


@dataclass
class ErrorTable:
    """Series column against a reference column, with absolute and relative error."""

    rows: list[tuple[float, float, float, float, float]]

    @classmethod
    def from_columns(cls, ts, series, reference) -> ErrorTable:
        rows = []
        for t, a, b in zip(ts, series, reference):
            err = abs(a - b)
            rel = err / abs(b) if b != 0.0 else (0.0 if err == 0.0 else math.inf)
            rows.append((float(t), float(a), float(b), err, rel))
        return cls(rows)

    def to_csv(self, dest=None) -> str:
        return write_csv(TABLE_HEADER, self.rows, dest)


def run_table(cfg: RunConfig) -> ErrorTable:
    """Series (or printed) column against the Gauss-Legendre reference at ``cfg.probe_x``."""
    if cfg.mode not in ("table", "compare", "printed", "series"):
        raise ConfigError(f"table output needs mode = table, got {cfg.mode!r}")
    alpha = cfg.alpha
    if alpha not in (1.0, 2.0):
        raise ConfigError(f"the reference column needs an integer order, got alpha = {alpha}")
    p = builtin_problem(cfg.problem, alpha)
    x = cfg.probe_x
    ts = cfg.t
    if cfg.mode == "printed":
        series = [printed_eval(cfg.problem, alpha, x, t, cfg.N) for t in ts]
    else:
        sol = solve_frdtm(p, x, cfg.N)
        series = [eval_series(sol, t) for t in ts]
    grid = reference_grid(p, x, cfg.cells)
    ref = integrate(p, grid, max(ts), cfg.dt, record=ts).at(x)
    return ErrorTable.from_columns(ts, series, ref)


def run_surface(cfg: RunConfig, workers: int = 1) -> list[tuple[float, float, float]]:
    """``(x, t, u)`` triples, x-major, over the configured rectangle."""
    if len(cfg.alphas) != 1:
        raise ConfigError("surface output takes a single alpha")
    p = builtin_problem(cfg.problem, cfg.alpha)
    xs, ts = cfg.x, cfg.t
    if cfg.method == "reference":
        grid = reference_grid(p, xs[0], cfg.cells)
        sol = integrate(p, grid, max(ts), cfg.dt, record=ts)
        values = np.array([sol.at(x) for x in xs])
    else:
        values = eval_grid(p, xs, ts, cfg.N, workers=workers)
    return [(x, t, float(values[i, j])) for i, x in enumerate(xs) for j, t in enumerate(ts)]


def run_alpha_sweep(cfg: RunConfig) -> tuple[list[str], list[list[float]]]:
    """One column per alpha at the probe site; printed mode uses the published formulas."""
    if not cfg.alphas:
        raise ConfigError("alpha list is empty")
    x = cfg.probe_x
    columns = []
    for alpha in cfg.alphas:
        if cfg.mode == "printed":
            columns.append([printed_eval(cfg.problem, alpha, x, t, cfg.N) for t in cfg.t])
        else:
            sol = solve_frdtm(builtin_problem(cfg.problem, alpha), x, cfg.N)
            columns.append([eval_series(sol, t) for t in cfg.t])
    header = ["t"] + [f"alpha={a:g}" for a in cfg.alphas]
    rows = [[t] + [col[i] for col in columns] for i, t in enumerate(cfg.t)]
    return header, rows


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frdtm", description="Fractional Klein-Gordon series solver")
    parser.add_argument("command", choices=("solve", "table", "surface", "sweep"))
    parser.add_argument("config", type=Path)
    parser.add_argument("--out", type=Path, default=None, help="output CSV (default: config 'out' or stdout)")
    parser.add_argument("--threads", type=int, default=1, help="worker processes for surface sampling")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config.read_text())
        if args.command == "table" and cfg.mode not in ("table", "compare"):
            raise ConfigError(f"'table' needs mode = table or compare, got {cfg.mode!r}")
        if args.command == "surface" and cfg.mode != "surface":
            raise ConfigError(f"'surface' needs mode = surface, got {cfg.mode!r}")
        if args.command in ("solve", "sweep") and cfg.mode not in ("series", "printed"):
            raise ConfigError(f"'{args.command}' needs mode = series or printed, got {cfg.mode!r}")
    except OSError as exc:
        print(f"frdtm: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"frdtm: config error: {exc}", file=sys.stderr)
        return 2

    dest = args.out if args.out is not None else cfg.out
    try:
        if args.command == "table":
            text = run_table(cfg).to_csv()
        elif args.command == "surface":
            text = write_csv(("x", "t", "u"), run_surface(cfg, workers=max(1, args.threads)), None)
        else:
            header, rows = run_alpha_sweep(cfg)
            text = write_csv(header, rows, None)
    except (StepFailure, JetOrderError, OverflowError, FloatingPointError, ZeroDivisionError) as exc:
        # JetOrderError is a ValueError, so this clause must come first
        print(f"frdtm: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"frdtm: config error: {exc}", file=sys.stderr)
        return 2

    if dest is None:
        sys.stdout.write(text)
    else:
        with open(dest, "w", newline="", encoding="ascii") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
