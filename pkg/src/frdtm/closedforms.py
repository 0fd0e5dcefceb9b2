"""Printed coefficient formulas of the four worked examples, evaluated numerically.

These are transcribed as published, prefactors included, and serve as an
independent oracle for the recurrence engine at classical order and for the
tabulated values.  They are *not* corrected: for fractional order their
``Gamma(a)/Gamma(2a)``-type prefactors differ from what the recurrence
produces, and a few higher terms disagree with the recurrence even at
classical order (ex42 ``U_3``; ex44 ``U_4`` and ``U_6``).

For ex44 the symbol in the printed formulas is half the tabulated order:
``a_sym = alpha_table / 2``, with series powers ``t**(k*a_sym)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .fraccalc import gamma_fn
from .solver import builtin_problem, solve_frdtm

__all__ = [
    "PRINTED_IDS",
    "PrintedSeries",
    "printed_series",
    "printed_coefficient",
    "printed_eval",
    "printed_vs_solver",
]

PRINTED_IDS = ("ex41", "ex42", "ex43", "ex44")

Coefficient = Callable[[float], float]


def _sech(x: float) -> float:
    return 1.0 / math.cosh(x)


@dataclass(frozen=True)
class PrintedSeries:
    example_id: str
    alpha_sym: float
    terms: dict[int, Coefficient]
    max_k: int | None  # None: closed form for every k

    def coefficient(self, k: int, x: float) -> float:
        if self.max_k is not None and k > self.max_k:
            raise ValueError(f"{self.example_id} prints terms only up to U_{self.max_k}")
        if k in self.terms:
            return self.terms[k](x)
        if self.example_id == "ex41":
            return 1.0 / gamma_fn(k * self.alpha_sym + 1.0)
        return 0.0


def _ex41(a: float) -> dict[int, Coefficient]:
    return {0: lambda x: 1.0 + math.sin(x)}


def _ex42(a: float) -> dict[int, Coefficient]:
    g = gamma_fn
    return {
        0: lambda x: 1.0 + math.sin(x),
        1: lambda x: -g(a) / g(2 * a) * (1.0 + 3.0 * math.sin(x) + math.sin(x) ** 2),
        2: lambda x: -g(a) / (2.0 * g(3 * a)) * (12.0 * math.cos(2 * x) - 25.0 * math.sin(x) + math.sin(3 * x) - 12.0),
        3: lambda x: -g(a)
        / (8.0 * g(2 * a) ** 2 * g(4 * a))
        * (
            2.0 * g(a) * g(3 * a) * (-3.0 + math.cos(2 * x) - 6.0 * math.sin(x) ** 2)
            + 4.0
            * g(2 * a) ** 2
            * (49.0 - 98.0 * math.cos(2 * x) + math.cos(4 * x) + 111.0 * math.sin(x) - 23.0 * math.sin(3 * x))
        ),
    }


def _ex43(a: float) -> dict[int, Coefficient]:
    g = gamma_fn
    return {
        0: lambda x: -_sech(x),
        1: lambda x: g(a) / g(2 * a) * _sech(x) ** 3,
        2: lambda x: g(a) / g(3 * a) * _sech(x) ** 5 * (4.0 * math.cosh(2 * x) - 5.0),
        3: lambda x: g(a)
        / (g(2 * a) ** 2 * g(4 * a))
        * _sech(x) ** 7
        * (
            (123.0 - 112.0 * math.cosh(2 * x) + 8.0 * math.cosh(4 * x)) * g(2 * a) ** 2
            - 3.0 * g(a) * g(3 * a)
        ),
    }


def _ex44(a: float) -> dict[int, Coefficient]:
    g = gamma_fn
    return {
        0: lambda x: 1.0 + math.sin(x),
        1: lambda x: 0.0,
        2: lambda x: -g(a) / g(3 * a) * (1.0 + 3.0 * math.sin(x) + math.sin(x) ** 2),
        3: lambda x: 0.0,
        4: lambda x: -g(a) / (2.0 * g(4 * a)) * (12.0 * math.cos(2 * x) - 25.0 * math.sin(x) + math.sin(3 * x) - 12.0),
        5: lambda x: 0.0,
        6: lambda x: -g(a)
        / (8.0 * g(2 * a) ** 2 * g(5 * a))
        * (
            2.0 * g(a) * g(3 * a) * (-3.0 + math.cos(2 * x) - 6.0 * math.sin(x) ** 2)
            + 4.0 * g(2 * a) ** 2 * (-12.0 + 12.0 * math.cos(2 * x) - 25.0 * math.sin(x) + math.sin(3 * x))
        ),
        7: lambda x: 0.0,
    }


_BUILDERS = {"ex41": (_ex41, None), "ex42": (_ex42, 3), "ex43": (_ex43, 3), "ex44": (_ex44, 7)}


def printed_series(example_id: str, alpha_table: float) -> PrintedSeries:
    if example_id not in _BUILDERS:
        raise ValueError(f"unknown example id {example_id!r}; expected one of {PRINTED_IDS}")
    alpha_sym = alpha_table / 2.0 if example_id == "ex44" else float(alpha_table)
    build, max_k = _BUILDERS[example_id]
    return PrintedSeries(example_id, alpha_sym, build(alpha_sym), max_k)


def printed_coefficient(example_id: str, alpha_table: float, k: int, x: float) -> float:
    return printed_series(example_id, alpha_table).coefficient(k, x)


def printed_eval(example_id: str, alpha_table: float, x: float, t: float, n: int) -> float:
    """``sum_{k<=n} U_k(x) t**(k*a_sym)`` over the printed terms."""
    if t < 0.0:
        raise ValueError("t must be non-negative")
    series = printed_series(example_id, alpha_table)
    total = series.coefficient(0, x)
    if t == 0.0:
        return total
    log_t = math.log(t)
    for k in range(1, n + 1):
        c = series.coefficient(k, x)
        if c:
            total += c * math.exp(k * series.alpha_sym * log_t)
    return total


def printed_vs_solver(example_id: str, x: float, kmax: int) -> float:
    """Max over ``k <= kmax`` of ``|printed U_k(x) - recurrence U_k(x)|`` at classical order."""
    classical = 2.0 if example_id == "ex44" else 1.0
    series = printed_series(example_id, classical)
    if series.max_k is not None and kmax > series.max_k:
        raise ValueError(f"{example_id} prints terms only up to U_{series.max_k}")
    sol = solve_frdtm(builtin_problem(example_id, classical), x, max(kmax, 1))
    values = sol.coefficients()
    return max(abs(series.coefficient(k, x) - values[k]) for k in range(kmax + 1))
