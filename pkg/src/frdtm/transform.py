"""Coefficient-sequence algebra for the fractional reduced differential transform.

A :class:`CoeffSeq` holds the transformed coefficients ``U_0 .. U_N`` of
``u(x, t) = sum_k U_k(x) (t - t0)**(k*beta)`` at one spatial site, each
``U_k`` stored as a :class:`~frdtm.jets.Jet`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fraccalc import FracOrder, gamma_ratio
from .jets import (
    Jet,
    JetMismatchError,
    jet_add,
    jet_const,
    jet_elem,
    jet_mul,
    jet_scale,
    jet_truncate,
)

__all__ = [
    "CoeffSeq",
    "delta_seq",
    "zero_seq",
    "seq_add",
    "seq_scale",
    "seq_conv",
    "seq_conv3",
    "seq_power_term",
    "seq_shift_fractional",
    "seq_exp",
    "seq_trig",
    "monomial_source_term",
]


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    terms: tuple[Jet, ...]
    order: FracOrder
    t0: float = 0.0

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("a coefficient sequence needs at least one term")
        x0 = terms[0].base_point
        for k, term in enumerate(terms):
            if term.base_point != x0:
                raise JetMismatchError(f"term {k} is based at {term.base_point}, expected {x0}")
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, k: int) -> Jet:
        return self.terms[k]

    @property
    def base_point(self) -> float:
        return self.terms[0].base_point

    @property
    def beta(self) -> float:
        return self.order.beta

    def values(self) -> list[float]:
        return [term.value for term in self.terms]

    def with_terms(self, terms: Iterable[Jet]) -> CoeffSeq:
        return CoeffSeq(tuple(terms), self.order, self.t0)


def _check_pair(a: CoeffSeq, b: CoeffSeq) -> None:
    if len(a) != len(b):
        raise JetMismatchError(f"sequence lengths differ: {len(a)} vs {len(b)}")
    if a.beta != b.beta or a.t0 != b.t0:
        raise JetMismatchError("sequences use different exponent steps or expansion times")
    if a.base_point != b.base_point:
        raise JetMismatchError("sequences live at different base points")


def zero_seq(order: FracOrder, x0: float, orders: Sequence[int], t0: float = 0.0) -> CoeffSeq:
    return CoeffSeq(tuple(jet_const(0.0, x0, J) for J in orders), order, t0)


def delta_seq(order: FracOrder, x0: float, orders: Sequence[int], t0: float = 0.0) -> CoeffSeq:
    """Unit of the Cauchy product: ``U_0 = 1``, all later terms zero."""
    terms = [jet_const(1.0 if k == 0 else 0.0, x0, J) for k, J in enumerate(orders)]
    return CoeffSeq(tuple(terms), order, t0)


def seq_add(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    _check_pair(a, b)
    return a.with_terms(jet_add(p, q) for p, q in zip(a.terms, b.terms))


def seq_scale(a: CoeffSeq, s: float) -> CoeffSeq:
    return a.with_terms(jet_scale(p, s) for p in a.terms)


def _common_order(jets: Iterable[Jet]) -> int:
    return min(j.order for j in jets)


def _conv_terms(a: Sequence[Jet], b: Sequence[Jet], k: int) -> Jet:
    J = _common_order(list(a[: k + 1]) + list(b[: k + 1]))
    acc = jet_mul(jet_truncate(a[0], J), jet_truncate(b[k], J))
    for r in range(1, k + 1):
        acc = jet_add(acc, jet_mul(jet_truncate(a[r], J), jet_truncate(b[k - r], J)))
    return acc


def seq_conv(a: CoeffSeq, b: CoeffSeq, k: int) -> Jet:
    """``sum_{r<=k} A_r B_{k-r}``: coefficient ``k`` of the product series.

    Operands are truncated to the lowest jet order among the participating
    terms, so no high-order coefficient is fabricated.
    """
    if a.base_point != b.base_point:
        raise JetMismatchError("sequences live at different base points")
    if not 0 <= k < min(len(a), len(b)):
        raise IndexError(f"convolution index {k} out of range for lengths {len(a)}, {len(b)}")
    return _conv_terms(a.terms, b.terms, k)


def seq_conv3(a: CoeffSeq, k: int) -> Jet:
    """Coefficient ``k`` of the cube of the series, ``sum_{i+j+l=k} A_i A_j A_l``."""
    if not 0 <= k < len(a):
        raise IndexError(f"convolution index {k} out of range for length {len(a)}")
    squares = [seq_conv(a, a, r) for r in range(k + 1)]
    return _conv_terms(squares, a.terms, k)


def seq_power_term(a: CoeffSeq, p: int, k: int) -> Jet:
    """Coefficient ``k`` of ``u**p`` by repeated convolution with ``a``."""
    if p < 1:
        raise ValueError(f"power must be >= 1, got {p}")
    if not 0 <= k < len(a):
        raise IndexError(f"convolution index {k} out of range for length {len(a)}")
    power: list[Jet] = list(a.terms[: k + 1])
    for _ in range(p - 1):
        power = [_conv_terms(power, a.terms, r) for r in range(k + 1)]
    return power[k]


def seq_shift_fractional(a: CoeffSeq, r: int) -> CoeffSeq:
    """Transform of the Caputo derivative of order ``r*beta``.

    ``W_k = Gamma(beta*k + beta*r + 1) / Gamma(beta*k + 1) * A_{k+r}``; the
    result is ``r`` terms shorter.
    """
    if r < 1:
        raise ValueError(f"shift must be >= 1, got {r}")
    if r >= len(a):
        raise IndexError(f"shift {r} leaves no terms in a sequence of length {len(a)}")
    beta = a.beta
    terms = [
        jet_scale(a.terms[k + r], gamma_ratio(beta * k + beta * r + 1.0, beta * k + 1.0))
        for k in range(len(a) - r)
    ]
    return a.with_terms(terms)


def _dt_orders(N: int, J: int) -> list[int]:
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if J - 2 * N < 0:
        raise ValueError(f"seed order {J} too small for {N + 1} terms (need >= {2 * N})")
    return [J - 2 * k for k in range(N + 1)]


def _scaled_elem(kind: str, scale: float, x0: float, J: int, phase: float = 0.0) -> Jet:
    # jet of f(scale*x + phase) about x0: f's jet at scale*x0+phase, coefficient j times scale**j
    base = jet_elem(kind, scale * x0 + phase, J)
    powers = scale ** np.arange(J + 1, dtype=float)
    return Jet(x0, base.coeffs * powers)


def seq_exp(lam: float, mu_x: float, x0: float, N: int, J: int) -> CoeffSeq:
    """Transform of ``exp(lam*t + mu_x*x)`` in the classical step: ``lam**k/k! e^(mu_x x)``."""
    orders = _dt_orders(N, J)
    terms = []
    for k, Jk in enumerate(orders):
        c = lam**k / math.factorial(k)
        terms.append(jet_scale(_scaled_elem("exp", mu_x, x0, Jk), c))
    return CoeffSeq(tuple(terms), FracOrder(1.0))


def seq_trig(kind: str, eta: float, omega: float, x0: float, N: int, J: int) -> CoeffSeq:
    """Transform of ``sin(eta*x + omega*t)`` (or cos): ``omega**k/k! f(eta*x + pi*k/2)``."""
    if kind not in ("sin", "cos"):
        raise ValueError(f"kind must be 'sin' or 'cos', got {kind!r}")
    orders = _dt_orders(N, J)
    terms = []
    for k, Jk in enumerate(orders):
        c = omega**k / math.factorial(k)
        terms.append(jet_scale(_scaled_elem(kind, eta, x0, Jk, phase=math.pi * k / 2.0), c))
    return CoeffSeq(tuple(terms), FracOrder(1.0))


def monomial_source_term(coef: float, x_power: int, t_index: int, k: int, x0: float, J: int) -> Jet:
    """Transform of ``coef * x**x_power * t**(t_index*beta)`` at index ``k``.

    Nonzero only for ``k == t_index``; negative shifts are zero.
    """
    if k != t_index:
        return jet_const(0.0, x0, J)
    coeffs = [0.0] * (J + 1)
    for j in range(min(x_power, J) + 1):
        coeffs[j] = coef * math.comb(x_power, j) * x0 ** (x_power - j)
    return Jet(x0, coeffs)
