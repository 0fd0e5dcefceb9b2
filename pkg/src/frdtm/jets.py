"""Truncated Taylor jets in the space variable.

A :class:`Jet` of order ``J`` about ``x0`` stores ``c_0 .. c_J`` for
``sum_j c_j (x - x0)**j``.  Second derivatives are exact coefficient shifts,
so repeated ``d2/dx2`` in the series recurrence carries no discretization
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Jet",
    "JetMismatchError",
    "JetOrderError",
    "ELEMENTARY_KINDS",
    "jet_const",
    "jet_elem",
    "jet_add",
    "jet_sub",
    "jet_scale",
    "jet_mul",
    "jet_div",
    "jet_d1",
    "jet_d2",
    "jet_truncate",
]

ELEMENTARY_KINDS = ("sin", "cos", "exp", "sech", "identity")


class JetMismatchError(ValueError):
    """Operands live at different base points or carry different orders."""


class JetOrderError(ValueError):
    """A jet is too short for the requested operation."""


@dataclass(frozen=True, eq=False)
class Jet:
    base_point: float
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if c.size == 0:
            raise JetOrderError("a jet needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "base_point", float(self.base_point))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def __repr__(self) -> str:
        return f"Jet(x0={self.base_point!r}, coeffs={self.coeffs.tolist()!r})"

    def __add__(self, other: Jet) -> Jet:
        return jet_add(self, other)

    def __sub__(self, other: Jet) -> Jet:
        return jet_sub(self, other)

    def __neg__(self) -> Jet:
        return jet_scale(self, -1.0)

    def __mul__(self, other: Jet | float) -> Jet:
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Jet) -> Jet:
        return jet_div(self, other)

    def allclose(self, other: Jet, atol: float = 1e-12, rtol: float = 0.0) -> bool:
        _check_compatible(self, other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol))


def _check_compatible(a: Jet, b: Jet) -> None:
    if a.base_point != b.base_point:
        raise JetMismatchError(f"base points differ: {a.base_point} vs {b.base_point}")
    if a.order != b.order:
        raise JetMismatchError(f"jet orders differ: {a.order} vs {b.order}")


def jet_const(c: float, x0: float, J: int) -> Jet:
    if J < 0:
        raise JetOrderError(f"jet order must be >= 0, got {J}")
    coeffs = np.zeros(J + 1)
    coeffs[0] = c
    return Jet(x0, coeffs)


def _taylor_of_cycle(values: Sequence[float], J: int) -> np.ndarray:
    # derivatives repeat with period len(values); coefficient j is f^(j)(x0)/j!
    out = np.empty(J + 1)
    fact = 1.0
    for j in range(J + 1):
        if j:
            fact *= j
        out[j] = values[j % len(values)] / fact
    return out


def jet_elem(kind: str, x0: float, J: int) -> Jet:
    """Degree-``J`` Taylor jet of an elementary function about ``x0``."""
    if J < 0:
        raise JetOrderError(f"jet order must be >= 0, got {J}")
    if kind == "sin":
        s, c = math.sin(x0), math.cos(x0)
        return Jet(x0, _taylor_of_cycle((s, c, -s, -c), J))
    if kind == "cos":
        s, c = math.sin(x0), math.cos(x0)
        return Jet(x0, _taylor_of_cycle((c, -s, -c, s), J))
    if kind == "exp":
        return Jet(x0, _taylor_of_cycle((math.exp(x0),), J))
    if kind == "identity":
        coeffs = np.zeros(J + 1)
        coeffs[0] = x0
        if J >= 1:
            coeffs[1] = 1.0
        return Jet(x0, coeffs)
    if kind == "sech":
        # 1/cosh; cosh derivatives alternate cosh, sinh
        ch, sh = math.cosh(x0), math.sinh(x0)
        cosh_jet = Jet(x0, _taylor_of_cycle((ch, sh), J))
        return jet_div(jet_const(1.0, x0, J), cosh_jet)
    raise ValueError(f"unknown elementary kind {kind!r}; expected one of {ELEMENTARY_KINDS}")


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_compatible(a, b)
    return Jet(a.base_point, a.coeffs + b.coeffs)


def jet_sub(a: Jet, b: Jet) -> Jet:
    _check_compatible(a, b)
    return Jet(a.base_point, a.coeffs - b.coeffs)


def jet_scale(a: Jet, s: float) -> Jet:
    return Jet(a.base_point, a.coeffs * float(s))


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Truncated Cauchy product of two jets of equal order."""
    _check_compatible(a, b)
    J = a.order
    return Jet(a.base_point, np.convolve(a.coeffs, b.coeffs)[: J + 1])


def jet_div(a: Jet, b: Jet) -> Jet:
    """Series quotient ``a / b`` by forward substitution; needs ``b.value != 0``."""
    _check_compatible(a, b)
    b0 = b.coeffs[0]
    if b0 == 0.0:
        raise ZeroDivisionError("jet division by a jet with zero constant term")
    J = a.order
    q = np.zeros(J + 1)
    bc = b.coeffs
    for j in range(J + 1):
        acc = a.coeffs[j] - np.dot(q[:j], bc[j:0:-1]) if j else a.coeffs[0]
        q[j] = acc / b0
    return Jet(a.base_point, q)


def jet_d1(a: Jet) -> Jet:
    """Exact first derivative; the result has order ``a.order - 1``."""
    if a.order < 1:
        raise JetOrderError(f"first derivative needs order >= 1, got {a.order}")
    j = np.arange(1, a.order + 1)
    return Jet(a.base_point, j * a.coeffs[1:])


def jet_d2(a: Jet) -> Jet:
    """Exact second derivative ``d_j = (j+2)(j+1) c_{j+2}``; order drops by 2."""
    if a.order < 2:
        raise JetOrderError(f"second derivative needs order >= 2, got {a.order}")
    j = np.arange(a.order - 1)
    return Jet(a.base_point, (j + 2.0) * (j + 1.0) * a.coeffs[2:])


def jet_truncate(a: Jet, J: int) -> Jet:
    if J > a.order:
        raise JetOrderError(f"cannot raise jet order from {a.order} to {J}")
    if J < 0:
        raise JetOrderError(f"jet order must be >= 0, got {J}")
    if J == a.order:
        return a
    return Jet(a.base_point, a.coeffs[: J + 1])
