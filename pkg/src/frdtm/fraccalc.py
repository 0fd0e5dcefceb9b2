"""Gamma utilities and fractional calculus on the monomial family t**gamma.

Riemann-Liouville integrals and Caputo derivatives of monomials have closed
forms in terms of Gamma ratios; these are the only identities the series
solver needs, and they give exact oracles for the composition laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "FracOrder",
    "gamma_fn",
    "log_gamma",
    "gamma_ratio",
    "ratio_standard",
    "rl_integral_monomial",
    "caputo_monomial",
    "verify_theorem1",
]

# Gamma(x) overflows a double just above this.
_GAMMA_MAX_ARG = 171.6


@dataclass(frozen=True)
class FracOrder:
    """Time-fractional order ``mu`` of the PDE and the derived series step.

    ``ic_count`` is 1 for ``0 < mu <= 1`` and 2 for ``1 < mu <= 2``.  The
    series runs in powers ``t**(k*beta)`` with ``beta = mu`` (one initial
    condition) or ``beta = mu / 2`` (two initial conditions).
    """

    mu: float

    def __post_init__(self) -> None:
        mu = float(self.mu)
        if not (0.0 < mu <= 2.0) or math.isnan(mu):
            raise ValueError(f"fractional order must satisfy 0 < mu <= 2, got {self.mu!r}")
        object.__setattr__(self, "mu", mu)

    @property
    def ic_count(self) -> int:
        return 1 if self.mu <= 1.0 else 2

    @property
    def beta(self) -> float:
        return self.mu if self.ic_count == 1 else self.mu / 2.0

    @property
    def m(self) -> int:
        """Smallest integer ``m`` with ``m - 1 < mu <= m``."""
        return _ceil_order(self.mu)


def _ceil_order(alpha: float) -> int:
    # integer alpha maps to itself: the classical derivative branch
    return int(math.ceil(alpha))


def _is_nonpos_int(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _is_int(x: float) -> bool:
    return x == math.floor(x)


def gamma_fn(x: float) -> float:
    """Gamma function for positive real ``x``.

    Integer arguments return the exact factorial (correctly rounded).
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x!r}")
    if _is_int(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    if x > _GAMMA_MAX_ARG:
        raise OverflowError(f"Gamma({x}) overflows a double; use log_gamma")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    """``log(Gamma(x))`` for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """``Gamma(a) / Gamma(b)`` for positive ``a`` and ``b``.

    Small arguments use direct evaluation, which keeps integer ratios such as
    ``k!/(k+1)!`` correctly rounded; large ones go through log space so the
    ratio stays finite when the individual Gammas overflow.
    """
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"gamma_ratio requires positive arguments, got {a!r}, {b!r}")
    if _is_int(a) and _is_int(b) and a <= 171 and b <= 171:
        return math.factorial(int(a) - 1) / math.factorial(int(b) - 1)
    if a <= _GAMMA_MAX_ARG and b <= _GAMMA_MAX_ARG:
        return math.gamma(a) / math.gamma(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


def ratio_standard(order: FracOrder, k: int, step: int) -> float:
    """``Gamma(beta*k + 1) / Gamma(beta*(k + step) + 1)`` with ``beta = order.beta``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if step not in (1, 2):
        raise ValueError(f"step must be 1 or 2, got {step}")
    beta = order.beta
    return gamma_ratio(beta * k + 1.0, beta * (k + step) + 1.0)


def rl_integral_monomial(alpha: float, gamma_exp: float) -> tuple[float, float]:
    """Riemann-Liouville integral of order ``alpha`` applied to ``t**gamma_exp``.

    Returns ``(coefficient, exponent)`` such that
    ``J^alpha t**g = coefficient * t**exponent``.
    """
    if alpha < 0.0:
        raise ValueError(f"integral order must be >= 0, got {alpha!r}")
    if not gamma_exp > -1.0:
        raise ValueError(f"J^alpha t^g diverges for g <= -1 (g={gamma_exp!r})")
    if alpha == 0.0:
        return 1.0, float(gamma_exp)
    return gamma_ratio(gamma_exp + 1.0, alpha + gamma_exp + 1.0), alpha + gamma_exp


def caputo_monomial(alpha: float, gamma_exp: float) -> tuple[float, float] | None:
    """Caputo derivative of order ``alpha`` of ``t**gamma_exp``.

    Returns ``(coefficient, exponent)``, or ``None`` when the derivative is
    identically zero: ``gamma_exp`` an integer below ``ceil(alpha)``, or the
    closed form hits a pole of ``Gamma`` in the denominator.
    """
    if gamma_exp < 0.0:
        raise ValueError(f"caputo_monomial requires gamma_exp >= 0, got {gamma_exp!r}")
    m = _ceil_order(alpha)
    if _is_int(gamma_exp) and gamma_exp <= m - 1:
        return None

    if _is_int(alpha):
        # classical m-th derivative: g (g-1) ... (g-m+1) t^(g-m)
        coef = 1.0
        for j in range(m):
            coef *= gamma_exp - j
        return coef, gamma_exp - m

    # D^alpha = J^(m-alpha) d^m/dt^m
    denom_arg = gamma_exp - alpha + 1.0
    if _is_nonpos_int(denom_arg):
        return None
    coef = 1.0
    for j in range(m):
        coef *= gamma_exp - j
    inner = gamma_exp - m
    if inner > -1.0:
        c, e = rl_integral_monomial(m - alpha, inner)
        return coef * c, e
    # d^m t^g is not integrable at 0; fall back to the analytically continued form
    return math.gamma(gamma_exp + 1.0) / math.gamma(denom_arg), gamma_exp - alpha


def _in_theorem_class(gamma_exp: float, m: int) -> bool:
    # t^g has an integrable m-th derivative iff g is an integer or g > m - 1
    return _is_int(gamma_exp) or gamma_exp > m - 1


def verify_theorem1(order: FracOrder, gamma_exp: float, tol: float) -> bool:
    """Check ``J D u = u - initial polynomial`` and ``D J u = u`` on ``t**gamma_exp``.

    The first identity is only asserted for monomials whose ``m``-th
    derivative is integrable (integer exponent or exponent above ``m - 1``);
    outside that class it holds vacuously.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    alpha = order.mu
    m = _ceil_order(alpha)

    # (ii) D^alpha J^alpha t^g == t^g
    c1, e1 = rl_integral_monomial(alpha, gamma_exp)
    back = caputo_monomial(alpha, e1)
    if back is None:
        return False
    c2, e2 = back
    if abs(c1 * c2 - 1.0) > tol or abs(e2 - gamma_exp) > tol:
        return False

    if not _in_theorem_class(gamma_exp, m):
        return True

    # (i) J^alpha D^alpha t^g + sum_{k<m} u^(k)(0) t^k / k! == t^g
    terms: list[tuple[float, float]] = []
    d = caputo_monomial(alpha, gamma_exp)
    if d is not None:
        cd, ed = d
        ci, ei = rl_integral_monomial(alpha, ed)
        terms.append((cd * ci, ei))
    if _is_int(gamma_exp) and gamma_exp < m:
        # only the k == g derivative at 0 is nonzero, and it equals g!
        terms.append((1.0, float(gamma_exp)))

    total = sum(c for c, e in terms if abs(e - gamma_exp) <= tol)
    stray = [c for c, e in terms if abs(e - gamma_exp) > tol and abs(c) > tol]
    return abs(total - 1.0) <= tol and not stray
