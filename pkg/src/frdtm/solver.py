"""Series solution of time-fractional Klein-Gordon-type problems.

Canonical form solved here::

    D_t^mu u = u_xx + a*u + b*G(u) + f(x, t),   u(x, 0) = g0(x)  [, u_t(x, 0) = g1(x)]

with ``D_t^mu`` the Caputo derivative.  Writing ``u = sum_k U_k(x) t**(k*beta)``
turns the PDE into the recurrence

    U_{k+s} = Gamma(beta*k + 1) / Gamma(beta*(k+s) + 1) * (U_k'' + a U_k + b G_k + F_k)

with ``s = 1`` (one initial condition, ``beta = mu``) or ``s = 2`` (two initial
conditions, ``beta = mu/2``).  Each ``U_k`` is carried as a Taylor jet in
``x`` about the evaluation site, so ``U_k''`` is exact.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fraccalc import FracOrder, gamma_fn, ratio_standard
from .jets import Jet, JetOrderError, jet_add, jet_const, jet_d2, jet_elem, jet_scale, jet_truncate
from .transform import CoeffSeq, monomial_source_term, _conv_terms

__all__ = [
    "Term",
    "InitialData",
    "Nonlinearity",
    "SourceMonomial",
    "ProblemSpec",
    "SeriesSolution",
    "BUILTIN_IDS",
    "builtin_problem",
    "rhs_coefficient",
    "solve_frdtm",
    "eval_series",
    "eval_series_partial",
    "eval_grid",
]

_TERM_KINDS = ("const", "sin", "cos", "exp", "sech", "pow")


@dataclass(frozen=True)
class Term:
    """``coef * f(scale * x)`` for an elementary ``f``, or ``coef * x**power`` when ``kind == 'pow'``."""

    kind: str
    coef: float = 1.0
    scale: float = 1.0
    power: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _TERM_KINDS:
            raise ValueError(f"unknown term kind {self.kind!r}; expected one of {_TERM_KINDS}")
        if self.kind == "pow" and self.power < 0:
            raise ValueError("x-power must be non-negative")

    def jet(self, x0: float, J: int) -> Jet:
        if self.kind == "const":
            return jet_const(self.coef, x0, J)
        if self.kind == "pow":
            coeffs = np.zeros(J + 1)
            for j in range(min(self.power, J) + 1):
                coeffs[j] = math.comb(self.power, j) * x0 ** (self.power - j)
            return Jet(x0, self.coef * coeffs)
        base = jet_elem(self.kind, self.scale * x0, J)
        return Jet(x0, self.coef * base.coeffs * self.scale ** np.arange(J + 1, dtype=float))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "const":
            return np.full_like(x, self.coef)
        if self.kind == "pow":
            return self.coef * x**self.power
        y = self.scale * x
        f = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sech": lambda v: 1.0 / np.cosh(v)}[self.kind]
        return self.coef * f(y)


@dataclass(frozen=True)
class InitialData:
    """A finite sum of :class:`Term`; the empty sum is the zero function."""

    terms: tuple[Term, ...] = ()

    def jet(self, x0: float, J: int) -> Jet:
        acc = jet_const(0.0, x0, J)
        for term in self.terms:
            acc = jet_add(acc, term.jet(x0, J))
        return acc

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for term in self.terms:
            out = out + term(x)
        return out

    @property
    def is_zero(self) -> bool:
        return all(t.coef == 0.0 for t in self.terms)


@dataclass(frozen=True)
class Nonlinearity:
    """``G(u)``: ``none``, ``square`` (u**2), ``cube`` (u**3) or ``poly`` (sum_p c_p u**p, p >= 1)."""

    kind: str = "none"
    coeffs: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("none", "square", "cube", "poly"):
            raise ValueError(f"unknown nonlinearity {self.kind!r}")
        if self.kind == "poly" and not self.coeffs:
            raise ValueError("poly nonlinearity needs at least one coefficient")

    @property
    def poly(self) -> tuple[float, ...]:
        """Coefficients ``c_1 .. c_P`` of the equivalent polynomial."""
        if self.kind == "none":
            return ()
        if self.kind == "square":
            return (0.0, 1.0)
        if self.kind == "cube":
            return (0.0, 0.0, 1.0)
        return tuple(float(c) for c in self.coeffs)

    def value(self, u):
        out = np.zeros_like(u, dtype=float)
        for p, c in enumerate(self.poly, start=1):
            if c:
                out = out + c * u**p
        return out

    def derivative(self, u):
        out = np.zeros_like(u, dtype=float)
        for p, c in enumerate(self.poly, start=1):
            if c:
                out = out + p * c * u ** (p - 1)
        return out


@dataclass(frozen=True)
class SourceMonomial:
    """``coef * x**x_power * t**(t_index * beta)``; its transform is ``coef x**m delta(k - t_index)``."""

    coef: float
    x_power: int = 0
    t_index: int = 0


@dataclass(frozen=True)
class ProblemSpec:
    order: FracOrder
    a: float = 0.0
    b: float = 0.0
    G: Nonlinearity = field(default_factory=Nonlinearity)
    f: tuple[SourceMonomial, ...] = ()
    g0: InitialData = field(default_factory=InitialData)
    g1: InitialData | None = None
    allow_fractional_g1: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        if self.order.ic_count == 2 and self.g1 is None:
            raise ValueError(f"mu = {self.order.mu} > 1 needs a second initial condition g1")
        if self.order.ic_count == 1 and self.g1 is not None and not self.g1.is_zero:
            raise ValueError(f"mu = {self.order.mu} <= 1 takes a single initial condition")
        if (
            self.order.ic_count == 2
            and self.order.beta != 1.0
            and not self.g1.is_zero
            and not self.allow_fractional_g1
        ):
            raise ValueError(
                "nonzero g1 with 1 < mu < 2 has no validated seeding; "
                "set allow_fractional_g1=True to seed U_1 = g1 / Gamma(beta + 1)"
            )


BUILTIN_IDS = ("ex41", "ex42", "ex43", "ex44")


def builtin_problem(example_id: str, alpha: float) -> ProblemSpec:
    """The four worked examples, mapped to the canonical sign convention.

    ======  ==========  =====  =====  =======  ===========  ========
    id      alpha       a      b      G        g0           g1
    ======  ==========  =====  =====  =======  ===========  ========
    ex41    (0, 1]      1      0      none     1 + sin x    --
    ex42    (0, 1]      0      -1     square   1 + sin x    --
    ex43    (0, 1]      -1     1      cube     -sech x      --
    ex44    (1, 2]      0      -1     square   1 + sin x    0
    ======  ==========  =====  =====  =======  ===========  ========
    """
    alpha = float(alpha)
    one_plus_sin = InitialData((Term("const", 1.0), Term("sin", 1.0)))
    if example_id in ("ex41", "ex42", "ex43"):
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"{example_id} needs 0 < alpha <= 1, got {alpha}")
        order = FracOrder(alpha)
        if example_id == "ex41":
            return ProblemSpec(order, a=1.0, b=0.0, g0=one_plus_sin, name="ex41")
        if example_id == "ex42":
            return ProblemSpec(order, a=0.0, b=-1.0, G=Nonlinearity("square"), g0=one_plus_sin, name="ex42")
        return ProblemSpec(
            order, a=-1.0, b=1.0, G=Nonlinearity("cube"), g0=InitialData((Term("sech", -1.0),)), name="ex43"
        )
    if example_id == "ex44":
        if not 1.0 < alpha <= 2.0:
            raise ValueError(f"ex44 needs 1 < alpha <= 2, got {alpha}")
        return ProblemSpec(
            FracOrder(alpha),
            a=0.0,
            b=-1.0,
            G=Nonlinearity("square"),
            g0=one_plus_sin,
            g1=InitialData(),
            name="ex44",
        )
    raise ValueError(f"unknown builtin problem {example_id!r}; expected one of {BUILTIN_IDS}")


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    seq: CoeffSeq
    problem: ProblemSpec
    N: int

    @property
    def x0(self) -> float:
        return self.seq.base_point

    def coefficients(self) -> list[float]:
        return self.seq.values()


class _Powers:
    """Incrementally built coefficient sequences of ``u**p``."""

    def __init__(self, max_power: int) -> None:
        self.seqs: dict[int, list[Jet]] = {p: [] for p in range(2, max_power + 1)}

    def term(self, terms: Sequence[Jet], p: int, k: int) -> Jet:
        if p == 1:
            return terms[k]
        seq = self.seqs[p]
        while len(seq) <= k:
            r = len(seq)
            if p > 2:
                self.term(terms, p - 1, r)
            lower = terms if p == 2 else self.seqs[p - 1]
            seq.append(_conv_terms(lower, terms, r))
        return seq[k]


def _rhs(p: ProblemSpec, terms: Sequence[Jet], k: int, powers: _Powers) -> Jet:
    Uk = terms[k]
    if Uk.order < 2:
        need = terms[0].order + 2 - Uk.order
        raise JetOrderError(f"U_{k} has jet order {Uk.order} < 2; seed U_0 with order >= {need}")
    out = jet_d2(Uk)
    J = out.order
    if p.a:
        out = jet_add(out, jet_scale(jet_truncate(Uk, J), p.a))
    if p.b:
        for power, c in enumerate(p.G.poly, start=1):
            if c:
                Gk = jet_truncate(powers.term(terms, power, k), J)
                out = jet_add(out, jet_scale(Gk, p.b * c))
    for mono in p.f:
        out = jet_add(out, monomial_source_term(mono.coef, mono.x_power, mono.t_index, k, Uk.base_point, J))
    return out


def rhs_coefficient(p: ProblemSpec, U: CoeffSeq, k: int) -> Jet:
    """``U_k'' + a U_k + b G_k + F_k`` from the terms ``U_0 .. U_k``."""
    if not 0 <= k < len(U):
        raise IndexError(f"index {k} out of range for a sequence of length {len(U)}")
    return _rhs(p, U.terms, k, _Powers(len(p.G.poly)))


def _step_order(k: int, step: int) -> int:
    # jet order of U_k when U_0 is seeded at order J: J - 2k (one IC) or J - k (two ICs)
    return 2 * k if step == 1 else k


def solve_frdtm(p: ProblemSpec, x0: float, N: int, seed_order: int | None = None, t0: float = 0.0) -> SeriesSolution:
    """Generate ``U_0 .. U_N`` at the site ``x0``."""
    if N < 1:
        raise ValueError(f"truncation order N must be >= 1, got {N}")
    order = p.order
    step = order.ic_count
    J = 2 * N if seed_order is None else int(seed_order)
    need = _step_order(N, step)
    if J < need:
        raise JetOrderError(f"seed order {J} cannot produce U_{N}; seed U_0 with order >= {need}")

    terms: list[Jet] = [p.g0.jet(x0, J)]
    if step == 2:
        g1 = p.g1.jet(x0, J - 1)
        if order.beta != 1.0:
            g1 = jet_scale(g1, 1.0 / gamma_fn(order.beta + 1.0))
        terms.append(g1)

    powers = _Powers(len(p.G.poly))
    underflow_at = None
    for k in range(N + 1 - step):
        ratio = ratio_standard(order, k, step)
        if ratio == 0.0 and underflow_at is None:
            underflow_at = k + step
        terms.append(jet_scale(_rhs(p, terms, k, powers), ratio))
    if underflow_at is not None:
        warnings.warn(
            f"Gamma ratio underflowed to zero from U_{underflow_at} on; later terms are zero",
            RuntimeWarning,
            stacklevel=2,
        )
    return SeriesSolution(CoeffSeq(tuple(terms[: N + 1]), order, t0), p, N)


def eval_series_partial(s: SeriesSolution, t: float, n: int) -> float:
    """``sum_{k<=n} U_k(x0) (t - t0)**(k*beta)``."""
    if not 0 <= n <= s.N:
        raise ValueError(f"partial order n must lie in [0, {s.N}], got {n}")
    t0 = s.seq.t0
    if t < t0:
        raise ValueError(f"t = {t} precedes the expansion time t0 = {t0}")
    values = s.seq.values()
    if t == t0:
        return values[0]
    log_dt = math.log(t - t0)
    beta = s.seq.beta
    total = values[0]
    for k in range(1, n + 1):
        if values[k]:
            total += values[k] * math.exp(k * beta * log_dt)
    return total


def eval_series(s: SeriesSolution, t: float) -> float:
    return eval_series_partial(s, t, s.N)


def _grid_row(args: tuple[ProblemSpec, float, tuple[float, ...], int]) -> list[float]:
    p, x, ts, N = args
    sol = solve_frdtm(p, x, N)
    return [eval_series(sol, t) for t in ts]


def eval_grid(
    p: ProblemSpec,
    xs: Sequence[float],
    ts: Sequence[float],
    N: int,
    workers: int = 1,
) -> np.ndarray:
    """Series values on ``xs x ts``; row ``i`` is site ``xs[i]``.

    Every site is solved independently, so ``workers > 1`` fans sites out to
    a process pool without changing the result.
    """
    ts = tuple(float(t) for t in ts)
    if any(t < 0.0 for t in ts):
        raise ValueError("time samples must be non-negative")
    jobs = [(p, float(x), ts, N) for x in xs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_grid_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_grid_row(job) for job in jobs]
    return np.array(rows, dtype=float).reshape(len(jobs), len(ts))
