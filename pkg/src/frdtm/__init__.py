"""Series solutions of time-fractional Klein-Gordon equations by the fractional
reduced differential transform, with a method-of-lines reference solver."""

from .fraccalc import FracOrder, caputo_monomial, gamma_fn, ratio_standard, rl_integral_monomial
from .jets import Jet, jet_const, jet_d2, jet_elem, jet_mul
from .solver import (
    InitialData,
    Nonlinearity,
    ProblemSpec,
    SeriesSolution,
    SourceMonomial,
    Term,
    builtin_problem,
    eval_grid,
    eval_series,
    eval_series_partial,
    solve_frdtm,
)
from .transform import CoeffSeq

__version__ = "0.1.0"
