"""Method-of-lines reference solver for the integer-order cases.

Space is discretized with the 3-point Laplacian; time with the 2-stage
Gauss-Legendre implicit Runge-Kutta method (order 4, A-stable).  The stage
equations are solved by a simplified Newton iteration whose factorized
matrix is reused while the step size is unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .solver import ProblemSpec

__all__ = [
    "Grid1D",
    "GridSolution",
    "StepFailure",
    "GL2_A",
    "GL2_B",
    "GL2_C",
    "GaussLegendre2",
    "laplacian",
    "laplacian_matrix",
    "reference_grid",
    "irk_step",
    "integrate",
]

_S3 = math.sqrt(3.0)
GL2_A = np.array([[0.25, 0.25 - _S3 / 6.0], [0.25 + _S3 / 6.0, 0.25]])
GL2_B = np.array([0.5, 0.5])
GL2_C = np.array([0.5 - _S3 / 6.0, 0.5 + _S3 / 6.0])


class StepFailure(RuntimeError):
    """Newton iteration for the implicit stages did not converge."""

    def __init__(self, message: str, residual: float, t: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual
        self.t = t


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n_cells: int
    boundary: str = "periodic"

    def __post_init__(self) -> None:
        if self.boundary not in ("periodic", "dirichlet_frozen"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.n_cells < 2 or not self.x_hi > self.x_lo:
            raise ValueError("grid needs x_hi > x_lo and at least two cells")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        # periodic grids drop the duplicate right end
        count = self.n_cells if self.boundary == "periodic" else self.n_cells + 1
        return self.x_lo + self.h * np.arange(count)

    @property
    def size(self) -> int:
        return self.n_cells if self.boundary == "periodic" else self.n_cells + 1

    def node_index(self, x: float, tol: float = 1e-9) -> int:
        """Index of the node at ``x`` (modulo the period on periodic grids)."""
        pos = (x - self.x_lo) / self.h
        if self.boundary == "periodic":
            pos %= self.n_cells
        i = int(round(pos))
        if abs(pos - i) > tol:
            raise ValueError(f"x = {x} is not a grid node")
        if self.boundary == "periodic":
            i %= self.n_cells
        if not 0 <= i < self.size:
            raise ValueError(f"x = {x} lies outside the grid")
        return i


@dataclass(frozen=True, eq=False)
class GridSolution:
    grid: Grid1D
    times: np.ndarray
    values: np.ndarray

    def at(self, x: float) -> np.ndarray:
        """Time series at ``x``: exact node lookup, else linear interpolation."""
        try:
            return self.values[:, self.grid.node_index(x)]
        except ValueError:
            nodes = self.grid.nodes
            if self.grid.boundary == "periodic":
                period = self.grid.x_hi - self.grid.x_lo
                return np.array([np.interp(x, nodes, row, period=period) for row in self.values])
            return np.array([np.interp(x, nodes, row) for row in self.values])


def laplacian(grid: Grid1D, u: np.ndarray) -> np.ndarray:
    """Central second difference; rows of frozen boundary nodes are zero."""
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.size,):
        raise ValueError(f"vector of length {u.shape} does not match grid of {grid.size} nodes")
    inv_h2 = 1.0 / grid.h**2
    if grid.boundary == "periodic":
        return (np.roll(u, 1) - 2.0 * u + np.roll(u, -1)) * inv_h2
    out = np.zeros_like(u)
    out[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) * inv_h2
    return out


def laplacian_matrix(grid: Grid1D) -> sp.csr_matrix:
    n = grid.size
    inv_h2 = 1.0 / grid.h**2
    main = np.full(n, -2.0 * inv_h2)
    off = np.full(n - 1, inv_h2)
    L = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    if grid.boundary == "periodic":
        L[0, n - 1] = inv_h2
        L[n - 1, 0] = inv_h2
    else:
        L[0, :] = 0.0
        L[n - 1, :] = 0.0
    return L.tocsr()


def _is_periodic_data(p: ProblemSpec) -> bool:
    parts = list(p.g0.terms) + (list(p.g1.terms) if p.g1 is not None else [])
    return all(
        t.kind == "const" or (t.kind in ("sin", "cos") and float(t.scale).is_integer())
        for t in parts
    ) and not p.f


def reference_grid(p: ProblemSpec, x_probe: float, n_cells: int = 1024, half_width: float = 8.0) -> Grid1D:
    """Grid with ``x_probe`` on a node.

    2*pi-periodic initial data gets a periodic grid starting at the probe;
    anything else gets frozen Dirichlet ends ``half_width`` either side.
    """
    if _is_periodic_data(p):
        return Grid1D(x_probe, x_probe + 2.0 * math.pi, n_cells, "periodic")
    return Grid1D(x_probe - half_width, x_probe + half_width, n_cells, "dirichlet_frozen")


class _MolSystem:
    """Semi-discrete right-hand side ``y' = F(t, y)`` and its Jacobian."""

    def __init__(self, p: ProblemSpec, grid: Grid1D) -> None:
        mu = p.order.mu
        if mu not in (1.0, 2.0):
            raise ValueError(f"the reference solver handles mu = 1 or 2 only, got {mu}")
        self.p = p
        self.grid = grid
        self.n = grid.size
        self.second_order = mu == 2.0
        self.L = laplacian_matrix(grid)
        self.x = grid.nodes
        mask = np.ones(self.n)
        if grid.boundary == "dirichlet_frozen":
            mask[0] = mask[-1] = 0.0
        self.mask = mask

    def initial_state(self) -> np.ndarray:
        u0 = self.p.g0(self.x)
        if self.grid.boundary == "periodic":
            period_end = self.p.g0(np.array([self.grid.x_hi]))[0]
            if abs(period_end - u0[0]) > 1e-12:
                raise ValueError("periodic grid needs g0(x_lo) == g0(x_hi)")
        if not self.second_order:
            return u0
        v0 = self.p.g1(self.x) * self.mask
        return np.concatenate([u0, v0])

    def _source(self, t: float) -> np.ndarray:
        out = np.zeros(self.n)
        for mono in self.p.f:
            out += mono.coef * self.x**mono.x_power * t**mono.t_index
        return out

    def _accel(self, t: float, u: np.ndarray) -> np.ndarray:
        p = self.p
        acc = self.L @ u + p.a * u + self._source(t)
        if p.b:
            acc = acc + p.b * p.G.value(u)
        return acc * self.mask

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        if not self.second_order:
            return self._accel(t, y)
        u, v = y[: self.n], y[self.n :]
        return np.concatenate([v * self.mask, self._accel(t, u)])

    def jac(self, t: float, y: np.ndarray) -> sp.csr_matrix:
        p = self.p
        u = y[: self.n]
        diag = p.a + (p.b * p.G.derivative(u) if p.b else 0.0)
        D = sp.diags(self.mask) @ (self.L + sp.diags(np.broadcast_to(diag, (self.n,))))
        if not self.second_order:
            return D.tocsr()
        M = sp.diags(self.mask)
        Z = sp.csr_matrix((self.n, self.n))
        return sp.bmat([[Z, M], [D, Z]], format="csr")


Rhs = Callable[[float, np.ndarray], np.ndarray]
Jac = Callable[[float, np.ndarray], "sp.spmatrix | np.ndarray"]


class GaussLegendre2:
    """2-stage Gauss-Legendre stepper with a cached simplified-Newton matrix."""

    def __init__(self, rhs: Rhs, jac: Jac, tol: float = 1e-12, maxiter: int = 25) -> None:
        self.rhs = rhs
        self.jac = jac
        self.tol = tol
        self.maxiter = maxiter
        self._lu = None
        self._dt = None
        self.factorizations = 0

    def _factor(self, t: float, y: np.ndarray, dt: float) -> None:
        J = sp.csc_matrix(self.jac(t, y))
        n = J.shape[0]
        M = sp.identity(2 * n, format="csc") - dt * sp.kron(sp.csc_matrix(GL2_A), J, format="csc")
        self._lu = spla.splu(M)
        self._dt = dt
        self.factorizations += 1

    def _stage_residual(self, t: float, y: np.ndarray, Z: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
        F = np.stack([self.rhs(t + GL2_C[i] * dt, y + Z[i]) for i in range(2)])
        return Z - dt * (GL2_A @ F), F

    def _newton(self, t: float, y: np.ndarray, dt: float) -> tuple[np.ndarray | None, float]:
        n = y.size
        Z = np.zeros((2, n))
        res = math.inf
        for _ in range(self.maxiter):
            R, F = self._stage_residual(t, y, Z, dt)
            res = float(np.max(np.abs(R)))
            if res <= self.tol:
                return F, res
            dZ = self._lu.solve(-R.reshape(-1)).reshape(2, n)
            Z = Z + dZ
            if float(np.max(np.abs(dZ))) <= 1e-15 * max(1.0, float(np.max(np.abs(y)))):
                R, F = self._stage_residual(t, y, Z, dt)
                return F, float(np.max(np.abs(R)))
        return None, res

    def step(self, t: float, y: np.ndarray, dt: float) -> np.ndarray:
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        y = np.asarray(y, dtype=float)
        if self._lu is None or self._dt != dt:
            self._factor(t, y, dt)
        F, res = self._newton(t, y, dt)
        if F is None:
            # stale Jacobian: refresh at the current state once
            self._factor(t, y, dt)
            F, res = self._newton(t, y, dt)
        if F is None:
            raise StepFailure(f"Newton did not converge (residual {res:.3e})", res, t)
        return y + dt * (GL2_B @ F)


def irk_step(p: ProblemSpec, grid: Grid1D, state: np.ndarray, dt: float, t: float = 0.0) -> np.ndarray:
    """One Gauss-Legendre step of the semi-discrete problem.

    For ``mu = 2`` the state is ``concatenate([u, u_t])``.
    """
    system = _MolSystem(p, grid)
    expected = system.n * (2 if system.second_order else 1)
    if np.shape(state) != (expected,):
        raise ValueError(f"state of shape {np.shape(state)} does not match {expected} unknowns")
    return GaussLegendre2(system.rhs, system.jac).step(t, state, dt)


def integrate(
    p: ProblemSpec,
    grid: Grid1D,
    t_end: float,
    dt: float,
    record: Sequence[float] | None = None,
) -> GridSolution:
    """Integrate from ``t = 0`` to ``t_end`` with fixed step ``dt``.

    ``record`` lists output times (default: ``0`` and ``t_end``); each must
    be a whole number of steps.
    """
    if t_end < 0.0 or not dt > 0.0:
        raise ValueError("need t_end >= 0 and dt > 0")
    system = _MolSystem(p, grid)
    y = system.initial_state()
    n = system.n

    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"dt = {dt} does not divide t_end = {t_end}")
    record = [0.0, t_end] if record is None else sorted(set(float(t) for t in record))
    marks: dict[int, float] = {}
    for t in record:
        if t < 0.0 or t > t_end + 1e-12:
            raise ValueError(f"record time {t} outside [0, {t_end}]")
        i = int(round(t / dt))
        if abs(i * dt - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"record time {t} is not a multiple of dt = {dt}")
        marks[i] = t

    stepper = GaussLegendre2(system.rhs, system.jac)
    times, rows = [], []
    if 0 in marks:
        times.append(marks[0])
        rows.append(y[:n].copy())
    for i in range(1, n_steps + 1):
        t = (i - 1) * dt
        try:
            y = stepper.step(t, y, dt)
        except StepFailure as exc:
            raise StepFailure(f"step failure at t = {t:.6g}: {exc}", exc.residual, t) from exc
        if i in marks:
            times.append(marks[i])
            rows.append(y[:n].copy())
    return GridSolution(grid, np.array(times), np.array(rows))
