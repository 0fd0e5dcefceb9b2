import math

import numpy as np
import pytest
import scipy.sparse as sp

from frdtm.fraccalc import FracOrder
from frdtm.reference import (
    GaussLegendre2,
    Grid1D,
    StepFailure,
    integrate,
    irk_step,
    laplacian,
    laplacian_matrix,
    reference_grid,
)
from frdtm.solver import InitialData, ProblemSpec, Term, builtin_problem, eval_series, solve_frdtm


def scalar_stepper(lam, **kw):
    return GaussLegendre2(lambda t, y: lam * y, lambda t, y: sp.csr_matrix([[lam]]), **kw)


class TestGrid:
    def test_nodes_and_lookup(self):
        g = Grid1D(0.0, 2 * math.pi, 8)
        assert g.size == 8
        assert g.node_index(2 * math.pi) == 0
        assert g.node_index(math.pi / 2) == 2
        with pytest.raises(ValueError):
            g.node_index(0.1)
        d = Grid1D(-1.0, 1.0, 4, "dirichlet_frozen")
        assert d.size == 5
        assert d.nodes[-1] == 1.0
        with pytest.raises(ValueError):
            d.node_index(1.5)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Grid1D(1.0, 0.0, 8)
        with pytest.raises(ValueError):
            Grid1D(0.0, 1.0, 8, "neumann")

    def test_reference_grid_choice(self):
        g = reference_grid(builtin_problem("ex42", 1.0), 2.0)
        assert g.boundary == "periodic" and g.node_index(2.0) == 0
        g = reference_grid(builtin_problem("ex43", 1.0), 0.0)
        assert g.boundary == "dirichlet_frozen" and (g.x_lo, g.x_hi) == (-8.0, 8.0)
        assert g.nodes[g.node_index(0.0)] == 0.0


class TestLaplacian:
    def test_constant(self):
        g = Grid1D(0.0, 1.0, 16, "dirichlet_frozen")
        assert not laplacian(g, np.full(g.size, 3.0)).any()

    def test_sin_periodic(self):
        g = Grid1D(0.0, 2 * math.pi, 512)
        x = g.nodes
        assert np.max(np.abs(laplacian(g, np.sin(x)) + np.sin(x))) < 1e-4

    def test_quadratic_interior(self):
        g = Grid1D(-1.0, 2.0, 30, "dirichlet_frozen")
        out = laplacian(g, g.nodes**2)
        np.testing.assert_allclose(out[1:-1], 2.0, atol=1e-9)
        assert out[0] == out[-1] == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            laplacian(Grid1D(0.0, 1.0, 8), np.zeros(9))

    @pytest.mark.parametrize("boundary", ["periodic", "dirichlet_frozen"])
    def test_matrix_matches_stencil(self, boundary):
        g = Grid1D(0.0, 2 * math.pi, 32, boundary)
        u = np.cos(3 * g.nodes) + 0.1 * g.nodes
        np.testing.assert_allclose(laplacian_matrix(g) @ u, laplacian(g, u), atol=1e-12)

    def test_second_order(self):
        errs = []
        for n in (32, 64, 128, 256):
            g = Grid1D(0.0, 2 * math.pi, n)
            errs.append(np.max(np.abs(laplacian(g, np.sin(g.nodes)) + np.sin(g.nodes))))
        ratios = [errs[i] / errs[i + 1] for i in range(3)]
        assert all(abs(r - 4.0) <= 0.2 for r in ratios), ratios


class TestGaussLegendre:
    def test_growth_matches_stability_function(self):
        # a single step multiplies by the (2,2) Pade approximant of exp(z)
        z = 0.1
        pade = (1 + z / 2 + z * z / 12) / (1 - z / 2 + z * z / 12)
        y = scalar_stepper(1.0).step(0.0, np.array([1.0]), 0.1)[0]
        assert y == pytest.approx(pade, abs=1e-15)
        assert abs(y - math.exp(0.1)) < 2e-8

    def test_stiff_order(self):
        errs = []
        for dt in (1e-2, 5e-3, 2.5e-3):
            stepper = scalar_stepper(-50.0)
            y = np.array([1.0])
            n = int(round(0.2 / dt))
            for i in range(n):
                y = stepper.step(i * dt, y, dt)
            errs.append(abs(y[0] - math.exp(-10.0)))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert all(abs(q - 4.0) <= 0.3 for q in orders), orders

    def test_factorization_reuse(self):
        stepper = scalar_stepper(-2.0)
        y = np.array([1.0])
        for i in range(10):
            y = stepper.step(i * 0.01, y, 0.01)
        assert stepper.factorizations == 1
        stepper.step(0.1, y, 0.02)
        assert stepper.factorizations == 2

    def test_failure_carries_residual(self):
        # u' = u^2 from u = 1 blows up at t = 1; a step across the pole cannot converge
        stepper = GaussLegendre2(lambda t, y: y * y, lambda t, y: sp.csr_matrix([[2 * y[0]]]), maxiter=5)
        with pytest.raises(StepFailure) as info:
            stepper.step(0.0, np.array([1.0]), 2.0)
        assert info.value.residual > 0

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            scalar_stepper(1.0).step(0.0, np.array([1.0]), 0.0)


class TestIrk:
    def test_stationary(self):
        p = ProblemSpec(FracOrder(1.0), g0=InitialData((Term("const", 2.5),)))
        g = Grid1D(0.0, 2 * math.pi, 16)
        y = irk_step(p, g, np.full(16, 2.5), 0.1)
        np.testing.assert_allclose(y, 2.5, atol=1e-14)

    def test_state_shape(self):
        p = builtin_problem("ex44", 2.0)
        g = reference_grid(p, 2.0, n_cells=16)
        with pytest.raises(ValueError):
            irk_step(p, g, np.zeros(16), 0.1)
        assert irk_step(p, g, np.zeros(32), 0.1).shape == (32,)

    def test_fractional_rejected(self):
        p = builtin_problem("ex42", 0.5)
        with pytest.raises(ValueError):
            integrate(p, reference_grid(p, 2.0, n_cells=16), 0.1, 0.01)

    def test_ex41_exact_solution(self):
        p = builtin_problem("ex41", 1.0)
        sol = integrate(p, reference_grid(p, 0.0), 0.8, 1e-3)
        assert sol.at(0.0)[-1] == pytest.approx(math.exp(0.8), abs=5e-5)
        assert sol.at(0.0)[-1] == pytest.approx(2.2255409285, abs=5e-5)


class TestIntegrate:
    def test_t_end_zero(self):
        p = builtin_problem("ex42", 1.0)
        g = reference_grid(p, 2.0, n_cells=32)
        sol = integrate(p, g, 0.0, 0.01)
        assert sol.values.shape == (1, 32)
        np.testing.assert_array_equal(sol.values[0], p.g0(g.nodes))

    def test_record_validation(self):
        p = builtin_problem("ex42", 1.0)
        g = reference_grid(p, 2.0, n_cells=32)
        with pytest.raises(ValueError):
            integrate(p, g, 0.1, 0.03)
        with pytest.raises(ValueError):
            integrate(p, g, 0.1, 0.01, record=[0.015])
        with pytest.raises(ValueError):
            integrate(p, g, 0.1, 0.01, record=[0.2])
        sol = integrate(p, g, 0.1, 0.01, record=[0.05, 0.0, 0.1])
        assert sol.times.tolist() == [0.0, 0.05, 0.1]

    def test_periodicity_check(self):
        # cos(x/2) is 1 at 0 and -1 at 2 pi
        p = ProblemSpec(FracOrder(1.0), g0=InitialData((Term("cos", scale=0.5),)))
        with pytest.raises(ValueError):
            integrate(p, Grid1D(0.0, 2 * math.pi, 16), 0.1, 0.01)

    def test_ex42_near_four_term_series(self):
        p = builtin_problem("ex42", 1.0)
        sol = integrate(p, reference_grid(p, 2.0), 0.01, 1e-4)
        series = eval_series(solve_frdtm(p, 2.0, 3), 0.01)
        assert abs(sol.at(2.0)[-1] - series) < 2e-3

    def test_ex44_against_series(self):
        p = builtin_problem("ex44", 2.0)
        sol = integrate(p, reference_grid(p, 2.0, n_cells=512), 0.2, 1e-3)
        assert abs(sol.at(2.0)[-1] - eval_series(solve_frdtm(p, 2.0, 12), 0.2)) < 1e-4

    def test_deterministic(self):
        p = builtin_problem("ex43", 1.0)
        g = reference_grid(p, 0.0, n_cells=64)
        a = integrate(p, g, 0.05, 1e-2)
        b = integrate(p, g, 0.05, 1e-2)
        assert np.array_equal(a.values, b.values)

    def test_interpolated_probe(self):
        p = builtin_problem("ex41", 1.0)
        g = Grid1D(0.0, 2 * math.pi, 256)
        sol = integrate(p, g, 0.0, 0.1)
        assert sol.at(1.0)[0] == pytest.approx(1 + math.sin(1.0), abs=1e-3)

    def test_wave_energy(self):
        # u_tt = u_xx is symplectic-integrated: the discrete energy is a conserved quadratic invariant
        p = ProblemSpec(FracOrder(2.0), g0=InitialData((Term("sin"),)), g1=InitialData((Term("cos", 0.5, 2.0),)))
        g = Grid1D(0.0, 2 * math.pi, 256)
        n = g.size

        def energy(y):
            u, v = y[:n], y[n:]
            du = (np.roll(u, -1) - u) / g.h
            return 0.5 * np.sum(v * v + du * du) * g.h

        from frdtm.reference import _MolSystem

        system = _MolSystem(p, g)
        y = system.initial_state()
        stepper = GaussLegendre2(system.rhs, system.jac)
        e0 = energy(y)
        for i in range(2000):
            y = stepper.step(i * 1e-4, y, 1e-4)
        assert abs(energy(y) - e0) / e0 < 1e-6
