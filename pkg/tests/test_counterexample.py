import math

import numpy as np
import pytest

from chicap.counterexample import (
    CounterexamplePoint,
    g_ode_residual,
    gap_report,
    h2,
    h_sequence,
    h_value,
    solve_g,
    state_rho_n,
)
from chicap import entropy

from oracles import h2 as h2_oracle


class TestSolveG:
    def test_defining_equation_residual(self):
        for x in (1.0, 2.0, 10.0, 1e3, 1e6):
            g = solve_g(x)
            assert abs(g * (1.0 - math.log(g / x)) - math.log(2.0)) <= 1e-12

    def test_frozen_value_at_one(self):
        # g(1)(1 - ln g(1)) = ln 2; root found independently by bisection.
        assert solve_g(1.0) == pytest.approx(0.32756241397751684, abs=1e-12)

    def test_monotone_decreasing(self):
        xs = [1.0, 3.0, 10.0, 100.0, 1e4, 1e6]
        gs = [solve_g(x) for x in xs]
        assert all(gs[i + 1] < gs[i] for i in range(len(gs) - 1))

    def test_vanishes_at_infinity(self):
        assert solve_g(1e9) < 1e-8 * solve_g(1.0) or solve_g(1e9) < 0.05

    def test_rejects_x_below_one(self):
        with pytest.raises(ValueError):
            solve_g(0.5)

    def test_ode_residual(self):
        for x in (2.0, 10.0, 100.0, 1e4):
            assert g_ode_residual(x) <= 1e-6


class TestHValue:
    def test_matches_entropy_of_state(self):
        for n in (1, 2, 10, 50):
            rho = state_rho_n(n)
            assert entropy(rho.entries) == pytest.approx(h_value(float(n)), abs=1e-10)

    def test_binary_entropy_against_oracle(self):
        for q in (0.1, 0.3, 0.5, 0.9):
            assert h2(q) == pytest.approx(h2_oracle(q), abs=1e-15)

    def test_strictly_increasing_below_one(self):
        xs = [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6]
        hs = [h_value(x) for x in xs]
        assert all(hs[i + 1] > hs[i] for i in range(len(hs) - 1))
        assert all(h < 1.0 for h in hs)

    def test_approaches_one(self):
        assert h_value(1e6) > 0.99


class TestStates:
    def test_state_shape_and_trace(self):
        rho = state_rho_n(5)
        assert rho.dim == 6
        assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-12)

    def test_mass_profile(self):
        n = 7
        q = solve_g(float(n))
        d = np.diag(state_rho_n(n).entries).real
        assert d[0] == pytest.approx(1.0 - q, abs=1e-14)
        assert np.allclose(d[1:], q / n)

    def test_rejects_n_below_one(self):
        with pytest.raises(ValueError):
            state_rho_n(0)


class TestGapReport:
    def test_sweep(self):
        report = gap_report(10**6)
        assert len(report.points) == 7  # n = 10^0 .. 10^6
        assert all(p.residual <= 1e-12 for p in report.points)
        hs = [p.h_value for p in report.points]
        assert all(hs[i + 1] > hs[i] for i in range(len(hs) - 1))
        assert report.chi_limit_state == 0.0
        assert report.gap >= 0.99
        assert "not attained" in report.conclusion

    def test_custom_grid(self):
        points = h_sequence(100, grid=[10, 50, 100])
        assert [p.n for p in points] == [10, 50, 100]
        assert isinstance(points[0], CounterexamplePoint)
        assert points[0].state_dim == 11

    def test_grid_point_beyond_nmax_rejected(self):
        with pytest.raises(ValueError):
            h_sequence(10, grid=[5, 20])

    def test_nmax_floor(self):
        with pytest.raises(ValueError):
            gap_report(5)
