import numpy as np
import pytest

from dicke_qb.analysis import (
    critical_eta,
    cutoff_convergence,
    fit_power_scaling,
    ground_state_sz,
    power_scaling,
    sweep,
)
from dicke_qb.dynamics import find_extrema
from dicke_qb.model import ChargingProtocol, ModelParams

FAST = ChargingProtocol(search_horizon=10.0, coarse_points=400)


class TestCriticalEta:
    def test_reference_points(self):
        assert critical_eta(0.1, 10) == pytest.approx(0.6)
        assert critical_eta(0.5, 10) == pytest.approx(-9.0)
        assert critical_eta(0.0, 10) == 1.0

    def test_off_resonance_form(self):
        assert critical_eta(0.2, 5, omega_a=2.0, omega_c=0.5) == pytest.approx(2.0 - 4 * 0.04 * 5 / 0.5)
        with pytest.raises(ValueError):
            critical_eta(0.1, 10, omega_c=0.0)


class TestGroundState:
    def test_normal_phase_limit(self):
        gs = ground_state_sz(ModelParams(n_tls=10, g=1e-4))
        assert gs.ratio == pytest.approx(-1.0, abs=1e-6)
        assert not gs.degenerate

    def test_mott_regime_small_inversion(self):
        # far above the critical interaction the inversion collapses toward 0
        gs = ground_state_sz(ModelParams(n_tls=10, g=0.1, eta=5.0))
        assert abs(gs.ratio) < 0.25
        assert gs.ratio == pytest.approx(-0.192582007, abs=1e-6)

    def test_ratio_bounded(self):
        for eta in (-4.0, 0.0, 4.0):
            gs = ground_state_sz(ModelParams(n_tls=6, g=0.3, eta=eta))
            assert -1.0 - 1e-9 <= gs.ratio <= 1.0 + 1e-9

    def test_degenerate_superradiant_doublet_flagged(self):
        gs = ground_state_sz(ModelParams(n_tls=10, g=2.0))
        assert gs.degenerate and gs.gap < 1e-10

    def test_inversion_decreases_across_critical_line(self):
        # |ratio| ~ 1 well below eta_c = 0.6 and clearly reduced above it
        lo = ground_state_sz(ModelParams(n_tls=10, g=0.1, eta=-1.0))
        hi = ground_state_sz(ModelParams(n_tls=10, g=0.1, eta=2.0))
        assert abs(lo.ratio) > 0.95
        assert abs(hi.ratio) < 0.6


class TestPowerLawFit:
    def test_exact_synthetic_recovery(self):
        fit = fit_power_scaling([(n, 2.0 * n**1.5) for n in range(1, 31)])
        assert fit.alpha == pytest.approx(1.5, abs=1e-12)
        assert fit.beta == pytest.approx(2.0, abs=1e-12)
        assert fit.residual <= 1e-12

    def test_requires_three_positive_points(self):
        with pytest.raises(ValueError):
            fit_power_scaling([(1, 1.0), (2, 2.0)])
        with pytest.raises(ValueError):
            fit_power_scaling([(1, 1.0), (2, 0.0), (3, 2.0)])

    def test_collective_advantage_small_sizes(self):
        fit = power_scaling(ModelParams(n_tls=1, g=0.5), range(1, 9), FAST)
        assert 1.3 <= fit.alpha <= 1.7  # superlinear collective charging

    def test_normalization_needs_coupling(self):
        with pytest.raises(ValueError):
            power_scaling(ModelParams(n_tls=1, g=0.0), range(1, 5), FAST)


class TestSweep:
    def test_degenerate_grid_matches_single_point(self):
        p = ModelParams(n_tls=3, g=0.5)
        grid = sweep(p, ("g", [0.5]), ("eta", [1.0]), "e_max", FAST)
        single = find_extrema(ModelParams(n_tls=3, g=0.5, eta=1.0), FAST)
        assert grid.values.shape == (1, 1)
        assert grid.values[0, 0] == single.e_max

    def test_parallel_equals_sequential(self):
        p = ModelParams(n_tls=2, g=0.1)
        axes = (("g", [0.1, 0.4]), ("omega_drive", [0.0, 0.5, 1.0]))
        seq = sweep(p, *axes, quantity="p_max", protocol=FAST, threads=1)
        par = sweep(p, *axes, quantity="p_max", protocol=FAST, threads=4)
        assert np.array_equal(seq.values, par.values)

    def test_gs_quantity_and_degeneracy_flags(self):
        p = ModelParams(n_tls=10, g=0.1)
        grid = sweep(p, ("g", [0.1, 2.0]), ("eta", [0.0]), "gs_sz", FAST)
        assert grid.values[0, 0] == pytest.approx(ground_state_sz(p).ratio)
        assert (1, 0) in grid.degenerate_cells  # g=2 parity doublet

    def test_cell_error_isolation(self):
        p = ModelParams(n_tls=2, g=0.5)
        grid = sweep(p, ("n_tls", [2, 1000]), ("eta", [0.0]), "e_max", FAST)
        assert np.isfinite(grid.values[0, 0])
        assert np.isnan(grid.values[1, 0])
        assert (1, 0) in grid.cell_errors
        assert "memory guard" in grid.cell_errors[(1, 0)]

    def test_axis_validation(self):
        p = ModelParams(n_tls=2, g=0.5)
        with pytest.raises(ValueError):
            sweep(p, ("g", [0.1]), ("g", [0.2]), "e_max", FAST)
        with pytest.raises(ValueError):
            sweep(p, ("bogus", [1]), ("eta", [0.0]), "e_max", FAST)
        with pytest.raises(ValueError):
            sweep(p, ("g", [0.1]), ("eta", [0.0]), "bogus", FAST)
        with pytest.raises(ValueError):
            sweep(p, ("g", []), ("eta", [0.0]), "e_max", FAST)


class TestCutoffConvergence:
    def test_rows_and_stabilization(self):
        p = ModelParams(n_tls=4, g=0.5)
        rows = cutoff_convergence(p, [1, 2, 4], FAST)
        assert [r.factor for r in rows] == [1, 2, 4]
        d12 = abs(rows[1].e_max - rows[0].e_max)
        d24 = abs(rows[2].e_max - rows[1].e_max)
        assert d24 <= d12  # truncation error shrinks with the cutoff

    def test_factor_validation(self):
        p = ModelParams(n_tls=2, g=0.5)
        with pytest.raises(ValueError):
            cutoff_convergence(p, [4, 2], FAST)
        with pytest.raises(ValueError):
            cutoff_convergence(p, [0, 1], FAST)

    def test_truncation_bites_in_deep_strong_coupling(self):
        # factor 1 visibly truncates the g=2 dynamics; factor 4 is converged
        p = ModelParams(n_tls=10, g=2.0)
        rows = cutoff_convergence(p, [1, 4], FAST)
        assert abs(rows[1].e_max - rows[0].e_max) > 0.1


class TestQuiescentEdge:
    def test_no_dynamics_reports_zero(self):
        # g = drive = 0 leaves psi(0) an H eigenstate: nothing ever charges
        p = ModelParams(n_tls=2, g=0.0)
        report = find_extrema(p, ChargingProtocol(search_horizon=5.0, coarse_points=150))
        assert abs(report.e_max) <= 1e-12
        assert abs(report.p_max) <= 1e-12
        assert report.sigma_bar <= 1e-7
