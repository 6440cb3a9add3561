import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lrising import INF, DegenerateInputError, DomainError, FitError, ParameterError
from lrising.perturbative import g_function, qfi_alpha_slope
from lrising.scaling import (
    CriticalPointEstimate,
    GapMinimum,
    correlation_scaling,
    extrapolate_critical,
    fit_power_law,
    ground_qfi,
    locate_gap_minimum,
    mean_field_exponent,
    minima_over_sizes,
    qfi_alpha_derivative,
    qfi_theta_derivative,
)

SIZES = np.array([8.0, 10, 12, 14, 16, 18, 20])


def _minima(thetas, side="AFM"):
    return [GapMinimum(t, 0.1, False, n, 1.0, side) for n, t in thetas.items()]


class TestFits:
    def test_exact_power(self):
        fit = fit_power_law([8, 12, 16, 20], [2 * n ** 0.5 for n in (8, 12, 16, 20)])
        assert fit.prefactor == pytest.approx(2.0, rel=1e-12)
        assert fit.exponent == pytest.approx(0.5, rel=1e-12)
        assert fit.residual == pytest.approx(0.0, abs=1e-13)

    @given(a=st.floats(0.05, 5), b=st.floats(-1.5, 1.5))
    def test_power_recovery(self, a, b):
        fit = fit_power_law(SIZES, a * SIZES ** b, "power")
        assert fit.prefactor == pytest.approx(a, rel=1e-9)
        assert fit.exponent == pytest.approx(b, abs=1e-10)
        assert fit.residual < 1e-12

    @given(a=st.floats(0.05, 5), b=st.floats(-1.0, 1.5))
    def test_shifted_recovery(self, a, b):
        fit = fit_power_law(SIZES, 1 + a * SIZES ** b, "shifted")
        assert fit.prefactor == pytest.approx(a, rel=1e-9)
        assert fit.exponent == pytest.approx(b, abs=1e-10)
        assert fit.residual < 1e-12

    @given(a=st.floats(0.05, 5))
    def test_log_recovery(self, a):
        fit = fit_power_law(SIZES, 1 + a * np.log(SIZES), "log")
        assert fit.prefactor == pytest.approx(a, rel=1e-12)
        assert fit.residual < 1e-13

    @given(a=st.floats(2, 10), b=st.floats(0.5, 5), c=st.floats(0.5, 2))
    def test_saturating_recovery(self, a, b, c):
        fit = fit_power_law(SIZES, a - b / SIZES ** c, "saturating")
        assert fit.prefactor == pytest.approx(a, rel=1e-6)
        assert fit.b == pytest.approx(b, rel=1e-5)
        assert fit.exponent == pytest.approx(c, rel=1e-5)
        assert fit.residual < 1e-8

    def test_errors(self):
        with pytest.raises(FitError):
            fit_power_law([8, 10, 12], [1, 2, 3])
        with pytest.raises(DomainError):
            fit_power_law([8, 10, 12, 14], [1, 2, -3, 4])
        with pytest.raises(ParameterError):
            fit_power_law([8, 10, 12, 14], [1, 2, 3, 4], "cubic")

    @given(noise=st.lists(st.floats(-0.1, 0.1), min_size=7, max_size=7))
    def test_residual_nonnegative(self, noise):
        fit = fit_power_law(SIZES, SIZES ** 0.7 * np.exp(noise))
        assert fit.residual >= 0


class TestGapMinimum:
    def test_nearest_neighbor_afm(self):
        m8 = locate_gap_minimum(INF, 8, "AFM")
        m12 = locate_gap_minimum(INF, 12, "AFM")
        assert not m12.boundary
        assert abs(m12.theta - math.pi / 4) < abs(m8.theta - math.pi / 4) < 0.2
        # approach from below
        assert m12.theta < math.pi / 4

    def test_long_range_fm_shrinks(self):
        ms = minima_over_sizes(0.5, [8, 12, 16], "FM")
        th = [abs(m.theta) for m in ms]
        assert th[0] > th[1] > th[2] > 0
        assert all(m.theta <= 0 for m in ms)

    def test_all_to_all_afm_at_endpoint(self):
        m = locate_gap_minimum(0.0, 8, "AFM")
        assert m.boundary
        assert m.theta == pytest.approx(math.pi / 2, abs=0.02)

    def test_empty_interval(self):
        with pytest.raises(ParameterError):
            locate_gap_minimum(1.0, 8, "AFM", interval=(-0.5, -0.1))

    def test_refinement_tolerance(self):
        coarse = locate_gap_minimum(INF, 8, "AFM")
        fine = locate_gap_minimum(INF, 8, "AFM", interval=(coarse.theta - 0.05, coarse.theta + 0.05), step=0.005)
        assert fine.theta == pytest.approx(coarse.theta, abs=2e-4)


class TestExtrapolation:
    def test_synthetic_recovery(self):
        sizes = [8, 10, 12, 14, 16]
        est = extrapolate_critical(1.0, sizes, "AFM", minima=_minima({n: 0.5 + 1 / n for n in sizes}))
        assert est.theta_c_extrapolated == pytest.approx(0.5, abs=1e-8)
        assert est.omega == pytest.approx(1.0, abs=1e-6)
        assert est.uncertainty > 0

    def test_constant_minima(self):
        sizes = [8, 10, 12, 14]
        est = extrapolate_critical(0.0, sizes, "AFM", minima=_minima({n: math.pi / 2 - 1e-3 for n in sizes}))
        assert est.theta_c_extrapolated == pytest.approx(math.pi / 2 - 1e-3)
        assert est.uncertainty > 0

    def test_needs_four_sizes(self):
        with pytest.raises(FitError):
            extrapolate_critical(1.0, [8, 10, 12], "AFM")

    def test_fm_short_range(self):
        est = extrapolate_critical(3.0, [8, 10, 12, 14], "FM", window=0.12)
        assert isinstance(est, CriticalPointEstimate)
        assert all(t <= 0 for t in est.theta_c_finite.values())
        assert est.theta_c_extrapolated <= 0
        assert est.theta_c_extrapolated == pytest.approx(-0.8, abs=0.1)


class TestMeanField:
    def test_values(self):
        b = mean_field_exponent(1.0)
        assert b.value == 0 and b.boundary
        assert mean_field_exponent(5 / 3).value == pytest.approx(1 / 3)
        m3 = mean_field_exponent(3.0)
        assert m3.value == 1.0 and "3/4" in m3.note

    def test_domain(self):
        with pytest.raises(DomainError):
            mean_field_exponent(0.5)


class TestDerivatives:
    def test_theta_slope_at_zero(self):
        n = 12
        slope = math.sqrt(8 * (n - 1) / n) * g_function(n, 2.0)
        dy = qfi_theta_derivative(2.0, 0.0, n, "y").value
        dz = qfi_theta_derivative(2.0, 0.0, n, "z").value
        assert dy == pytest.approx(slope, rel=1e-4)
        assert dz == pytest.approx(-slope, rel=1e-4)
        assert dy == pytest.approx(-dz, rel=1e-5)

    def test_richardson(self):
        a = qfi_theta_derivative(1.0, 0.3, 8, "y", delta=1e-2, richardson=True).value
        b = qfi_theta_derivative(1.0, 0.3, 8, "y", delta=1e-4).value
        assert a == pytest.approx(b, rel=1e-6)

    def test_one_sided_at_boundary(self):
        d = qfi_theta_derivative(1.0, math.pi / 2, 8, "z_st")
        assert d.one_sided

    @pytest.mark.parametrize("alpha", [2.0, 3.0])
    def test_peak_matches_gap_minimum(self, alpha):
        n = 12
        m = locate_gap_minimum(alpha, n, "FM")
        grid = np.arange(-1.5, -0.05, 0.02)
        fz = np.array([ground_qfi(n, alpha, t, "z")[0] for t in grid])
        peak = grid[int(np.argmax(np.abs(np.gradient(fz, grid))))]
        assert abs(peak - m.theta) < 0.05

    def test_alpha_derivative_grows_long_range(self):
        vals = [qfi_alpha_derivative(0.1, 0.5, n, "y").value for n in (8, 12, 16, 20)]
        assert all(abs(b) > abs(a) for a, b in zip(vals, vals[1:]))

    def test_alpha_derivative_flat_short_range(self):
        sizes = (8, 12, 16, 20)
        short = [abs(qfi_alpha_derivative(0.1, 2.0, n, "y").value) for n in sizes]
        long = [abs(qfi_alpha_derivative(0.1, 0.5, n, "y").value) for n in sizes]
        steps = np.diff(short)
        # saturating in N, unlike the long-range case
        assert np.all(steps[1:] < steps[:-1])
        assert short[-1] / short[0] < 0.75 * long[-1] / long[0]

    @pytest.mark.parametrize("alpha", [0.5, 1.5, 3.0])
    def test_alpha_derivative_perturbative(self, alpha):
        theta, n = 0.01, 12
        fd = qfi_alpha_derivative(theta, alpha, n, "y").value
        # the finite difference step 0.05 adds a curvature error of order delta^2 theta
        pert = np.mean([qfi_alpha_slope(n, alpha + s, theta) for s in (-1e-3, 0.0, 1e-3)])
        assert abs(fd - pert) <= 10 * theta ** 2 + 5e-3 * abs(pert)

    def test_alpha_derivative_one_sided(self):
        assert qfi_alpha_derivative(0.1, 0.01, 8, "y").one_sided


class TestCorrelations:
    def test_product_state_rejected(self):
        with pytest.raises(DegenerateInputError):
            correlation_scaling(1.0, "AFM", [10, 12, 14, 16], thetas={n: 0.0 for n in (10, 12, 14, 16)})

    def test_nearest_neighbor_exponent(self):
        thetas = {n: m.theta for n, m in zip((8, 10, 12, 14, 16), minima_over_sizes(INF, [8, 10, 12, 14, 16], "AFM"))}
        fit = correlation_scaling(INF, "AFM", sorted(thetas), thetas=thetas)
        assert fit.exponent == pytest.approx(-0.5, abs=0.1)

    def test_distance_scan_decays(self):
        fit = correlation_scaling(INF, "AFM", [8, 10, 12, 14], mode="distance-scan", thetas={n: math.pi / 4 for n in (8, 10, 12, 14)})
        assert fit.exponent < 0
        assert fit.metadata["mode"] == "distance-scan"

    def test_bad_mode(self):
        with pytest.raises(ParameterError):
            correlation_scaling(INF, "AFM", [8, 10, 12, 14], mode="both", thetas={})
