import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drivenchain.asymptotics import (
    CRITICAL_PREFACTOR,
    critical_covariance_approx,
    evanescence_length,
    greens_covariance_approx,
    greens_critical,
    image_sum_critical,
    lattice_green,
    series_covariance,
)
from drivenchain.chain import ChainParams
from drivenchain.exact import solve_spectral


class TestEvanescenceLength:
    def test_values(self):
        assert evanescence_length(9.0) == pytest.approx(1.0)
        assert evanescence_length(12.0) == pytest.approx(0.5)
        assert evanescence_length(8.1) == pytest.approx(3.16227766, abs=1e-7)

    def test_domain(self):
        with pytest.raises(ValueError):
            evanescence_length(8.0)


class TestGreensCritical:
    def test_closed_form_points(self):
        assert greens_critical(1.0, 1.0) == pytest.approx(1.0 / np.pi)
        assert greens_critical(0.5, 0.5) == pytest.approx(4.0 / np.pi)
        assert greens_critical(0.7, 0.0) == 0.0

    def test_singular_origin(self):
        with pytest.raises(ZeroDivisionError):
            greens_critical(0.0, 0.0)

    @given(
        x=st.floats(min_value=-2.0, max_value=2.0),
        y=st.floats(min_value=-2.0, max_value=2.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_parity_and_exchange(self, x, y):
        if x * x + y * y < 1e-6:
            return
        g = greens_critical(x, y)
        assert greens_critical(-x, y) == pytest.approx(-g, rel=1e-12)
        assert greens_critical(x, -y) == pytest.approx(-g, rel=1e-12)
        assert greens_critical(y, x) == pytest.approx(g, rel=1e-12)

    def test_harmonic_off_source(self):
        # 5-point Laplacian vanishes away from the origin
        h = 1e-4
        for (x, y) in [(0.4, 0.7), (1.2, -0.3), (-0.8, -0.9)]:
            lap = (
                greens_critical(x + h, y) + greens_critical(x - h, y)
                + greens_critical(x, y + h) + greens_critical(x, y - h)
                - 4.0 * greens_critical(x, y)
            ) / h**2
            assert abs(lap) < 1e-4 * abs(greens_critical(x, y)) / (x * x + y * y)


class TestCriticalApprox:
    def test_center_even_n_doubles_single_green(self):
        p = ChainParams(n=256, eps=0.1, omega=8.0)
        val = critical_covariance_approx(p, 128.5, 128.5)
        single = CRITICAL_PREFACTOR * 0.1 / 257**2 * greens_critical(0.5, 0.5)
        assert val == pytest.approx(2.0 * single, rel=1e-9)

    def test_parity_of_combination(self):
        p_even = ChainParams(n=256, eps=0.1, omega=8.0)
        p_odd = ChainParams(n=257, eps=0.1, omega=8.0)
        # odd n: the two corner terms cancel exactly on the skew-diagonal
        mid = (257 + 1) // 2
        assert critical_covariance_approx(p_odd, mid, mid) == pytest.approx(0.0, abs=1e-18)
        assert critical_covariance_approx(p_even, 128.5, 128.5) != 0.0

    def test_midpoint_scaling_exponents(self):
        from drivenchain.fits import fit_power_law

        vals_even, vals_odd = [], []
        ns_even = [32, 64, 128, 256, 512]
        ns_odd = [33, 65, 129, 257, 513]
        for n in ns_even:
            p = ChainParams(n=n, eps=0.1, omega=8.0)
            mid = (n + 1) // 2
            vals_even.append((n, abs(critical_covariance_approx(p, mid, mid + 1))))
        for n in ns_odd:
            p = ChainParams(n=n, eps=0.1, omega=8.0)
            mid = (n + 1) // 2
            vals_odd.append((n, abs(critical_covariance_approx(p, mid, mid + 1))))
        assert fit_power_law(vals_even).exponent == pytest.approx(2.0, abs=0.1)
        assert fit_power_law(vals_odd).exponent == pytest.approx(3.0, abs=0.1)

    def test_diagonal_profile_matches_exact_within_10pct(self):
        p = ChainParams(n=257, eps=0.1, omega=8.0)
        C = solve_spectral(p)
        for j in range(10, 248, 13):
            approx = abs(critical_covariance_approx(p, j, j))
            exact = abs(C.data[j - 1, j - 1])
            assert abs(approx - exact) <= 0.10 * exact


class TestImageSum:
    def test_shells1_equals_two_image_formula(self):
        p = ChainParams(n=257, eps=0.1, omega=8.0)
        r = image_sum_critical(0.37, 0.61, p, shells=1)
        assert r.value == critical_covariance_approx(p, 0.37 * 258, 0.61 * 258)

    def test_boundary_vanishing(self):
        p = ChainParams(n=257, eps=0.1, omega=8.0)
        interior = abs(image_sum_critical(0.37, 0.61, p, shells=30).value)
        for pt in [(0.0, 0.61), (0.43, 0.0), (0.0, 0.17)]:
            assert abs(image_sum_critical(*pt, p, shells=30).value) < 1e-8 * interior

    def test_interior_point_matches_exact(self):
        p = ChainParams(n=257, eps=0.1, omega=8.0)
        C = solve_spectral(p)
        j, k = round(0.37 * 258), round(0.61 * 258)
        r = image_sum_critical(j / 258, k / 258, p, shells=40)
        exact = abs(C.data[j - 1, k - 1])
        assert abs(abs(r.value) - exact) < 0.10 * exact

    def test_error_estimate_brackets_convergence(self):
        p = ChainParams(n=64, eps=0.1, omega=8.0)
        r20 = image_sum_critical(0.5, 0.503, p, shells=20)
        r60 = image_sum_critical(0.5, 0.503, p, shells=60)
        assert abs(r20.value - r60.value) < 50.0 * r20.error_estimate

    def test_shell_validation(self):
        p = ChainParams(n=16, eps=0.1, omega=8.0)
        with pytest.raises(ValueError):
            image_sum_critical(0.5, 0.5, p, shells=0)
        with pytest.raises(ValueError):
            image_sum_critical(1.5, 0.5, p, shells=3)


class TestSeries:
    def test_divergence_guard(self):
        with pytest.raises(ValueError):
            series_covariance(ChainParams(n=16, eps=0.1, omega=8.0), 10)

    def test_order_zero_support(self):
        sr = series_covariance(ChainParams(n=16, eps=0.1, omega=12.0), 1)
        # order 0 is corner-only; order 1 spreads one lattice step
        C = sr.cov.data
        assert abs(C[0, 0]) > 0.0
        assert abs(C[5, 5]) == 0.0

    def test_bandwidth_growth(self):
        M = 7
        sr = series_covariance(ChainParams(n=32, eps=0.1, omega=12.0), M)
        C = sr.cov.data
        a, b = np.meshgrid(np.arange(1, 33), np.arange(1, 33), indexing="ij")
        far = np.minimum(a + b - 2, 64 - a - b) > M
        assert np.abs(C[far]).max() == 0.0

    def test_tail_bound_self_consistency(self):
        p = ChainParams(n=24, eps=0.1, omega=10.0)
        s1 = series_covariance(p, 40)
        s2 = series_covariance(p, 50)
        assert np.abs(s1.cov.data - s2.cov.data).max() <= s1.tail_bound

    def test_matches_spectral_at_small_eps(self):
        p = ChainParams(n=64, eps=1e-3, omega=12.0)
        sr = series_covariance(p, 60)
        C = solve_spectral(p)
        scale = np.abs(C.data).max()
        assert np.abs(sr.cov.data - C.data).max() < 1e-2 * scale


class TestLatticeGreen:
    def test_domain_guards(self):
        with pytest.raises(ValueError):
            lattice_green(3, 4, 8.0)
        with pytest.raises(ValueError):
            lattice_green(-1, 4, 12.0)
        assert lattice_green(0, 4, 12.0) == 0.0

    def test_symmetric_positive(self):
        for (j, k) in [(1, 2), (3, 10), (7, 7)]:
            g = lattice_green(j, k, 9.5)
            assert g > 0.0
            assert g == lattice_green(k, j, 9.5)

    def test_matches_series_coefficients(self):
        p = ChainParams(n=64, eps=1e-3, omega=12.0)
        sr = series_covariance(p, 200)
        # restrict to entries large enough that the series value itself is
        # above its own roundoff floor (~1e-16 of the corner element)
        for (j, k) in [(1, 2), (2, 3), (3, 4), (5, 8), (10, 11)]:
            approx = greens_covariance_approx(p, j, k)
            exact = sr.cov.data[j - 1, k - 1].real
            assert abs(approx - exact) < 1e-6 * abs(exact)

    def test_decay_rate(self):
        omega = 8.1
        xi = evanescence_length(omega)
        ratio = lattice_green(201, 202, omega) / lattice_green(200, 201, omega)
        assert abs(ratio / np.exp(-1.0 / xi) - 1.0) < 0.02

    @given(
        j=st.integers(min_value=1, max_value=30),
        k=st.integers(min_value=1, max_value=30),
        omega=st.floats(min_value=8.3, max_value=20.0),
    )
    @settings(max_examples=25, deadline=None)
    def test_symmetry_property(self, j, k, omega):
        assert lattice_green(j, k, omega) == pytest.approx(
            lattice_green(k, j, omega), rel=1e-12
        )
