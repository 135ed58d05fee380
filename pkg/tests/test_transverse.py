import math

import numpy as np
import pytest

from guidebound.bessel import bessel_zero
from guidebound.geometry import DiskSection, IntervalSection
from guidebound.transverse import (
    disk_spectrum,
    faber_krahn_lower,
    interval_dirichlet_spectrum,
    mixed_interval_spectrum,
    numeric_interval_spectrum,
    second_eigenvalue_lower,
    section_spectrum,
)

PI2 = math.pi**2


class TestIntervalDirichlet:
    def test_unit_interval_below_50(self):
        sp = interval_dirichlet_spectrum(1.0, 50.0)
        assert sp.eigenvalues == pytest.approx((PI2, 4 * PI2))

    def test_strict_threshold(self):
        assert interval_dirichlet_spectrum(1.0, PI2).eigenvalues == ()

    def test_width_two(self):
        sp = interval_dirichlet_spectrum(2.0, PI2)
        assert sp.eigenvalues == pytest.approx((PI2 / 4,))

    def test_domain_monotonicity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            L = rng.uniform(0.5, 3.0)
            Lp = L + rng.uniform(0.01, 1.0)
            a = interval_dirichlet_spectrum(L, 200.0).eigenvalues
            b = interval_dirichlet_spectrum(Lp, 200.0).eigenvalues
            for n in range(min(len(a), len(b))):
                assert a[n] >= b[n]


class TestMixedInterval:
    def test_boundary_window(self):
        sp = mixed_interval_spectrum(1.0, 1.0, PI2)
        assert sp.eigenvalues == pytest.approx((PI2 / 4,))

    def test_interior_crack(self):
        sp = mixed_interval_spectrum(1.0, 0.75, PI2)
        assert sp.eigenvalues == pytest.approx((PI2 / 2.25,))

    def test_degenerate_midpoint_closes_the_gap(self):
        # at b = L/2 the lowest crack mode reaches the threshold: empty
        assert mixed_interval_spectrum(1.0, 0.5, PI2).eigenvalues == ()

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            mixed_interval_spectrum(1.0, 0.4, PI2)
        with pytest.raises(ValueError):
            mixed_interval_spectrum(1.0, 1.1, PI2)

    def test_union_includes_upper_piece(self):
        # low b and a high threshold must surface (b, L) modes too
        sp = mixed_interval_spectrum(1.0, 0.6, 100.0)
        lower = [((k - 0.5) * math.pi / 0.6) ** 2 for k in (1, 2)]
        upper = [((k - 0.5) * math.pi / 0.4) ** 2 for k in (1,)]
        expected = sorted(v for v in lower + upper if v < 100.0)
        assert sp.eigenvalues == pytest.approx(tuple(expected))


class TestDiskSpectrum:
    def test_unit_disk_empty_at_threshold(self):
        tau = bessel_zero(0, 1) ** 2
        assert disk_spectrum(1.0, tau).eigenvalues == ()

    def test_bulged_disk_single_mode(self):
        tau = bessel_zero(0, 1) ** 2
        sp = disk_spectrum(1.2, tau)
        assert sp.eigenvalues == pytest.approx((tau / 1.44,))

    def test_critical_radius_keeps_one_mode(self):
        tau = bessel_zero(0, 1) ** 2
        r = bessel_zero(1, 1) / bessel_zero(0, 1)
        sp = disk_spectrum(r, tau)
        assert len(sp.eigenvalues) == 1  # the m=1 mode sits exactly at threshold

    def test_degeneracy_of_angular_modes(self):
        tau = 60.0
        sp = disk_spectrum(1.0, tau)
        vals = np.array(sp.eigenvalues)
        j11sq = bessel_zero(1, 1) ** 2
        assert np.sum(np.isclose(vals, j11sq)) == 2  # multiplicity two

    def test_disk_monotonicity(self):
        a = disk_spectrum(1.0, 40.0).eigenvalues
        b = disk_spectrum(1.3, 40.0).eigenvalues
        for n in range(min(len(a), len(b))):
            assert a[n] >= b[n]

    def test_threshold_beyond_verified_orders_rejected(self):
        with pytest.raises(ValueError):
            disk_spectrum(1.0, 120.0)


class TestFaberKrahn:
    def test_equality_for_unit_disk(self):
        assert faber_krahn_lower(math.pi) == pytest.approx(bessel_zero(0, 1) ** 2)

    def test_scaled_disk(self):
        assert faber_krahn_lower(1.44 * math.pi) == pytest.approx(
            bessel_zero(0, 1) ** 2 / 1.44
        )

    def test_direct_value(self):
        assert faber_krahn_lower(2 * math.pi) == pytest.approx(
            bessel_zero(0, 1) ** 2 / 2
        )

    def test_is_a_lower_bound_for_disks(self):
        # exact disk ground level equals the bound at equal area
        for r in (0.7, 1.0, 1.9):
            exact = (bessel_zero(0, 1) / r) ** 2
            assert faber_krahn_lower(math.pi * r**2) == pytest.approx(exact)

    def test_second_eigenvalue_rule(self):
        tau = bessel_zero(0, 1) ** 2
        assert second_eigenvalue_lower(2 * math.pi) == pytest.approx(tau)
        assert second_eigenvalue_lower(math.pi) == pytest.approx(2 * tau)
        assert second_eigenvalue_lower(4 * math.pi) == pytest.approx(tau / 2)

    def test_nonpositive_area_rejected(self):
        with pytest.raises(ValueError):
            faber_krahn_lower(0.0)
        with pytest.raises(ValueError):
            second_eigenvalue_lower(-1.0)


class TestNumericOracle:
    def test_dirichlet_interval_close_to_pi2(self):
        sp = numeric_interval_spectrum(IntervalSection(1.0), 50.0, 1000)
        assert abs(sp.eigenvalues[0] - PI2) < 1e-4
        assert abs(sp.eigenvalues[1] - 4 * PI2) < 1e-3

    def test_boundary_neumann_close_to_quarter(self):
        sp = numeric_interval_spectrum(IntervalSection(1.0, 1.0), PI2, 1000)
        assert len(sp.eigenvalues) == 1
        assert abs(sp.eigenvalues[0] - PI2 / 4) < 1e-4

    @pytest.mark.parametrize("b", [0.6, 0.75])
    def test_crack_matches_analytic_decomposition(self, b):
        sp = numeric_interval_spectrum(IntervalSection(1.0, b), PI2, 2000)
        exact = mixed_interval_spectrum(1.0, b, PI2)
        assert len(sp) == len(exact)
        for u, v in zip(sp.eigenvalues, exact.eigenvalues):
            assert u == pytest.approx(v, rel=1e-5)

    def test_second_order_convergence(self):
        errs = []
        for n in (250, 500, 1000):
            sp = numeric_interval_spectrum(IntervalSection(1.0), 50.0, n)
            errs.append(abs(sp.eigenvalues[0] - PI2))
        order1 = math.log2(errs[0] / errs[1])
        order2 = math.log2(errs[1] / errs[2])
        assert 1.8 <= order1 <= 2.2
        assert 1.8 <= order2 <= 2.2

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            numeric_interval_spectrum(IntervalSection(1.0), 50.0, 8)

    def test_coarse_grid_cannot_resolve_huge_threshold(self):
        with pytest.raises(ValueError):
            numeric_interval_spectrum(IntervalSection(1.0), 1e7, 16)


def test_section_spectrum_dispatch():
    tau = bessel_zero(0, 1) ** 2
    assert section_spectrum(DiskSection(1.2), tau).eigenvalues == pytest.approx(
        (tau / 1.44,)
    )
    assert section_spectrum(IntervalSection(1.0), 50.0).eigenvalues == pytest.approx(
        (PI2, 4 * PI2)
    )
    assert section_spectrum(IntervalSection(1.0, 0.75), PI2).eigenvalues == \
        pytest.approx((PI2 / 2.25,))


def test_bessel_interlacing_reexported_from_spec_surface():
    assert bessel_zero(0, 1) < bessel_zero(1, 1) < bessel_zero(0, 2)
