import math

import numpy as np
import pytest

from guidebound.geometry import (
    DiskSection,
    IntervalSection,
    Profile,
    StripBump,
    StripNeumannWindow,
    TubeRadial,
    cross_section_at,
    domain_truncation,
    profile_moments,
)


class TestProfile:
    def test_rectangular_value(self):
        p = Profile.rectangular(1.5, (0.0, 1.0))
        assert p.value(0.5) == 1.5
        assert p.value(-0.1) == 0.0
        assert p.value(1.1) == 0.0

    def test_cos_bump_peak_and_edges(self):
        p = Profile.cos_bump(0.7, (-1.0, 1.0))
        assert p.value(0.0) == pytest.approx(0.7)
        assert p.value(1.0) == pytest.approx(0.0, abs=1e-15)
        assert p.value(-1.0) == pytest.approx(0.0, abs=1e-15)
        assert p.value(0.5) == pytest.approx(0.7 * 0.5)

    def test_tabulated_interpolates_and_sets_amplitude(self):
        p = Profile.tabulated([(0.0, 0.0), (1.0, 2.0), (3.0, 0.0)])
        assert p.amplitude == 2.0
        assert p.value(0.5) == pytest.approx(1.0)
        assert p.value(2.0) == pytest.approx(1.0)
        assert p.value(-1.0) == 0.0

    def test_tabulated_needs_two_samples(self):
        with pytest.raises(ValueError):
            Profile.tabulated([(0.0, 1.0)])

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            Profile.rectangular(-0.1, (0.0, 1.0))

    def test_empty_support_rejected(self):
        with pytest.raises(ValueError):
            Profile.rectangular(1.0, (1.0, 1.0))


class TestCrossSectionAt:
    def test_window_outside_perturbation(self):
        g = StripNeumannWindow((0.0, 1.0), b=1.0)
        cs = cross_section_at(g, 2.0)
        assert cs == IntervalSection(1.0)
        assert cs.neumann_point is None

    def test_window_inside_perturbation(self):
        g = StripNeumannWindow((0.0, 1.0), b=1.0)
        cs = cross_section_at(g, 0.5)
        assert cs == IntervalSection(1.0, neumann_point=1.0)

    def test_bump_widens_the_section(self):
        g = StripBump(Profile.rectangular(1.0, (0.0, 1.0)))
        assert cross_section_at(g, 0.5) == IntervalSection(2.0)

    def test_asymptotic_section_beyond_half_width(self):
        g = TubeRadial(Profile.rectangular(0.2, (0.0, 2.0)))
        assert g.half_width == 2.0
        assert cross_section_at(g, 5.0) == DiskSection(1.0)
        assert cross_section_at(g, 1.0) == DiskSection(1.2)

    def test_piecewise_constant_window_sampling(self):
        g = StripNeumannWindow((0.0, 1.0), b=0.75)
        inside = [cross_section_at(g, x).neumann_point for x in (0.0, 0.3, 1.0)]
        outside = [cross_section_at(g, x).neumann_point for x in (-0.01, 1.01, 7.0)]
        assert inside == [0.75] * 3
        assert outside == [None] * 3

    def test_continuity_for_smooth_profiles(self):
        g = StripBump(Profile.cos_bump(0.5, (-1.0, 1.0)))
        xs = np.linspace(-1.2, 1.2, 241)
        widths = [cross_section_at(g, float(x)).length for x in xs]
        jumps = np.abs(np.diff(widths))
        assert np.max(jumps) < 0.02  # no discontinuity at the sampling scale


class TestProfileMoments:
    def test_rectangular_unit(self):
        assert profile_moments(Profile.rectangular(1.0, (0.0, 1.0)), 3) == \
            pytest.approx([1.0, 1.0, 1.0])

    def test_rectangular_closed_form(self):
        a, w = 0.7, 1.3
        mom = profile_moments(Profile.rectangular(a, (0.0, w)), 4)
        assert mom == pytest.approx([w * a**n for n in range(1, 5)])

    def test_cos_bump_first_two_moments(self):
        mom = profile_moments(Profile.cos_bump(1.0, (-1.0, 1.0)), 2)
        assert mom[0] == pytest.approx(1.0, abs=1e-10)
        assert mom[1] == pytest.approx(0.75, abs=1e-10)

    def test_moment_bound_by_amplitude(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            amp = rng.uniform(0.1, 2.0)
            kind = rng.choice(["rect", "cos"])
            p = (Profile.rectangular(amp, (0.0, 1.5)) if kind == "rect"
                 else Profile.cos_bump(amp, (-1.0, 1.0)))
            mom = profile_moments(p, 4)
            assert all(m >= 0 for m in mom)
            for lo, hi in zip(mom[1:], mom[:-1]):
                assert lo <= amp * hi + 1e-12

    def test_nmax_validated(self):
        with pytest.raises(ValueError):
            profile_moments(Profile.rectangular(1.0, (0.0, 1.0)), 0)


class TestDomainTruncation:
    def test_example_gap_087(self):
        assert domain_truncation(0.87, 1e-6) == pytest.approx(7.4058, abs=2e-3)

    def test_example_unit(self):
        assert domain_truncation(1.0, math.exp(-2.0)) == pytest.approx(1.0, rel=1e-14)

    def test_example_gap_4(self):
        assert domain_truncation(4.0, 1e-8) == pytest.approx(math.log(1e8) / 4.0, rel=1e-14)

    def test_nonpositive_gap_rejected(self):
        with pytest.raises(ValueError):
            domain_truncation(0.0, 1e-6)
        with pytest.raises(ValueError):
            domain_truncation(-1.0, 1e-6)

    def test_bad_tol_rejected(self):
        with pytest.raises(ValueError):
            domain_truncation(1.0, 2.0)


def test_geometric_scaling_of_sections():
    g = StripBump(Profile.rectangular(1.0, (0.0, 1.0)))
    g2 = g.scaled(2.0)
    # every length doubles: width, bump height, support
    assert g2.width == 2.0
    assert cross_section_at(g2, 1.0).length == pytest.approx(4.0)
    assert cross_section_at(g2, 5.0).length == pytest.approx(2.0)
    assert g2.profile.support == (0.0, 2.0)


def test_window_b_range_enforced():
    with pytest.raises(ValueError):
        StripNeumannWindow((0.0, 1.0), b=0.5)
    with pytest.raises(ValueError):
        StripNeumannWindow((0.0, 1.0), b=1.2)
