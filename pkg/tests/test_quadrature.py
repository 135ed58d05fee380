import math

import numpy as np
import pytest

from guidebound.quadrature import (
    QuadratureError,
    find_crossings,
    gauss_panel,
    integrate,
)


def test_gauss_panel_exact_for_high_degree_polynomials():
    # 16-point Gauss-Legendre integrates degree 31 exactly
    coeffs = np.arange(1.0, 33.0)

    def poly(x):
        return sum(c * x**k for k, c in enumerate(coeffs))

    exact = sum(c * (2.0 ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1)
                for k, c in enumerate(coeffs))
    assert gauss_panel(poly, -1.0, 2.0) == pytest.approx(exact, rel=1e-13)


def test_integrate_smooth():
    res = integrate(math.sin, 0.0, math.pi, abs_tol=1e-12)
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert res.error_estimate < 1e-10


def test_integrate_with_kink_via_breakpoint():
    # |x| on [-1, 1]; exact with the breakpoint, poor without many panels
    res = integrate(abs, -1.0, 1.0, breakpoints=[0.0], abs_tol=1e-13)
    assert res.value == pytest.approx(1.0, abs=1e-13)


def test_integrate_cos_squared_moments():
    f = lambda x: math.cos(math.pi * x / 2) ** 2
    assert integrate(f, -1, 1, abs_tol=1e-12).value == pytest.approx(1.0, abs=1e-11)
    g = lambda x: f(x) ** 2
    assert integrate(g, -1, 1, abs_tol=1e-12).value == pytest.approx(0.75, abs=1e-11)


def test_integrate_empty_and_reversed():
    assert integrate(math.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        integrate(math.sin, 2.0, 1.0)


def test_subdivision_cap_raises_with_residual():
    # a needle the fixed rule cannot settle within a tiny panel budget
    def needle(x):
        return 1.0 / math.sqrt(abs(x - 0.123456789) + 1e-14)

    with pytest.raises(QuadratureError) as err:
        integrate(needle, 0.0, 1.0, abs_tol=1e-14, max_panels=16)
    assert err.value.residual > 0


def test_find_crossings_locates_simple_roots():
    roots = find_crossings(lambda x: math.cos(x), 0.0, 8.0)
    assert len(roots) == 3
    for r, expect in zip(roots, [math.pi / 2, 3 * math.pi / 2, 5 * math.pi / 2]):
        assert r == pytest.approx(expect, abs=1e-10)


def test_find_crossings_handles_step_functions():
    step = lambda x: -1.0 if x < 0.25 else 1.0
    roots = find_crossings(step, 0.0, 1.0)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(0.25, abs=1e-10)
