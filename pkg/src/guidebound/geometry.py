"""Data model for locally perturbed straight waveguides.

A geometry is a straight guide (planar strip of unit width, or circular
tube of unit radius) plus a compactly supported perturbation: a boundary
bump profile, a Neumann window/crack segment, or a radial bulge.  All
values are immutable; lengths are in the guide's nondimensional units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .quadrature import integrate

RECTANGULAR = "rectangular"
SMOOTH_BUMP = "smooth-bump"
TABULATED = "tabulated"


@dataclass(frozen=True)
class Profile:
    """Compactly supported, piecewise-continuous, nonnegative profile.

    kind:
      rectangular  -- amplitude * indicator(support)
      smooth-bump  -- amplitude * cos^2(pi * (xi - center) / width), so the
                      value vanishes at the support edges
      tabulated    -- piecewise-linear through (xi, value) samples
    """

    kind: str
    support: tuple[float, float]
    amplitude: float
    samples: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise ValueError(f"empty support [{lo}, {hi}]")
        if self.kind not in (RECTANGULAR, SMOOTH_BUMP, TABULATED):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == TABULATED:
            if self.samples is None or len(self.samples) < 2:
                raise ValueError("tabulated profile needs at least 2 samples")
            xs = [s[0] for s in self.samples]
            vs = [s[1] for s in self.samples]
            if any(x1 <= x0 for x0, x1 in zip(xs[:-1], xs[1:])):
                raise ValueError("tabulated sample abscissae must increase")
            if min(vs) < 0:
                raise ValueError("profile values must be nonnegative")
            object.__setattr__(self, "amplitude", float(max(vs)))
        elif self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")

    @classmethod
    def rectangular(cls, amplitude: float, support: tuple[float, float]) -> "Profile":
        return cls(RECTANGULAR, (float(support[0]), float(support[1])), float(amplitude))

    @classmethod
    def cos_bump(cls, amplitude: float, support: tuple[float, float] = (-1.0, 1.0)) -> "Profile":
        return cls(SMOOTH_BUMP, (float(support[0]), float(support[1])), float(amplitude))

    @classmethod
    def tabulated(cls, samples: Sequence[tuple[float, float]]) -> "Profile":
        pts = tuple((float(x), float(v)) for x, v in samples)
        return cls(TABULATED, (pts[0][0], pts[-1][0]), 0.0, pts)

    def value(self, xi: float) -> float:
        lo, hi = self.support
        if xi < lo or xi > hi:
            return 0.0
        if self.kind == RECTANGULAR:
            return self.amplitude
        if self.kind == SMOOTH_BUMP:
            center = 0.5 * (lo + hi)
            width = hi - lo
            c = math.cos(math.pi * (xi - center) / width)
            return self.amplitude * c * c
        xs = np.array([s[0] for s in self.samples])
        vs = np.array([s[1] for s in self.samples])
        return float(np.interp(xi, xs, vs))

    def breakpoints(self) -> list[float]:
        """Abscissae where the profile (hence downstream integrands) may kink."""
        if self.kind == TABULATED:
            return [s[0] for s in self.samples]
        return list(self.support)

    def scaled(self, s: float) -> "Profile":
        """All lengths multiplied by s > 0; profile values are transverse
        lengths too, so they scale along with the support."""
        if s <= 0:
            raise ValueError("scale factor must be positive")
        lo, hi = self.support
        if self.kind == TABULATED:
            return Profile.tabulated([(s * x, s * v) for x, v in self.samples])
        return Profile(self.kind, (s * lo, s * hi), s * self.amplitude)


@dataclass(frozen=True)
class IntervalSection:
    """Transverse interval (0, length), Dirichlet ends, optional Neumann point.

    neumann_point == length marks a Neumann condition at the upper endpoint
    (boundary window); an interior value marks a one-sided crack point.
    """

    length: float
    neumann_point: Optional[float] = None

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("interval length must be positive")
        if self.neumann_point is not None and not 0 < self.neumann_point <= self.length:
            raise ValueError("neumann_point must lie in (0, length]")


@dataclass(frozen=True)
class DiskSection:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


CrossSection = IntervalSection | DiskSection


class WaveguideGeometry:
    """Base for the supported perturbed-guide families."""

    asymptotic_cross_section: CrossSection
    half_width: float  # R: cross-section equals the asymptotic one for |xi| > R

    def cross_section_at(self, xi: float) -> CrossSection:
        raise NotImplementedError

    def breakpoints(self) -> list[float]:
        raise NotImplementedError


@dataclass(frozen=True)
class StripBump(WaveguideGeometry):
    """Planar strip {0 < eta < width + f(xi)} with a nonnegative bump f."""

    profile: Profile
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("strip width must be positive")
        lo, hi = self.profile.support
        object.__setattr__(self, "asymptotic_cross_section", IntervalSection(self.width))
        object.__setattr__(self, "half_width", max(abs(lo), abs(hi)))

    def cross_section_at(self, xi: float) -> CrossSection:
        return IntervalSection(self.width + self.profile.value(xi))

    def breakpoints(self) -> list[float]:
        return self.profile.breakpoints()

    def scaled(self, s: float) -> "StripBump":
        return StripBump(self.profile.scaled(s), width=s * self.width)


@dataclass(frozen=True)
class StripNeumannWindow(WaveguideGeometry):
    """Strip with a Neumann segment at relative height b over an xi-window.

    b is the height as a fraction of the strip width: b = 1 places the
    window on the boundary, 1/2 < b < 1 is an interior one-sided crack.
    The window is a single axis-parallel segment, so its transverse
    projection is a single point.
    """

    window: tuple[float, float]
    b: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        lo, hi = self.window
        if not lo < hi:
            raise ValueError(f"empty window [{lo}, {hi}]")
        if not 0.5 < self.b <= 1.0:
            raise ValueError("b must lie in (1/2, 1]")
        if self.width <= 0:
            raise ValueError("strip width must be positive")
        object.__setattr__(self, "asymptotic_cross_section", IntervalSection(self.width))
        object.__setattr__(self, "half_width", max(abs(lo), abs(hi)))

    @property
    def alpha(self) -> float:
        return self.window[1] - self.window[0]

    def cross_section_at(self, xi: float) -> CrossSection:
        lo, hi = self.window
        if lo <= xi <= hi:
            return IntervalSection(self.width, neumann_point=self.b * self.width)
        return IntervalSection(self.width)

    def breakpoints(self) -> list[float]:
        return list(self.window)

    def scaled(self, s: float) -> "StripNeumannWindow":
        lo, hi = self.window
        return StripNeumannWindow((s * lo, s * hi), self.b, width=s * self.width)


@dataclass(frozen=True)
class TubeRadial(WaveguideGeometry):
    """Axisymmetric tube of radius r(xi) = base_radius + deviation(xi)."""

    deviation: Profile
    base_radius: float = 1.0

    def __post_init__(self):
        if self.base_radius <= 0:
            raise ValueError("tube radius must be positive")
        lo, hi = self.deviation.support
        object.__setattr__(self, "asymptotic_cross_section", DiskSection(self.base_radius))
        object.__setattr__(self, "half_width", max(abs(lo), abs(hi)))

    def radius(self, xi: float) -> float:
        return self.base_radius + self.deviation.value(xi)

    def cross_section_at(self, xi: float) -> CrossSection:
        return DiskSection(self.radius(xi))

    def breakpoints(self) -> list[float]:
        return self.deviation.breakpoints()

    def scaled(self, s: float) -> "TubeRadial":
        return TubeRadial(self.deviation.scaled(s), base_radius=s * self.base_radius)


def cross_section_at(geom: WaveguideGeometry, xi: float) -> CrossSection:
    """Cross-section of the guide at axial coordinate xi (total function)."""
    return geom.cross_section_at(xi)


def profile_moments(profile: Profile, n_max: int, abs_tol: float = 1e-12) -> list[float]:
    """Moments F_n = integral of f(xi)^n, n = 1..n_max.

    Uses the same panel rule as the bound integral so that weak-coupling
    comparisons are quadrature-consistent.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lo, hi = profile.support
    bps = profile.breakpoints()
    out = []
    for n in range(1, n_max + 1):
        if profile.kind == RECTANGULAR:
            out.append((hi - lo) * profile.amplitude**n)
            continue
        res = integrate(lambda x: profile.value(x) ** n, lo, hi, breakpoints=bps,
                        abs_tol=abs_tol)
        out.append(res.value)
    return out


def domain_truncation(gap_estimate: float, tol: float) -> float:
    """Axial padding beyond the perturbation for a Dirichlet truncation.

    Bound states decay like exp(-sqrt(gap) |xi|) outside the perturbation,
    so padding by ln(1/tol) / (2 sqrt(gap)) perturbs each eigenvalue by
    O(tol) relatively.
    """
    if gap_estimate <= 0:
        raise ValueError(
            "no bound-state scale available (gap_estimate <= 0); "
            "supply an explicit truncation instead"
        )
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    return math.log(1.0 / tol) / (2.0 * math.sqrt(gap_estimate))
