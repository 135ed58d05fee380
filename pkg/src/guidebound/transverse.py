"""Transverse (cross-section) spectra below a threshold.

Closed forms for intervals (Dirichlet, and Dirichlet with a one-sided
Neumann point) and disks (Bessel zeros), Faber-Krahn area bounds, and an
independent finite-difference oracle for the 1D problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bessel import MAX_ORDER, MAX_ZERO_INDEX, bessel_zero
from .eigensolve import tridiagonal_eigs_below
from .geometry import (
    CrossSection,
    DiskSection,
    IntervalSection,
    WaveguideGeometry,
)

ANALYTIC = "analytic"
NUMERIC = "numeric"


@dataclass(frozen=True)
class TransverseSpectrum:
    """Sub-threshold eigenvalues of a cross-section operator, sorted."""

    eigenvalues: tuple[float, ...]
    threshold: float
    source: str = ANALYTIC
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ev = self.eigenvalues
        if any(e >= self.threshold for e in ev):
            raise ValueError("eigenvalue at or above threshold")
        if any(e1 < e0 for e0, e1 in zip(ev[:-1], ev[1:])):
            raise ValueError("eigenvalues must be sorted ascending")

    def __len__(self) -> int:
        return len(self.eigenvalues)


def interval_dirichlet_spectrum(length: float, threshold: float) -> TransverseSpectrum:
    """{ (n pi / L)^2 : n >= 1 } strictly below the threshold."""
    if length <= 0:
        raise ValueError("length must be positive")
    out = []
    n = 1
    while True:
        lam = (n * math.pi / length) ** 2
        if lam >= threshold:
            break
        out.append(lam)
        n += 1
    return TransverseSpectrum(tuple(out), threshold)


def mixed_interval_spectrum(length: float, b: float, threshold: float) -> TransverseSpectrum:
    """Interval with Dirichlet ends and a one-sided Neumann point at b.

    The Neumann point severs the form domain, so the spectrum is exactly
    the union of the Dirichlet-Neumann spectra of (0, b) and (b, L):
    ((k - 1/2) pi / b)^2 and ((k - 1/2) pi / (L - b))^2.  b = L places the
    Neumann point on the boundary; b = L/2 is the degenerate edge where
    the lowest mode reaches (pi/L)^2 and the spectrum below it is empty.
    """
    if length <= 0:
        raise ValueError("length must be positive")
    if not length / 2 <= b <= length:
        raise ValueError(f"neumann point b={b} outside [L/2, L]")
    out = []
    for piece in (b, length - b):
        if piece <= 0:
            continue
        k = 1
        while True:
            lam = ((k - 0.5) * math.pi / piece) ** 2
            if lam >= threshold:
                break
            out.append(lam)
            k += 1
    return TransverseSpectrum(tuple(sorted(out)), threshold)


def disk_spectrum(radius: float, threshold: float) -> TransverseSpectrum:
    """Disk Dirichlet eigenvalues j_{m,k}^2 / r^2 below the threshold.

    Angular modes m >= 1 carry multiplicity 2.  Raises if the requested
    threshold needs Bessel zeros outside the verified (m <= 5, k <= 20)
    range.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    out = []
    for m in range(MAX_ORDER + 2):
        if m > MAX_ORDER:
            raise ValueError(
                f"threshold {threshold} requires angular order > {MAX_ORDER}, "
                "outside the verified Bessel-zero range"
            )
        lam1 = (bessel_zero(m, 1) / radius) ** 2
        if lam1 >= threshold:
            break
        for k in range(1, MAX_ZERO_INDEX + 2):
            if k > MAX_ZERO_INDEX:
                raise ValueError(
                    f"threshold {threshold} requires radial index > {MAX_ZERO_INDEX}, "
                    "outside the verified Bessel-zero range"
                )
            lam = (bessel_zero(m, k) / radius) ** 2
            if lam >= threshold:
                break
            out.extend([lam] if m == 0 else [lam, lam])
    return TransverseSpectrum(tuple(sorted(out)), threshold)


def faber_krahn_lower(area: float) -> float:
    """Lower bound pi j_{0,1}^2 / A on the first Dirichlet eigenvalue."""
    if area <= 0:
        raise ValueError("area must be positive")
    return math.pi * bessel_zero(0, 1) ** 2 / area


def second_eigenvalue_lower(area: float) -> float:
    """Lower bound 2 pi j_{0,1}^2 / A on the second Dirichlet eigenvalue.

    With A <= 2 pi this certifies that only the lowest transverse mode can
    dip below the unit-disk threshold j_{0,1}^2.
    """
    if area <= 0:
        raise ValueError("area must be positive")
    return 2.0 * math.pi * bessel_zero(0, 1) ** 2 / area


def numeric_interval_spectrum(
    cs: IntervalSection, threshold: float, grid_n: int
) -> TransverseSpectrum:
    """Finite-difference oracle for the 1D cross-section spectra.

    Cell-centered second differences with walls and the Neumann point on
    cell faces; eigenvalues extracted by Sturm-sequence bisection.
    Converges to the analytic spectrum at O(h^2).
    """
    if grid_n < 16:
        raise ValueError("grid_n must be >= 16")
    n, face = _snapped_grid(cs, grid_n)
    h = cs.length / n
    if threshold >= 4.0 / h**2:
        raise ValueError("grid too coarse to resolve the requested threshold")
    blocks = []
    if face is None:
        blocks.append(_block(n, h, "D", "D"))
    elif face == n:  # Neumann at the upper endpoint
        blocks.append(_block(n, h, "D", "N"))
    else:
        blocks.append(_block(face, h, "D", "N"))
        blocks.append(_block(n - face, h, "N", "D"))
    eigs = []
    for diag, off in blocks:
        eigs.extend(tridiagonal_eigs_below(diag, off, threshold))
    snapped = None if face is None else face * h
    return TransverseSpectrum(
        tuple(sorted(eigs)),
        threshold,
        source=NUMERIC,
        diagnostics={"grid_n": n, "h": h, "neumann_face": snapped},
    )


def _snapped_grid(cs: IntervalSection, grid_n: int):
    """Pick n >= grid_n so the Neumann point lands on a cell face."""
    if cs.neumann_point is None:
        return grid_n, None
    frac = Fraction(cs.neumann_point / cs.length).limit_denominator(512)
    q = frac.denominator
    n = grid_n if grid_n % q == 0 else (grid_n // q + 1) * q
    return n, int(round(n * cs.neumann_point / cs.length))


def _block(n: int, h: float, left: str, right: str):
    """Tridiagonal of a cell-centered piece with face conditions D or N."""
    diag = np.full(n, 2.0, dtype=float)
    diag[0] = (2.0 if left == "D" else 0.0) + (1.0 if n > 1 else 0.0)
    diag[-1] = (2.0 if right == "D" else 0.0) + (1.0 if n > 1 else 0.0)
    if n == 1:
        diag[0] = (2.0 if left == "D" else 0.0) + (2.0 if right == "D" else 0.0)
    off = np.full(max(n - 1, 0), -1.0, dtype=float)
    return diag / h**2, off / h**2


def spectrum_at(
    geom: WaveguideGeometry, xi: float, threshold: float
) -> TransverseSpectrum:
    """Sub-threshold spectrum of the cross-section operator at xi."""
    return section_spectrum(geom.cross_section_at(xi), threshold)


def section_spectrum(cs: CrossSection, threshold: float) -> TransverseSpectrum:
    if isinstance(cs, DiskSection):
        return disk_spectrum(cs.radius, threshold)
    if cs.neumann_point is None:
        return interval_dirichlet_spectrum(cs.length, threshold)
    return mixed_interval_spectrum(cs.length, cs.neumann_point, threshold)
