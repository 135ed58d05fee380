"""Bound-side evaluation: constants, the transverse-gap integral, Riesz
means, weak-coupling expansions, and Dirichlet/Neumann bracketing sums.

The verified inequality is

    tr H_-^sigma  <=  r(sigma,1) * Lcl(sigma,1) * I,

with H the guide Laplacian shifted by the asymptotic transverse threshold,
I the axial integral of the sub-threshold transverse gap powers, r the
excess factor over the semiclassical constant, and Lcl the semiclassical
constant itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import transverse
from .bessel import bessel_zero
from .geometry import (
    StripBump,
    StripNeumannWindow,
    TubeRadial,
    WaveguideGeometry,
)
from .quadrature import QuadratureResult, find_crossings, integrate


@dataclass(frozen=True)
class BoundSpec:
    """Riesz order, axial dimension (fixed to 1 here), and threshold."""

    sigma: float
    threshold: float
    dimension: int = 1

    def __post_init__(self):
        if self.sigma < 0.5:
            raise ValueError("sigma must be >= 1/2 for the guide inequality")
        if self.dimension != 1:
            raise ValueError("the pipeline evaluates the d = 1 inequality only")


@dataclass
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_panels: int = 4096


def classical_constant(sigma: float, d: int) -> float:
    """Semiclassical coefficient Gamma(s+1) / (2^d pi^(d/2) Gamma(s+d/2+1))."""
    if sigma <= 0 or d < 1:
        raise ValueError("need sigma > 0 and d >= 1")
    log_val = (
        math.lgamma(sigma + 1.0)
        - math.lgamma(sigma + 0.5 * d + 1.0)
        - d * math.log(2.0)
        - 0.5 * d * math.log(math.pi)
    )
    return math.exp(log_val)


def excess_factor(sigma: float, d: int) -> float:
    """Best known multiple of the semiclassical constant, by parameter range.

    1 for sigma >= 3/2; 2 for 1 <= sigma < 3/2 (any d); 2 for
    1/2 <= sigma < 1 in d = 1; 4 for 1/2 <= sigma < 1 in d >= 2.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if sigma >= 1.5:
        return 1.0
    if sigma >= 1.0:
        return 2.0
    if sigma >= 0.5:
        return 2.0 if d == 1 else 4.0
    raise ValueError(f"sigma={sigma} below 1/2: no excess factor available")


def riesz_mean(eigenvalues, spec: BoundSpec) -> float:
    """Sum of (threshold - lambda)^sigma over the given eigenvalues.

    Accepts an eigensolve.Spectrum or any iterable; multiplicity is by
    repetition.  All eigenvalues must lie below the threshold.
    """
    vals = getattr(eigenvalues, "eigenvalues", eigenvalues)
    vals = np.asarray(vals, dtype=float)
    if vals.size == 0:
        return 0.0
    gaps = spec.threshold - vals
    if np.any(gaps <= 0):
        raise ValueError("eigenvalue at or above the threshold")
    return float(np.sum(gaps**spec.sigma))


def _gap_power_integrand(geom: WaveguideGeometry, spec: BoundSpec):
    tau = spec.threshold
    power = spec.sigma + 0.5

    def g(xi: float) -> float:
        lam = transverse.spectrum_at(geom, xi, tau).eigenvalues
        if not lam:
            return 0.0
        return float(np.sum((tau - np.asarray(lam)) ** power))

    return g


def _mode_entry_breakpoints(geom: WaveguideGeometry, tau: float) -> list[float]:
    """Axial points where a transverse mode crosses the threshold."""
    out: list[float] = []
    if isinstance(geom, StripBump):
        prof = geom.profile
        lo, hi = prof.support
        w_max = geom.width + prof.amplitude
        j = 1
        while (j * math.pi) ** 2 / w_max**2 < tau:
            level = j * math.pi / math.sqrt(tau) - geom.width  # f at mode entry
            if level > 0:
                out.extend(find_crossings(lambda x: prof.value(x) - level, lo, hi))
            j += 1
    elif isinstance(geom, TubeRadial):
        prof = geom.deviation
        lo, hi = prof.support
        r_max = geom.base_radius + prof.amplitude
        m = 0
        while (bessel_zero(m, 1) / r_max) ** 2 < tau:
            k = 1
            while (z := bessel_zero(m, k)) / r_max < math.sqrt(tau):
                level = z / math.sqrt(tau) - geom.base_radius
                if level > 0:
                    out.extend(find_crossings(lambda x: prof.value(x) - level, lo, hi))
                k += 1
            m += 1
    # window geometries have piecewise-constant spectra; their breakpoints
    # are the window edges, already supplied by geom.breakpoints()
    return out


def bound_integral(geom: WaveguideGeometry, spec: BoundSpec,
                   cfg: QuadratureConfig | None = None) -> float:
    """Axial integral of sum_j (threshold - lambda_j(xi))_+^(sigma + 1/2).

    All sub-threshold transverse modes are summed, so profiles with more
    than one bound transverse mode (bump amplitudes >= 1) are handled.
    The quadrature splits at profile breakpoints and at mode-entry points;
    for rectangular windows the integrand is piecewise constant and the
    result is exact.
    """
    return _bound_integral(geom, spec, cfg).value


def _bound_integral(geom: WaveguideGeometry, spec: BoundSpec,
                    cfg: QuadratureConfig | None = None) -> QuadratureResult:
    cfg = cfg or QuadratureConfig()
    tau = spec.threshold
    asym = transverse.section_spectrum(geom.asymptotic_cross_section, tau)
    if len(asym):
        raise ValueError(
            "the gap integral diverges: the asymptotic cross-section has "
            f"{len(asym)} modes below the threshold {tau}"
        )
    bps = list(geom.breakpoints())
    lo, hi = min(bps), max(bps)
    if hi <= lo:
        return QuadratureResult(0.0, 0.0, 0)
    bps += _mode_entry_breakpoints(geom, tau)
    g = _gap_power_integrand(geom, spec)
    return integrate(g, lo, hi, breakpoints=bps, abs_tol=cfg.abs_tol,
                     max_panels=cfg.max_panels)


def faber_krahn_bound_integral(geom: TubeRadial, spec: BoundSpec,
                               cfg: QuadratureConfig | None = None) -> float:
    """Area-route integral j01^(2 sigma + 1) * int (1 - pi/A(xi))^(sigma+1/2).

    Valid only in the certified single-mode regime A <= 2 pi: larger areas
    are rejected with a pointer to the second-eigenvalue criterion.
    """
    if not isinstance(geom, TubeRadial):
        raise TypeError("the area-route bound applies to TubeRadial geometries")
    cfg = cfg or QuadratureConfig()
    r0 = geom.base_radius
    r_max = r0 + geom.deviation.amplitude
    area0 = math.pi * r0**2
    if math.pi * r_max**2 > 2.0 * area0 * (1.0 + 1e-12):
        raise ValueError(
            f"cross-section area {math.pi * r_max**2:.6g} exceeds twice the "
            "asymptotic area somewhere: the single-mode certification "
            "lambda_2 >= 2*pi*j01^2/A fails; a multi-mode treatment is required"
        )
    tau = (bessel_zero(0, 1) / r0) ** 2
    power = spec.sigma + 0.5
    lo, hi = geom.deviation.support

    def g(xi: float) -> float:
        area = math.pi * geom.radius(xi) ** 2
        return max(0.0, 1.0 - area0 / area) ** power

    res = integrate(g, lo, hi, breakpoints=geom.breakpoints(),
                    abs_tol=cfg.abs_tol, max_panels=cfg.max_panels)
    return tau**power * res.value


@dataclass
class BoundReport:
    """One verification record; JSON field names are part of the interface."""

    sigma: float
    r: float
    Lcl: float
    integral: float
    bound: float
    riesz_mean: float | None = None
    slack_ratio: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "r": self.r,
            "Lcl": self.Lcl,
            "integral": self.integral,
            "bound": self.bound,
            "riesz_mean": self.riesz_mean,
            "slack_ratio": self.slack_ratio,
            "diagnostics": self.diagnostics,
        }

    CSV_HEADER = "scenario,sigma,r,Lcl,integral,bound,riesz_mean,slack_ratio,certified_count,eps_disc"

    def to_csv_row(self, scenario: str = "") -> str:
        def fmt(x):
            return "" if x is None else repr(float(x))

        count = self.diagnostics.get("certified_count", "")
        eps = self.diagnostics.get("eps_disc", "")
        return ",".join(
            [
                scenario,
                fmt(self.sigma),
                fmt(self.r),
                fmt(self.Lcl),
                fmt(self.integral),
                fmt(self.bound),
                fmt(self.riesz_mean),
                fmt(self.slack_ratio),
                str(count),
                "" if eps == "" else repr(float(eps)),
            ]
        )


def lt_bound(geom: WaveguideGeometry, spec: BoundSpec,
             cfg: QuadratureConfig | None = None) -> BoundReport:
    """Bound-side report: excess factor * classical constant * gap integral."""
    res = _bound_integral(geom, spec, cfg)
    r = excess_factor(spec.sigma, 1)
    lcl = classical_constant(spec.sigma, 1)
    return BoundReport(
        sigma=spec.sigma,
        r=r,
        Lcl=lcl,
        integral=res.value,
        bound=r * lcl * res.value,
        diagnostics={
            "quadrature_error": res.error_estimate,
            "quadrature_panels": res.panels,
            "threshold": spec.threshold,
        },
    )


def weak_coupling_asymptote(f1: float, alpha: float) -> float:
    """Reference weak-coupling level pi^2 - pi^4 F1^2 alpha^2."""
    return math.pi**2 - math.pi**4 * f1**2 * alpha**2


def weak_coupling_lower(moments, alpha: float, order: int = 4) -> float:
    """Polynomial lower bound on the bump ground level from the gap bound.

    Expanding the sigma = 1/2 single-mode bound of the bump strip in the
    coupling alpha gives

      pi^2 - pi^4 F1^2 a^2 + 3 pi^4 F1 F2 a^3 - (9/4 F2^2 + 4 F1 F3) pi^4 a^4

    truncated at the requested order (2, 3, or 4).
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if order not in (2, 3, 4):
        raise ValueError("order must be 2, 3 or 4")
    f = list(moments) + [0.0, 0.0, 0.0]
    f1, f2, f3 = f[0], f[1], f[2]
    val = math.pi**2 - math.pi**4 * f1**2 * alpha**2
    if order >= 3:
        val += 3.0 * math.pi**4 * f1 * f2 * alpha**3
    if order >= 4:
        val -= (2.25 * f2**2 + 4.0 * f1 * f3) * math.pi**4 * alpha**4
    return val


def bracket_bounds(alpha: float, spec: BoundSpec) -> tuple[float, float]:
    """Two-sided bracketing of tr H_-^sigma for the b = 1 boundary window.

    Inserting Dirichlet walls at the window ends keeps only the window
    segment and bounds the trace from below by
    sum_{n>=1} (3 pi^2/4 - n^2 pi^2 / alpha^2)_+^sigma; Neumann walls give
    the upper bound, the same sum started at n = 0.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    lower = 0.0
    upper = 0.0
    n = 0
    while True:
        term = 0.75 * math.pi**2 - (n * math.pi / alpha) ** 2
        if term <= 0.0:
            break
        upper += term**spec.sigma
        if n >= 1:
            lower += term**spec.sigma
        n += 1
    return lower, upper


def bracket_asymptote_slope(sigma: float) -> float:
    """Large-window slope: tr H_-^sigma ~ Lcl * alpha * (3 pi^2 / 4)^(sigma+1/2)."""
    return classical_constant(sigma, 1) * (0.75 * math.pi**2) ** (sigma + 0.5)
