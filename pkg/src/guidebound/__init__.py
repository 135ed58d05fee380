"""guidebound: trapped-mode spectra of locally perturbed waveguides and
Lieb-Thirring-type bounds on their Riesz means."""

from .geometry import (
    CrossSection,
    DiskSection,
    IntervalSection,
    Profile,
    StripBump,
    StripNeumannWindow,
    TubeRadial,
    WaveguideGeometry,
    cross_section_at,
    domain_truncation,
    profile_moments,
)
from .transverse import (
    TransverseSpectrum,
    disk_spectrum,
    faber_krahn_lower,
    interval_dirichlet_spectrum,
    mixed_interval_spectrum,
    numeric_interval_spectrum,
    second_eigenvalue_lower,
)
from .bessel import bessel_j, bessel_zero
from .discretize import SparseSymOperator, assemble_strip, assemble_tube_axisym
from .eigensolve import Spectrum, eigen_below, sturm_count
from .ltbound import (
    BoundReport,
    BoundSpec,
    QuadratureConfig,
    bound_integral,
    bracket_bounds,
    classical_constant,
    excess_factor,
    faber_krahn_bound_integral,
    lt_bound,
    riesz_mean,
    weak_coupling_lower,
)
from .pipeline import (
    GridConfig,
    Scenario,
    ScenarioResult,
    run_convergence,
    run_scenario,
)

__version__ = "0.1.0"
