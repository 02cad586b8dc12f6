"""Quadratic inf/sup convolutions and C^{1,1} regularization on grids."""

from .analysis import (
    UNBOUNDED, ModulusTable, RegularityReport, c11_report, epsilon_bound,
    gradient_lipschitz_estimate, modulus_of_continuity, semiconcavity_constant,
    semiconvexity_constant,
)
from .circle import (
    Chart, CircleAtlas, CircleFunction, build_atlas, chart_transfer, g_t_apply,
    localization_constants,
)
from .envelope import (
    ConjugateTable, EnvelopeParams, closing, inf_convolve, inf_convolve_bruteforce,
    legendre_conjugate, lower_envelope_1d, opening, quadratic_bidual, sup_convolve,
)
from .grid import (
    GridFunction, GridSpec, SecondDifferenceField, combine, crop, fp_tolerance, generate,
    pad, second_differences,
)
from .io import GridFormatError, emit_plot_data, read_circle, read_grid, write_circle, write_grid
from .regularize import (
    DomainViolation, PinchResult, bernard_r, ilmanen_sandwich, lasry_lions, semigroup_defect,
)

__version__ = "0.1.0"
