"""Reducing ansatzes and certified exact solutions for nonlinear
Schrodinger-type equations, with a wave-equation analogue.

The toolkit is verification-first: the catalog declares closed forms, the
numerics module supplies independent finite-difference oracles, and the
verify/wave modules certify every claim at desk scale.
"""

from .catalog import (
    AnsatzSpec,
    FAMILIES,
    Nonlinearity,
    ReductionProfile,
    default_params,
    equivalence_transform,
    make_family,
    reduction_profile,
)
from .numerics import Field, GridSpec, Point, nls_residual, wave_residual
from .solutions import (
    ReducedODE,
    Solution,
    build_reduced_ode,
    caseI_quadrature_solution,
    integrate_caseII,
    lift,
    plane_wave_solution,
    reduced_ode_for,
)
from .verify import (
    ProfileFit,
    ResidualReport,
    check_conditions,
    check_level_set_constancy,
    check_theorem1,
    check_transform_invariance,
    fit_profile,
)
from .wave import (
    WaveAnsatz,
    WaveTProfile,
    check_wave_conditions,
    make_wave_ansatz,
    solve_wave_ode,
    wave_solution,
)

__version__ = "0.1.0"
