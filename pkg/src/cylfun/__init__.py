"""Cylindrical (finite-rank projection) approximation of nonlinear
functionals on periodic L2, the induced coefficient-space transport solver,
Gaussian cylinder-measure integrals, and a convergence benchmark harness."""

from .advection import (
    CoefficientMatrix,
    PropagatorCache,
    assemble_advection_matrix,
    matrix_exponential,
    residual_tail,
    solve_cylindrical,
    verify_pde_residual,
)
from .harness import (
    ConvergenceRecord,
    ExperimentConfig,
    FitUndefinedError,
    RateFit,
    emit_csv,
    emit_fits_csv,
    fit_rate,
    read_records_csv,
    run_derivative_field_convergence,
    run_experiment,
    run_fde_convergence,
    run_frechet_convergence,
    run_functional_convergence,
    run_projection_error,
)
from .integrals import (
    CylinderIntegralSpec,
    GaussHermite,
    MonteCarlo,
    dimension_independence_check,
    integrate_cylinder,
)
from .models import (
    CylindricalFunction,
    exact_fde_solution,
    get_model,
    gradient_wrt_coeffs,
)
from .sampling import (
    FourierSpectrum,
    SpectrumLaw,
    eval_on_grid,
    load_spectrum,
    sample_ensemble,
    sample_spectrum,
    save_spectrum,
    shift,
    stream,
)
from .spectral import (
    BasisKind,
    BasisSpec,
    CoefficientVector,
    GridFunction,
    SobolevParams,
    UniformGrid,
    default_quadrature,
    eval_basis,
    inner_product,
    l2_projection_error,
    make_grid,
    project,
    sobolev_norm_sq,
    synthesize,
    tail_energy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
