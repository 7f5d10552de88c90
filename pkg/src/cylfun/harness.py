"""Experiment orchestration: worst-case error sweeps over the basis size,
decay-rate fits, and deterministic CSV output.

Each sweep draws one seeded ensemble of test functions and reuses it at every
basis size, so the reported sup-errors are comparable across sizes.  Within a
sweep the per-sample evaluations are independent and reduced by max(), so the
records do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .advection import assemble_advection_matrix, matrix_exponential
from .models import get_model
from .sampling import SpectrumLaw, eval_many, sample_ensemble, shift_many, stack_coefficients
from .spectral import (
    TWO_PI,
    BasisSpec,
    BasisKind,
    make_grid,
    project_values,
    synthesize_values,
)

EXPERIMENTS = ("functional", "frechet", "derivative-field", "fde")

# Records with errors at or below this sit on the quadrature-noise floor and
# are excluded from rate fits (exponential-law sweeps bottom out there).
ERROR_FLOOR = 1e-12

# Hard sup-norm bound enforced on every evolved functional value: the shipped
# initial functionals are bounded by the measure of the circle.
STABILITY_BOUND = TWO_PI

RECORD_COLUMNS = ("experiment", "law", "param", "m", "basis", "t", "error", "seed")
FIT_COLUMNS = (
    "experiment",
    "law",
    "param",
    "fit_model",
    "slope",
    "r2",
    "m_lo",
    "m_hi",
)


class FitUndefinedError(ValueError):
    """Raised when a rate fit has too few usable records."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One convergence sweep.  ``seed`` governs the ensembles: the sweep
    re-seeds ``law`` with it, so identical (config, seed) pairs reproduce
    records bitwise."""

    experiment: str
    law: SpectrumLaw
    m_values: tuple
    n_theta_samples: int = 200
    n_eta_samples: int = 200
    t: float = math.pi
    model: str = "sinsq"
    basis_kind: BasisKind = BasisKind.TRIG_CARDINAL
    quad_points: int = 4096
    seed: int = 0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        m_values = tuple(int(m) for m in self.m_values)
        if not m_values:
            raise ValueError("m_values must be nonempty")
        if any(b <= a for a, b in zip(m_values, m_values[1:])):
            raise ValueError(f"m_values must be strictly increasing, got {m_values}")
        for m in m_values:
            BasisSpec(self.basis_kind, m)  # raises on odd m
        if self.n_theta_samples < 1 or self.n_eta_samples < 1:
            raise ValueError("sample counts must be positive")
        object.__setattr__(self, "m_values", m_values)

    def seeded_law(self) -> SpectrumLaw:
        return replace(self.law, seed=self.seed)


@dataclass(frozen=True)
class ConvergenceRecord:
    """One (m, sup-error) point of a sweep."""

    experiment: str
    law: str
    param: float
    m: int
    basis: str
    t: float | None
    error: float
    seed: int

    def __post_init__(self):
        if self.error < 0:
            raise ValueError(f"error must be nonnegative, got {self.error}")


@dataclass(frozen=True)
class RateFit:
    experiment: str
    law: str
    param: float
    fit_model: str
    slope: float
    r_squared: float
    m_lo: int
    m_hi: int


def _theta_grid_values(config: ExperimentConfig, grid):
    law = config.seeded_law()
    coeffs = stack_coefficients(sample_ensemble(law, config.n_theta_samples, role=0))
    return coeffs, eval_many(coeffs, grid)


def _record(config: ExperimentConfig, m: int, error: float, t=None) -> ConvergenceRecord:
    return ConvergenceRecord(
        experiment=config.experiment,
        law=config.law.kind,
        param=config.law.param,
        m=m,
        basis=config.basis_kind.value,
        t=t,
        error=float(error),
        seed=config.seed,
    )


def run_functional_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """sup over the ensemble of |F(theta) - F(P_m theta)| for each m."""
    model = get_model(config.model)
    grid = make_grid(config.quad_points)
    _, values = _theta_grid_values(config, grid)
    exact = model.evaluate_values(values, grid)
    records = []
    for m in config.m_values:
        basis = BasisSpec(config.basis_kind, m)
        coeff_rows = project_values(values, basis, grid)
        projected = synthesize_values(coeff_rows, basis, grid)
        approx = model.evaluate_values(projected, grid)
        records.append(_record(config, m, np.max(np.abs(exact - approx))))
    return records


def run_projection_error(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """sup over the same ensemble of ||theta - P_m theta||_L2 for each m.

    Companion sweep used to compare functional-error decay against the
    underlying projection-error decay.
    """
    grid = make_grid(config.quad_points)
    _, values = _theta_grid_values(config, grid)
    records = []
    for m in config.m_values:
        basis = BasisSpec(config.basis_kind, m)
        coeff_rows = project_values(values, basis, grid)
        residual = values - synthesize_values(coeff_rows, basis, grid)
        norms = np.sqrt(grid.weight * np.sum(residual**2, axis=1))
        rec = _record(config, m, np.max(norms))
        records.append(replace(rec, experiment="projection"))
    return records


def run_frechet_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """sup over theta and eta of |F'(theta)eta - F'(P_m theta)eta| / ||eta||.

    The directions eta are drawn from the same law as theta on their own
    sub-streams and shared across all theta samples and all m.
    """
    model = get_model(config.model)
    grid = make_grid(config.quad_points)
    _, values = _theta_grid_values(config, grid)
    eta_coeffs = stack_coefficients(
        sample_ensemble(config.seeded_law(), config.n_eta_samples, role=1)
    )
    eta_values = eval_many(eta_coeffs, grid)
    eta_norms = np.sqrt(grid.weight * np.sum(eta_values**2, axis=1))
    if np.any(eta_norms == 0.0):
        raise RuntimeError("degenerate zero-norm direction in the eta ensemble")
    weighted_eta = grid.weight * eta_values.T
    fields = model.derivative_field_values(values, grid)
    records = []
    for m in config.m_values:
        basis = BasisSpec(config.basis_kind, m)
        coeff_rows = project_values(values, basis, grid)
        projected = synthesize_values(coeff_rows, basis, grid)
        delta = fields - model.derivative_field_values(projected, grid)
        scores = np.abs(delta @ weighted_eta) / eta_norms[None, :]
        records.append(_record(config, m, scores.max()))
    return records


def run_derivative_field_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """sup over the ensemble of the L2 distance between derivative fields."""
    model = get_model(config.model)
    grid = make_grid(config.quad_points)
    _, values = _theta_grid_values(config, grid)
    fields = model.derivative_field_values(values, grid)
    records = []
    for m in config.m_values:
        basis = BasisSpec(config.basis_kind, m)
        coeff_rows = project_values(values, basis, grid)
        projected = synthesize_values(coeff_rows, basis, grid)
        delta = fields - model.derivative_field_values(projected, grid)
        norms = np.sqrt(grid.weight * np.sum(delta**2, axis=1))
        records.append(_record(config, m, np.max(norms)))
    return records


def _check_stability(values: np.ndarray) -> None:
    worst = float(np.max(np.abs(values)))
    if worst > STABILITY_BOUND:
        raise RuntimeError(
            f"evolved functional value {worst} exceeds the sup-norm bound {STABILITY_BOUND}"
        )


def run_fde_convergence(config: ExperimentConfig) -> list[ConvergenceRecord]:
    """sup over the ensemble of |F(theta(x - t)) - f0(expm(tC) a)| for each m.

    Every evolved value is checked against the sup-norm stability bound of the
    initial functional before the error is reduced.
    """
    model = get_model(config.model)
    grid = make_grid(config.quad_points)
    coeffs, values = _theta_grid_values(config, grid)
    exact = model.evaluate_values(eval_many(shift_many(coeffs, config.t), grid), grid)
    records = []
    for m in config.m_values:
        basis = BasisSpec(config.basis_kind, m)
        generator = assemble_advection_matrix(basis, grid)
        propagator = matrix_exponential(generator, config.t).matrix
        coeff_rows = project_values(values, basis, grid)
        evolved = synthesize_values(coeff_rows @ propagator.T, basis, grid)
        approx = model.evaluate_values(evolved, grid)
        _check_stability(approx)
        records.append(_record(config, m, np.max(np.abs(exact - approx)), t=config.t))
    return records


_RUNNERS = {
    "functional": run_functional_convergence,
    "frechet": run_frechet_convergence,
    "derivative-field": run_derivative_field_convergence,
    "fde": run_fde_convergence,
}


def run_experiment(config: ExperimentConfig) -> list[ConvergenceRecord]:
    return _RUNNERS[config.experiment](config)


def fit_rate(records, fit_model: str) -> RateFit:
    """Least-squares decay rate of a homogeneous record group.

    ``algebraic`` fits log(error) against log(m); ``exponential`` fits
    log(error) against m.  Records at or below the noise floor are dropped;
    fewer than three usable records raises FitUndefinedError.
    """
    if fit_model not in ("algebraic", "exponential"):
        raise ValueError(f"unknown fit model {fit_model!r}")
    records = sorted(records, key=lambda r: r.m)
    keys = {(r.experiment, r.law, r.param) for r in records}
    if len(keys) != 1:
        raise ValueError(f"records mix several sweeps: {sorted(keys)}")
    usable = [r for r in records if r.error > ERROR_FLOOR]
    if len(usable) < 3:
        raise FitUndefinedError(
            f"need at least 3 records above the {ERROR_FLOOR} floor, "
            f"have {len(usable)}"
        )
    m = np.array([r.m for r in usable], dtype=float)
    x = np.log(m) if fit_model == "algebraic" else m
    y = np.log([r.error for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    experiment, law, param = next(iter(keys))
    return RateFit(
        experiment=experiment,
        law=law,
        param=param,
        fit_model=fit_model,
        slope=float(slope),
        r_squared=r_squared,
        m_lo=usable[0].m,
        m_hi=usable[-1].m,
    )


def group_records(records):
    """Split mixed records into per-sweep groups keyed (experiment, law, param)."""
    groups: dict = {}
    for record in records:
        groups.setdefault((record.experiment, record.law, record.param), []).append(record)
    return groups


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records, path) -> None:
    """Write records ordered by m under the fixed schema; identical inputs
    produce byte-identical files."""
    rows = sorted(records, key=lambda r: r.m)
    lines = [",".join(RECORD_COLUMNS)]
    for r in rows:
        lines.append(
            ",".join(
                _format(v)
                for v in (r.experiment, r.law, r.param, r.m, r.basis, r.t, r.error, r.seed)
            )
        )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_records_csv(path) -> list[ConvergenceRecord]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header = tuple(lines[0].split(","))
    if header != RECORD_COLUMNS:
        raise ValueError(f"unexpected header {header} in {path}")
    records = []
    for line in lines[1:]:
        experiment, law, param, m, basis, t, error, seed = line.split(",")
        records.append(
            ConvergenceRecord(
                experiment=experiment,
                law=law,
                param=float(param),
                m=int(m),
                basis=basis,
                t=None if t == "" else float(t),
                error=float(error),
                seed=int(seed),
            )
        )
    return records


def emit_fits_csv(fits, path, append: bool = False) -> None:
    """Write (or append) fit summaries under the fixed schema."""
    lines = []
    mode = "a" if append else "w"
    if not append:
        lines.append(",".join(FIT_COLUMNS))
    for f in fits:
        lines.append(
            ",".join(
                _format(v)
                for v in (
                    f.experiment,
                    f.law,
                    f.param,
                    f.fit_model,
                    f.slope,
                    f.r_squared,
                    f.m_lo,
                    f.m_hi,
                )
            )
        )
    with open(path, mode, encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
