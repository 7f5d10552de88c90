"""Concrete nonlinear functionals on periodic L2, their directional
derivatives and derivative fields, and restriction to coefficient space.

Every model exposes the same capability bundle:

* ``evaluate(theta)``            -- F applied to a sampled function,
* ``frechet_apply(theta, eta)``  -- the first-order directional derivative,
* ``derivative_field(theta)``    -- the L2 kernel representing it, so that
  frechet_apply(theta, eta) == inner_product(derivative_field(theta), eta),
* ``evaluate_values(values, grid)`` -- vectorized evaluate over stacked rows.

Models are stateless and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sampling import FourierSpectrum
from .spectral import (
    BasisSpec,
    CoefficientVector,
    GridFunction,
    UniformGrid,
    basis_matrix,
    inner_product,
)


class SinWeightedSquare:
    """F(theta) = integral of sin(x) * sin(theta(x))^2 over [0, 2*pi)."""

    name = "sinsq"
    translation_invariant = False

    def evaluate_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        integrand = np.sin(grid.nodes) * np.sin(values) ** 2
        return grid.weight * integrand.sum(axis=-1)

    def evaluate(self, theta: GridFunction) -> float:
        return float(self.evaluate_values(theta.values, theta.grid))

    def derivative_field_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        return np.sin(grid.nodes) * np.sin(2.0 * values)

    def derivative_field(self, theta: GridFunction) -> GridFunction:
        return GridFunction(
            grid=theta.grid,
            values=self.derivative_field_values(theta.values, theta.grid),
        )

    def frechet_apply(self, theta: GridFunction, eta: GridFunction) -> float:
        if theta.grid.n_points != eta.grid.n_points:
            raise ValueError("theta and eta must share a grid")
        integrand = np.sin(theta.grid.nodes) * np.sin(2.0 * theta.values) * eta.values
        return theta.grid.weight * float(integrand.sum())


class PlainSquare(SinWeightedSquare):
    """F(theta) = integral of sin(theta(x))^2; invariant under translation."""

    name = "sinsq-invariant"
    translation_invariant = True

    def evaluate_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        return grid.weight * (np.sin(values) ** 2).sum(axis=-1)

    def derivative_field_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        return np.sin(2.0 * values)

    def frechet_apply(self, theta: GridFunction, eta: GridFunction) -> float:
        if theta.grid.n_points != eta.grid.n_points:
            raise ValueError("theta and eta must share a grid")
        integrand = np.sin(2.0 * theta.values) * eta.values
        return theta.grid.weight * float(integrand.sum())


class CauchyOfSineCoordinate:
    """F(theta) = pi / (pi + (theta, sin(x))^2), a bounded rational functional
    of a single projection coordinate."""

    name = "cauchy-sin"
    translation_invariant = False

    @staticmethod
    def _sine_coordinate(values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        return grid.weight * (values @ np.sin(grid.nodes))

    def evaluate_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        p = self._sine_coordinate(values, grid)
        return math.pi / (math.pi + p**2)

    def evaluate(self, theta: GridFunction) -> float:
        return float(self.evaluate_values(theta.values, theta.grid))

    def derivative_field_values(self, values: np.ndarray, grid: UniformGrid) -> np.ndarray:
        p = self._sine_coordinate(values, grid)
        scale = -2.0 * math.pi * p / (math.pi + p**2) ** 2
        return scale * np.sin(grid.nodes)

    def derivative_field(self, theta: GridFunction) -> GridFunction:
        return GridFunction(
            grid=theta.grid,
            values=self.derivative_field_values(theta.values, theta.grid),
        )

    def frechet_apply(self, theta: GridFunction, eta: GridFunction) -> float:
        return inner_product(self.derivative_field(theta), eta)


MODEL_REGISTRY = {
    model.name: model
    for model in (SinWeightedSquare(), PlainSquare(), CauchyOfSineCoordinate())
}


def get_model(name: str):
    try:
        return MODEL_REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; registered: {sorted(MODEL_REGISTRY)}"
        ) from None


def eval_functional(model, theta, grid: UniformGrid | None = None) -> float:
    """Evaluate a model on a GridFunction or a FourierSpectrum (sampled on grid)."""
    if isinstance(theta, FourierSpectrum):
        if grid is None:
            raise ValueError("a grid is required to evaluate a spectrum")
        theta = theta.on_grid(grid)
    return model.evaluate(theta)


def exact_fde_solution(
    model, spectrum: FourierSpectrum, t: float, grid: UniformGrid
) -> float:
    """Value at time t of the advection flow: the model applied to theta(x - t).

    The translation is done in Fourier space, so the only discretization is
    the final quadrature.
    """
    return model.evaluate(spectrum.shift(t).on_grid(grid))


@dataclass(frozen=True, eq=False)
class CylindricalFunction:
    """A functional restricted to coefficient space: f(a) = F(sum_k a_k phi_k).

    The basis sample matrix on the quadrature grid is precomputed once; the
    instance is immutable and shareable.
    """

    model: object
    basis: BasisSpec
    quad: UniformGrid

    def __post_init__(self):
        object.__setattr__(self, "_phi", basis_matrix(self.basis, self.quad.nodes))

    @property
    def n_coeffs(self) -> int:
        return self.basis.n_functions

    def _coeff_rows(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if a.shape[-1] != self.n_coeffs:
            raise ValueError(
                f"expected {self.n_coeffs} coefficients, got {a.shape[-1]}"
            )
        return a

    def evaluate_coeffs(self, a: np.ndarray) -> float:
        return float(self.evaluate_batch(self._coeff_rows(a)[None, :])[0])

    def evaluate_batch(self, coeff_rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(self._coeff_rows(coeff_rows))
        return self.model.evaluate_values(rows @ self._phi, self.quad)

    def __call__(self, a) -> float:
        if isinstance(a, CoefficientVector):
            a = a.a
        return self.evaluate_coeffs(a)

    def gradient(self, a: np.ndarray) -> np.ndarray:
        """Partial derivatives df/da_k = (derivative field at sum a_k phi_k, phi_k)."""
        values = self._coeff_rows(a) @ self._phi
        field = self.model.derivative_field_values(values, self.quad)
        return self.quad.weight * (self._phi @ field)


def gradient_wrt_coeffs(model, basis: BasisSpec, a, quad: UniformGrid) -> np.ndarray:
    """Coefficient-space gradient of the restricted functional at ``a``."""
    if isinstance(a, CoefficientVector):
        a = a.a
    return CylindricalFunction(model=model, basis=basis, quad=quad).gradient(a)
