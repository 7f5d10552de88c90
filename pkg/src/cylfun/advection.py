"""Coefficient-space solver for the evolution induced by the periodic
transport flow theta(x) -> theta(x - t).

The generator is the skew-symmetric matrix

    C[j, k] = integral of (d phi_j / dx) * phi_k over [0, 2*pi),

oriented so that, for a function already inside the span, expm(t*C) maps its
coefficients to the coefficients of the translated function theta(x - t).
(The opposite orientation, derivative on the column index, is the transpose;
swapping it would propagate translations backwards in time.)  With initial
data f0 on coefficient space, the induced flow value is f0(expm(t*C) a), and
the corresponding transport equation in the coefficients reads

    df/dt = sum_{j,k} a_j C[k, j] df/da_k,

which verify_pde_residual checks by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import CylindricalFunction, get_model
from .sampling import FourierSpectrum
from .spectral import (
    BasisSpec,
    CoefficientVector,
    UniformGrid,
    _check_quadrature,
    basis_derivative_matrix,
    basis_matrix,
    project,
    synthesize,
)

SKEW_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Skew-symmetric transport generator on coefficient space."""

    basis: BasisSpec
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        n = self.basis.n_functions
        if matrix.shape != (n, n):
            raise ValueError(f"matrix shape {matrix.shape}, expected ({n}, {n})")
        skew_defect = float(np.max(np.abs(matrix + matrix.T)))
        if skew_defect > SKEW_TOL:
            raise ValueError(f"generator is not skew-symmetric: defect {skew_defect}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def size(self) -> int:
        return self.basis.n_functions


@dataclass(frozen=True, eq=False)
class PropagatorCache:
    """expm(t*C) for a skew-symmetric C; an orthogonal matrix."""

    t: float
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if not np.all(np.isfinite(matrix)):
            raise RuntimeError("propagator has non-finite entries")
        defect = float(np.max(np.abs(matrix.T @ matrix - np.eye(matrix.shape[0]))))
        if defect > ORTHOGONALITY_TOL:
            raise RuntimeError(f"propagator is not orthogonal: defect {defect}")
        object.__setattr__(self, "matrix", matrix)


def assemble_advection_matrix(basis: BasisSpec, quad: UniformGrid) -> CoefficientMatrix:
    """Quadrature assembly of C[j, k] = (phi_j', phi_k).

    Basis derivatives are analytic, and the integrands are trigonometric
    polynomials of degree <= m, so the oversampled trapezoid rule is exact up
    to rounding.
    """
    _check_quadrature(basis, quad)
    d_phi = basis_derivative_matrix(basis, quad.nodes)
    phi = basis_matrix(basis, quad.nodes)
    return CoefficientMatrix(basis=basis, matrix=quad.weight * (d_phi @ phi.T))


def matrix_exponential(C: CoefficientMatrix, t: float) -> PropagatorCache:
    """expm(t*C) through the eigendecomposition of the Hermitian matrix i*C.

    For skew-symmetric C this is exact up to rounding and returns an
    orthogonal matrix by construction.
    """
    eigvals, eigvecs = np.linalg.eigh(1j * C.matrix)
    phases = np.exp(-1j * t * eigvals)
    matrix = (eigvecs * phases) @ eigvecs.conj().T
    return PropagatorCache(t=float(t), matrix=matrix.real)


def advance_coefficients(C: CoefficientMatrix, a: np.ndarray, t: float) -> np.ndarray:
    return matrix_exponential(C, t).matrix @ np.asarray(a, dtype=float)


def solve_cylindrical(
    f0: CylindricalFunction, C: CoefficientMatrix, a, t: float
) -> float:
    """Flow value f0(expm(t*C) a) of the coefficient-space transport problem."""
    if isinstance(a, CoefficientVector):
        a = a.a
    a = np.asarray(a, dtype=float)
    if a.shape != (C.size,):
        raise ValueError(f"coefficient vector has shape {a.shape}, expected ({C.size},)")
    if f0.n_coeffs != C.size:
        raise ValueError(
            f"initial functional takes {f0.n_coeffs} coefficients, generator has {C.size}"
        )
    return f0.evaluate_coeffs(advance_coefficients(C, a, t))


def verify_pde_residual(
    f0: CylindricalFunction, C: CoefficientMatrix, a, t: float, h: float
) -> float:
    """|df/dt - sum_{j,k} a_j C[k, j] df/da_k| at (a, t) by central differences.

    A small value certifies that f(a, t) = f0(expm(t*C) a) solves the
    coefficient-space transport equation.
    """
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    if isinstance(a, CoefficientVector):
        a = a.a
    a = np.asarray(a, dtype=float)

    def flow(a_point: np.ndarray, t_point: float) -> float:
        return f0.evaluate_coeffs(matrix_exponential(C, t_point).matrix @ a_point)

    df_dt = (flow(a, t + h) - flow(a, t - h)) / (2.0 * h)
    propagated = matrix_exponential(C, t).matrix
    grad = np.empty(C.size)
    for k in range(C.size):
        step = h * propagated[:, k]
        base = propagated @ a
        grad[k] = (
            f0.evaluate_coeffs(base + step) - f0.evaluate_coeffs(base - step)
        ) / (2.0 * h)
    return abs(df_dt - float(grad @ (C.matrix @ a)))


def _extension_modes(basis: BasisSpec, tail_modes: int, x: np.ndarray):
    """Orthonormal continuation of the span: sin/cos pairs with frequency
    above the basis degree.  Returns (values, derivatives), each
    (tail_modes, len(x))."""
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    values = np.empty((tail_modes, x.size))
    derivs = np.empty((tail_modes, x.size))
    for i in range(tail_modes):
        freq = basis.degree + 1 + i // 2
        if i % 2 == 0:
            values[i] = np.sin(freq * x) * inv_sqrt_pi
            derivs[i] = freq * np.cos(freq * x) * inv_sqrt_pi
        else:
            values[i] = np.cos(freq * x) * inv_sqrt_pi
            derivs[i] = -freq * np.sin(freq * x) * inv_sqrt_pi
    return values, derivs


def residual_tail(
    theta: FourierSpectrum,
    basis: BasisSpec,
    quad: UniformGrid,
    tail_modes: int | None = None,
    model=None,
) -> float:
    """Truncated consistency residual of the coefficient-space transport scheme.

    |sum_i (derivative field at P_m theta, psi_i) * (psi_i', P_m theta)| over
    the first ``tail_modes`` continuation modes psi beyond the span (default
    4*(m+1)).  For bases spanning whole trigonometric-polynomial spaces the
    transport operator maps the span into itself, so the exact residual
    vanishes and this measures only the truncation/quadrature leakage.
    """
    if model is None:
        model = get_model("sinsq")
    if tail_modes is None:
        tail_modes = 4 * basis.n_functions
    if tail_modes < 1:
        raise ValueError(f"tail_modes must be positive, got {tail_modes}")
    projected = synthesize(project(theta, basis, quad), quad)
    field = model.derivative_field(projected)
    psi, d_psi = _extension_modes(basis, tail_modes, quad.nodes)
    field_coeffs = quad.weight * (psi @ field.values)
    advect_coeffs = quad.weight * (d_psi @ projected.values)
    return abs(float(field_coeffs @ advect_coeffs))
