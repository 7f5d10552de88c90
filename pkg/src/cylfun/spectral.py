"""Periodic L2 machinery on [0, 2pi): grids, quadrature, orthonormal bases,
finite-rank projections and their error/tail diagnostics.

Two orthonormal families are provided, both spanning the real trigonometric
polynomials of degree m//2 (m + 1 functions):

* ``TRIG_CARDINAL`` -- discrete trigonometric cardinal functions attached to
  the equispaced nodes x_k = 2*pi*k/(m+1).  They interpolate: at the nodes,
  phi_k(x_j) = sqrt((m+1)/(2*pi)) * delta_jk.
* ``REAL_FOURIER`` -- 1/sqrt(2*pi), sin(kx)/sqrt(pi), cos(kx)/sqrt(pi).

Everything here is a pure function over small immutable containers; the
arrays held by the containers are treated as read-only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Below this, |sin((x - x_k)/2)| is treated as a removable singularity of the
# cardinal-function ratio and the limit expression is used instead.
SINGULARITY_THRESHOLD = 1e-8


class BasisKind(enum.Enum):
    TRIG_CARDINAL = "cardinal"
    REAL_FOURIER = "fourier"


@dataclass(frozen=True, eq=False)
class UniformGrid:
    """Equispaced periodic grid: nodes 2*pi*j/n for j = 0..n-1, weight 2*pi/n."""

    n_points: int
    nodes: np.ndarray
    weight: float


def make_grid(n_points: int) -> UniformGrid:
    n_points = int(n_points)
    if n_points < 2:
        raise ValueError(f"need at least 2 grid points, got {n_points}")
    nodes = TWO_PI * np.arange(n_points) / n_points
    return UniformGrid(n_points=n_points, nodes=nodes, weight=TWO_PI / n_points)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values of a periodic function sampled on a UniformGrid."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"values have shape {values.shape}, expected ({self.grid.n_points},)"
            )
        object.__setattr__(self, "values", values)


def inner_product(f: GridFunction, g: GridFunction) -> float:
    """Periodic trapezoid rule for the L2 inner product on [0, 2*pi).

    Spectrally accurate for smooth periodic integrands, and exact for
    trigonometric polynomials whose product has degree < n_points.
    """
    if f.grid.n_points != g.grid.n_points:
        raise ValueError(
            f"mismatched grids: {f.grid.n_points} vs {g.grid.n_points} points"
        )
    return f.grid.weight * float(np.dot(f.values, g.values))


def l2_norm(f: GridFunction) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


@dataclass(frozen=True)
class BasisSpec:
    """Which orthonormal family spans the approximation space, and its size.

    ``m`` indexes the last basis element, so there are m + 1 functions.  Both
    kinds require m even: the cardinal family is only orthonormal for an odd
    number of nodes, and the Fourier family needs complete sin/cos pairs.
    """

    kind: BasisKind
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"m must be nonnegative, got {self.m}")
        if self.m % 2 != 0:
            raise ValueError(f"{self.kind.value} basis requires m even, got {self.m}")

    @property
    def n_functions(self) -> int:
        return self.m + 1

    @property
    def degree(self) -> int:
        """Highest trigonometric frequency contained in the span."""
        return self.m // 2


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coordinates a_k = (theta, phi_k) of a projected function."""

    basis: BasisSpec
    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (self.basis.n_functions,):
            raise ValueError(
                f"coefficients have shape {a.shape}, expected "
                f"({self.basis.n_functions},)"
            )
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class SobolevParams:
    """Regularity index and radius bound of a periodic Sobolev sphere."""

    s: int
    rho: float

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"regularity index must be >= 1, got {self.s}")
        if self.rho <= 0:
            raise ValueError(f"radius must be positive, got {self.rho}")


def _cardinal_nodes(m: int) -> np.ndarray:
    return TWO_PI * np.arange(m + 1) / (m + 1)


def basis_matrix(basis: BasisSpec, x: np.ndarray) -> np.ndarray:
    """Sample all basis functions at the points ``x``; shape (m + 1, len(x))."""
    x = np.asarray(x, dtype=float)
    if basis.kind is BasisKind.TRIG_CARDINAL:
        n = basis.m + 1
        u = x[None, :] - _cardinal_nodes(basis.m)[:, None]
        s = np.sin(0.5 * u)
        small = np.abs(s) < SINGULARITY_THRESHOLD
        ratio = np.sin(0.5 * n * u) / np.where(small, 1.0, s)
        limit = n * np.cos(0.5 * n * u) / np.cos(0.5 * u)
        return np.where(small, limit, ratio) / math.sqrt(TWO_PI * n)
    rows = np.empty((basis.n_functions, x.size))
    rows[0] = 1.0 / math.sqrt(TWO_PI)
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    for q in range(1, basis.degree + 1):
        rows[2 * q - 1] = np.sin(q * x) * inv_sqrt_pi
        rows[2 * q] = np.cos(q * x) * inv_sqrt_pi
    return rows


def basis_derivative_matrix(basis: BasisSpec, x: np.ndarray) -> np.ndarray:
    """Sample d(phi_k)/dx at the points ``x``; shape (m + 1, len(x)).

    The cardinal functions are differentiated through their mode expansion
    phi_k = (1 + 2*sum_j cos(j*(x - x_k))) / sqrt(2*pi*(m+1)), which is exact
    and has no removable singularity to guard.
    """
    x = np.asarray(x, dtype=float)
    if basis.kind is BasisKind.TRIG_CARDINAL:
        n = basis.m + 1
        freqs = np.arange(1, basis.degree + 1, dtype=float)
        xk = _cardinal_nodes(basis.m)
        # d/dx phi_k = -2/sqrt(2*pi*n) * sum_j j*sin(j*(x - x_k))
        sin_jx = np.sin(np.outer(freqs, x))
        cos_jx = np.cos(np.outer(freqs, x))
        cos_jxk = np.cos(np.outer(xk, freqs)) * freqs[None, :]
        sin_jxk = np.sin(np.outer(xk, freqs)) * freqs[None, :]
        return (-2.0 / math.sqrt(TWO_PI * n)) * (cos_jxk @ sin_jx - sin_jxk @ cos_jx)
    rows = np.zeros((basis.n_functions, x.size))
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    for q in range(1, basis.degree + 1):
        rows[2 * q - 1] = q * np.cos(q * x) * inv_sqrt_pi
        rows[2 * q] = -q * np.sin(q * x) * inv_sqrt_pi
    return rows


def eval_basis(basis: BasisSpec, k: int, x: float) -> float:
    """Evaluate the k-th basis function at a single point."""
    if not 0 <= k < basis.n_functions:
        raise ValueError(f"basis index {k} out of range 0..{basis.m}")
    return float(basis_matrix(basis, np.array([float(x)]))[k, 0])


def quadrature_floor(basis: BasisSpec) -> int:
    """Minimum quadrature size accepted when projecting onto ``basis``."""
    return max(8 * basis.n_functions, 256)


def default_quadrature(basis: BasisSpec) -> UniformGrid:
    return make_grid(quadrature_floor(basis))


def _as_grid_function(theta, grid: UniformGrid) -> GridFunction:
    """Accept a GridFunction on ``grid`` or anything exposing on_grid(grid)."""
    if isinstance(theta, GridFunction):
        if theta.grid.n_points != grid.n_points:
            raise ValueError(
                f"function sampled on {theta.grid.n_points} points, "
                f"quadrature uses {grid.n_points}"
            )
        return theta
    on_grid = getattr(theta, "on_grid", None)
    if on_grid is None:
        raise TypeError(f"cannot interpret {type(theta).__name__} as a grid function")
    return on_grid(grid)


def _check_quadrature(basis: BasisSpec, quad: UniformGrid) -> None:
    floor = quadrature_floor(basis)
    if quad.n_points < floor:
        raise ValueError(
            f"quadrature grid has {quad.n_points} points, "
            f"need at least {floor} for m={basis.m}"
        )


def project(theta, basis: BasisSpec, quad: UniformGrid) -> CoefficientVector:
    """Orthogonal projection coordinates a_k = (theta, phi_k) by quadrature."""
    _check_quadrature(basis, quad)
    f = _as_grid_function(theta, quad)
    a = quad.weight * (basis_matrix(basis, quad.nodes) @ f.values)
    return CoefficientVector(basis=basis, a=a)


def synthesize(coeffs: CoefficientVector, grid: UniformGrid) -> GridFunction:
    """Sample sum_k a_k phi_k on ``grid``."""
    values = coeffs.a @ basis_matrix(coeffs.basis, grid.nodes)
    return GridFunction(grid=grid, values=values)


def project_values(values: np.ndarray, basis: BasisSpec, quad: UniformGrid) -> np.ndarray:
    """Row-wise projection of pre-sampled functions; shape (batch, m + 1).

    Ensemble convenience equivalent to calling :func:`project` per row.
    """
    _check_quadrature(basis, quad)
    phi = basis_matrix(basis, quad.nodes)
    return np.atleast_2d(values) @ (quad.weight * phi.T)


def synthesize_values(coeff_rows: np.ndarray, basis: BasisSpec, grid: UniformGrid) -> np.ndarray:
    """Row-wise synthesis; shape (batch, n_points)."""
    return np.atleast_2d(coeff_rows) @ basis_matrix(basis, grid.nodes)


def tail_energy(theta, basis: BasisSpec, quad: UniformGrid) -> float:
    """Energy of theta outside the span of ``basis``: ||theta||^2 - sum a_k^2.

    Tiny negative values from rounding are clamped to zero; a negative value
    beyond the rounding guard indicates a broken quadrature and raises.
    """
    f = _as_grid_function(theta, quad)
    norm_sq = quad.weight * float(np.dot(f.values, f.values))
    a = project(f, basis, quad).a
    tail = norm_sq - float(np.dot(a, a))
    if tail < 0.0:
        guard = 1e-12 * max(1.0, norm_sq)
        if tail < -guard:
            raise ValueError(
                f"tail energy {tail} below the rounding guard; "
                "quadrature resolution is inconsistent with the input"
            )
        return 0.0
    return tail


def l2_projection_error(theta, basis: BasisSpec, quad: UniformGrid) -> float:
    """||theta - P_m theta||_L2 by quadrature."""
    f = _as_grid_function(theta, quad)
    a = project(f, basis, quad)
    residual = f.values - synthesize(a, quad).values
    return math.sqrt(max(quad.weight * float(np.dot(residual, residual)), 0.0))


def sobolev_norm_sq(spectrum, s: int) -> float:
    """Squared periodic H^s norm from one-sided complex mode amplitudes.

    Accepts anything exposing a complex coefficient array ``c`` indexed
    k = 0..N (negative modes implied by conjugate symmetry), or the array
    itself: returns |c_0|^2 + 2*sum_k (1 + k^2 + ... + k^(2s)) |c_k|^2.
    """
    if s < 1:
        raise ValueError(f"regularity index must be >= 1, got {s}")
    c = np.asarray(getattr(spectrum, "c", spectrum), dtype=complex)
    total = float(abs(c[0]) ** 2)
    if c.size > 1:
        k = np.arange(1, c.size, dtype=float)
        weights = np.ones_like(k)
        for q in range(1, s + 1):
            weights += k ** (2 * q)
        total += 2.0 * float(weights @ (np.abs(c[1:]) ** 2))
    return total
