"""Seeded generation of random periodic test functions with prescribed
spectral decay, plus exact translation in Fourier space.

A test function is stored as one-sided complex Fourier coefficients
c_0..c_N; negative modes are implied by c_{-k} = conj(c_k), so the
represented function theta(x) = c_0 + 2*sum_k Re(c_k e^{ikx}) is real.

Randomness is drawn from numpy's PCG64.  Stream splitting rule: the spectrum
with index ``i`` in role ``role`` (0 for the primary ensemble, 1 for
perturbation directions) uses ``SeedSequence(seed, spawn_key=(role, i))``,
so ensembles are reproducible regardless of evaluation order or parallel
schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import TWO_PI, GridFunction, UniformGrid, sobolev_norm_sq

ALGEBRAIC = "algebraic"
EXPONENTIAL = "exponential"


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """One-sided complex Fourier coefficients c_0..c_N of a real function."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a nonempty 1-d array")
        if abs(c[0].imag) > 1e-14 * max(1.0, abs(c[0])):
            raise ValueError(f"c_0 must be real, got {c[0]}")
        c = c.copy()
        c[0] = c[0].real
        object.__setattr__(self, "c", c)

    @property
    def n_modes(self) -> int:
        return self.c.size - 1

    def on_grid(self, grid: UniformGrid) -> GridFunction:
        return eval_on_grid(self, grid)

    def shift(self, t: float) -> "FourierSpectrum":
        return shift(self, t)

    def l2_norm_sq(self) -> float:
        """Exact ||theta||^2_L2 by Parseval: 2*pi*(c_0^2 + 2*sum|c_k|^2)."""
        c = self.c
        return TWO_PI * float(c[0].real ** 2 + 2.0 * np.sum(np.abs(c[1:]) ** 2))

    def sobolev_norm_sq(self, s: int) -> float:
        return sobolev_norm_sq(self, s)


@dataclass(frozen=True)
class SpectrumLaw:
    """Decay law for random spectra.

    ``algebraic``: |c_k| = u_k / k**param (param >= 1);
    ``exponential``: |c_k| = u_k / param**k (param > 1).
    In both cases u_k is uniform on [0, amplitude], the phase of c_k is
    uniform on [0, 2*pi), and c_0 is uniform on [-amplitude, amplitude].
    """

    kind: str
    param: float
    n_modes: int = 1000
    amplitude: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (ALGEBRAIC, EXPONENTIAL):
            raise ValueError(f"unknown spectrum law {self.kind!r}")
        if self.kind == ALGEBRAIC and not self.param >= 1.0:
            raise ValueError(f"algebraic law needs param >= 1, got {self.param}")
        if self.kind == EXPONENTIAL and not self.param > 1.0:
            raise ValueError(f"exponential law needs param > 1, got {self.param}")
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be positive, got {self.n_modes}")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")


def stream(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the sub-stream identified by ``key`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def sample_spectrum(law: SpectrumLaw, rng: np.random.Generator | None = None) -> FourierSpectrum:
    """Draw one spectrum.  Deterministic given (law, rng state).

    Draw order is fixed: c_0, then all amplitudes u_1..u_N, then all phases.
    """
    if rng is None:
        rng = stream(law.seed)
    c = np.empty(law.n_modes + 1, dtype=complex)
    c[0] = rng.uniform(-law.amplitude, law.amplitude)
    u = rng.uniform(0.0, law.amplitude, size=law.n_modes)
    phases = rng.uniform(0.0, TWO_PI, size=law.n_modes)
    k = np.arange(1, law.n_modes + 1, dtype=float)
    if law.kind == ALGEBRAIC:
        decay = k ** (-law.param)
    else:
        decay = law.param ** (-k)
    c[1:] = u * decay * np.exp(1j * phases)
    return FourierSpectrum(c=c)


def sample_ensemble(law: SpectrumLaw, n_samples: int, role: int = 0) -> list[FourierSpectrum]:
    """n_samples spectra on the documented per-index sub-streams."""
    return [
        sample_spectrum(law, stream(law.seed, role, i)) for i in range(n_samples)
    ]


@lru_cache(maxsize=2)
def _phase_matrix(n_modes: int, n_points: int) -> np.ndarray:
    """exp(i*k*x_j) for k = 1..N on the canonical n-point grid."""
    x = TWO_PI * np.arange(n_points) / n_points
    return np.exp(1j * np.outer(np.arange(1, n_modes + 1), x))


def eval_on_grid(spectrum: FourierSpectrum, grid: UniformGrid) -> GridFunction:
    """Sample theta(x) = c_0 + 2*sum_k Re(c_k e^{ikx}) on the grid."""
    values = eval_many(spectrum.c[None, :], grid)[0]
    return GridFunction(grid=grid, values=values)


def eval_many(coeff_rows: np.ndarray, grid: UniformGrid) -> np.ndarray:
    """Row-wise grid sampling of stacked spectra; shape (batch, n_points)."""
    coeff_rows = np.atleast_2d(np.asarray(coeff_rows, dtype=complex))
    n_modes = coeff_rows.shape[1] - 1
    values = np.repeat(coeff_rows[:, :1].real, grid.n_points, axis=1)
    if n_modes > 0:
        values += 2.0 * np.real(coeff_rows[:, 1:] @ _phase_matrix(n_modes, grid.n_points))
    return values


def shift(spectrum: FourierSpectrum, t: float) -> FourierSpectrum:
    """Exact translation: the returned spectrum represents theta(x - t)."""
    k = np.arange(spectrum.c.size)
    return FourierSpectrum(c=spectrum.c * np.exp(-1j * k * t))


def shift_many(coeff_rows: np.ndarray, t: float) -> np.ndarray:
    coeff_rows = np.atleast_2d(np.asarray(coeff_rows, dtype=complex))
    k = np.arange(coeff_rows.shape[1])
    return coeff_rows * np.exp(-1j * k * t)[None, :]


def stack_coefficients(spectra) -> np.ndarray:
    """Stack equal-length spectra into a (batch, N + 1) complex matrix."""
    return np.vstack([s.c for s in spectra])


def save_spectrum(spectrum: FourierSpectrum, law: SpectrumLaw, path) -> None:
    """Write the text format: a four-line header, then one 'k re im' per mode.

    Floats are written with repr, so a load reproduces the values bit-exactly.
    """
    lines = [
        f"kind {law.kind}",
        f"param {law.param!r}",
        f"n_modes {law.n_modes}",
        f"seed {law.seed}",
    ]
    for k, ck in enumerate(spectrum.c):
        lines.append(f"{k} {ck.real!r} {ck.imag!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_spectrum(path) -> tuple[FourierSpectrum, SpectrumLaw]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    header = dict(line.split(None, 1) for line in lines[:4])
    law = SpectrumLaw(
        kind=header["kind"],
        param=float(header["param"]),
        n_modes=int(header["n_modes"]),
        seed=int(header["seed"]),
    )
    c = np.empty(len(lines) - 4, dtype=complex)
    for line in lines[4:]:
        k_str, re_str, im_str = line.split()
        c[int(k_str)] = complex(float(re_str), float(im_str))
    return FourierSpectrum(c=c), law
