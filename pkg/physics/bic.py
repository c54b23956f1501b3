"""BIC states: photon wavefunction, normalisation and diagnostics.

ξ(x) = Σ_ℓ a_ℓ ξ₁(x − (ℓ−1)d) with ξ₁(x) = W(E) sin(k_E|x|) + η(x), where η is
the evanescent correction integrated along Im κ = m with F in place of f.

Grid rules enforced here:
- uniform spacing h = d / per_cell, so every emitter sits on a sample
- padding of 6/m on both sides unless overridden
- |x − x_ℓ| is always an integer multiple of h, so η is tabulated once per
  multiple and reused by all emitters
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from physics.errors import ClassificationError, DomainError, GridError
from physics.model import (
    EmitterArray,
    WaveguideModel,
    field_weight_W,
    form_factor,
    k_of_E,
    omega_on_line,
    resonant_energy,
)
from physics.selfenergy import DEFAULT_QUAD
from physics.waves import ExcitationWave, WaveKind, epsilon_for_bic
from services.quadrature import QuadratureConfig, shifted_line_integral

log = logging.getLogger(__name__)

ETA_CUTOFF = 36.0
ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    per_cell: int = 64
    pad: float | None = None

    def __post_init__(self) -> None:
        if self.per_cell < 2:
            raise GridError(f"need at least 2 samples per cell, got {self.per_cell}")
        if self.pad is not None and self.pad < 0:
            raise GridError(f"padding must be non-negative, got {self.pad}")


@dataclass(frozen=True)
class SampleGrid:
    x: np.ndarray
    h: float
    emitter_index: np.ndarray
    positions: np.ndarray


@dataclass(frozen=True)
class NormReport:
    emitters: float
    field: float
    total: float


@dataclass(frozen=True)
class BicState:
    nu: int
    j: int
    E: float
    epsilon_required: float
    amplitudes: np.ndarray
    grid: SampleGrid
    xi: np.ndarray
    xi_pole: np.ndarray
    norm_report: NormReport
    scale: float
    constraint_residual: tuple[complex, complex]
    jumps: np.ndarray
    approximate: bool = False

    @property
    def x(self) -> np.ndarray:
        return self.grid.x


def make_grid(model: WaveguideModel, array: EmitterArray, spec: GridSpec) -> SampleGrid:
    h = array.d / spec.per_cell
    pad = 6.0 / model.m if spec.pad is None else spec.pad
    offset = max(1, math.ceil(pad / h - 1e-9))
    count = (array.n - 1) * spec.per_cell + 2 * offset + 1
    x = h * (np.arange(count) - offset)
    index = offset + spec.per_cell * np.arange(array.n)
    return SampleGrid(x=x, h=h, emitter_index=index, positions=array.positions)


# ── Single-emitter field ─────────────────────────────────────────────────────

@lru_cache(maxsize=65536)
def _eta_cached(m: float, gamma: float, E: float, x: float, quad: QuadratureConfig) -> float:
    model = WaveguideModel(m=m, gamma=gamma)
    norm = math.sqrt(gamma / (2.0 * math.pi))

    def kernel(k: float) -> complex:
        w = omega_on_line(model, k)
        return norm / cmath.sqrt(w) / (E - w)

    k_max = quad.resolve_k_max(40.0 * max(E, m))
    res = shifted_line_integral(kernel, x, m, k_max, quad, scale=norm / max(E, m))
    return math.exp(-m * x) * res.value / math.sqrt(2.0 * math.pi)


def eta(model: WaveguideModel, E: float, x: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Evanescent correction η(x); even in x and bounded by e^{−m|x|}|η(0)|."""
    k_of_E(model, E)
    return _eta_cached(model.m, model.gamma, float(E), abs(float(x)), quad)


def xi_single(model: WaveguideModel, E: float, x: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """ξ₁(x) = W(E) sin(k_E|x|) + η(x)."""
    k = k_of_E(model, E)
    return field_weight_W(model, E) * math.sin(k * abs(x)) + eta(model, E, x, quad)


def eta_table(
    model: WaveguideModel, E: float, h: float, q_max: int, quad: QuadratureConfig = DEFAULT_QUAD
) -> np.ndarray:
    """η(q·h) for q = 0..q_max; zero once m·q·h exceeds the cutoff."""
    table = np.zeros(q_max + 1)
    for q in range(q_max + 1):
        if model.m * q * h > ETA_CUTOFF:
            break
        table[q] = eta(model, E, q * h, quad)
    return table


# ── Chain field ──────────────────────────────────────────────────────────────

def field_on_grid(
    model: WaveguideModel,
    array: EmitterArray,
    E: float,
    amplitudes: np.ndarray,
    grid: SampleGrid,
    quad: QuadratureConfig = DEFAULT_QUAD,
    include_eta: bool = True,
) -> np.ndarray:
    """Unnormalised ξ on the grid; linear in the amplitudes."""
    amplitudes = np.asarray(amplitudes)
    if amplitudes.shape != (array.n,):
        raise DomainError(f"expected {array.n} amplitudes, got shape {amplitudes.shape}")
    k = k_of_E(model, E)
    W = field_weight_W(model, E)
    samples = np.arange(grid.x.size)
    offsets = np.abs(samples[None, :] - grid.emitter_index[:, None])
    single = W * np.sin(k * grid.h * offsets)
    if include_eta:
        single = single + eta_table(model, E, grid.h, int(offsets.max()), quad)[offsets]
    return amplitudes @ single


def constraint_residual(
    model: WaveguideModel, array: EmitterArray, E: float, amplitudes: np.ndarray
) -> tuple[complex, complex]:
    """F(k_E) Σ_ℓ a_ℓ e^{±i(ℓ−1)k_E d} for both signs."""
    k = k_of_E(model, E)
    phase = np.exp(1j * k * array.positions)
    amplitudes = np.asarray(amplitudes)
    F = form_factor(model, k)
    return complex(F * (amplitudes @ phase)), complex(F * (amplitudes @ phase.conj()))


def _aligned_indices(grid: SampleGrid) -> np.ndarray:
    idx = grid.emitter_index
    if np.any(idx < 1) or np.any(idx > grid.x.size - 2):
        raise GridError("emitters must have a sample on both sides")
    if np.any(np.abs(grid.x[idx] - grid.positions) > ALIGN_TOL * max(grid.h, 1.0)):
        raise GridError("emitter positions are not grid-aligned")
    return idx


def derivative_jumps(state: BicState, variant: str = "full") -> np.ndarray:
    """ξ′(x_ℓ⁺) − ξ′(x_ℓ⁻) from one-sided first-order differences.

    variant "pole" uses the sinusoidal part only, where the jump equals
    2W·sin(k h)/h·a_ℓ exactly.
    """
    if variant not in ("full", "pole"):
        raise ValueError(f"unknown variant {variant!r}")
    field = state.xi if variant == "full" else state.xi_pole
    return _jumps(field, state.grid)


def _jumps(field: np.ndarray, grid: SampleGrid) -> np.ndarray:
    idx = _aligned_indices(grid)
    return (field[idx + 1] - 2.0 * field[idx] + field[idx - 1]) / grid.h


# ── Assembly ─────────────────────────────────────────────────────────────────

def assemble(
    model: WaveguideModel,
    array: EmitterArray,
    wave: ExcitationWave,
    grid_spec: GridSpec | None = None,
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> BicState:
    """Build and normalise the BIC carried by *wave* at E = E_ν."""
    if wave.kind is WaveKind.SUPERRADIANT:
        raise ClassificationError(f"wave j={wave.j} is superradiant and carries no bound state")
    if wave.n != array.n:
        raise DomainError(f"wave has {wave.n} amplitudes but the array holds {array.n} emitters")
    grid_spec = grid_spec or GridSpec()
    E = resonant_energy(model, array.d, wave.nu)
    eps = epsilon_for_bic(model, array.d, array.n, wave.nu, wave.j, quad)
    grid = make_grid(model, array, grid_spec)

    amps = np.asarray(wave.amplitudes)
    xi = field_on_grid(model, array, E, amps, grid, quad, include_eta=True)
    xi_pole = field_on_grid(model, array, E, amps, grid, quad, include_eta=False)

    weight = float(np.sum(np.abs(amps) ** 2))
    field_part = float(integrate.trapezoid(np.abs(xi) ** 2, dx=grid.h))
    scale = 1.0 / math.sqrt(weight + field_part)
    amps, xi, xi_pole = amps * scale, xi * scale, xi_pole * scale
    report = NormReport(
        emitters=weight * scale**2,
        field=field_part * scale**2,
        total=(weight + field_part) * scale**2,
    )
    if wave.approximate:
        log.warning("assembling deformed wave j=%d at E_ν; state is approximate", wave.j)
    return BicState(
        nu=wave.nu,
        j=wave.j,
        E=E,
        epsilon_required=eps,
        amplitudes=amps,
        grid=grid,
        xi=xi,
        xi_pole=xi_pole,
        norm_report=report,
        scale=scale,
        constraint_residual=constraint_residual(model, array, E, amps),
        jumps=_jumps(xi, grid),
        approximate=wave.approximate,
    )
