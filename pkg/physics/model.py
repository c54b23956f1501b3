"""Waveguide model: dispersion, form factor and derived scalars.

Conventions enforced here:
- Klein–Gordon dispersion ω(k) = √(k² + m²), form factor F(k) = √(γ / 2πω(k))
- Analytic continuation uses the principal square root on the strip |Im κ| < m
- κ = ±im are branch points and are refused
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from physics.errors import BranchPointError, DomainError

BRANCH_TOL = 1e-14


class Dispersion(str, Enum):
    KLEIN_GORDON = "KleinGordon"


@dataclass(frozen=True)
class WaveguideModel:
    m: float = 1.0
    gamma: float = 0.1
    kind: Dispersion = Dispersion.KLEIN_GORDON

    def __post_init__(self) -> None:
        if not (self.m > 0):
            raise DomainError(f"mass m must be positive, got {self.m}")
        if not (self.gamma > 0):
            raise DomainError(f"coupling gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class EmitterArray:
    n: int
    d: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"need at least one emitter, got n={self.n}")
        if not (self.d > 0):
            raise DomainError(f"spacing d must be positive, got {self.d}")

    @property
    def positions(self) -> np.ndarray:
        """x_j = (j − 1)·d for j = 1..n."""
        return self.d * np.arange(self.n, dtype=float)


# ── Real axis ────────────────────────────────────────────────────────────────

def omega(model: WaveguideModel, k: float | np.ndarray) -> float | np.ndarray:
    if np.ndim(k) == 0:
        return math.hypot(float(k), model.m)
    return np.hypot(np.asarray(k, dtype=float), model.m)


def omega_prime(model: WaveguideModel, k: float) -> float:
    return k / omega(model, k)


def form_factor(model: WaveguideModel, k: float | np.ndarray) -> float | np.ndarray:
    return np.sqrt(model.gamma / (2.0 * np.pi * omega(model, k)))


# ── Analytic continuation ────────────────────────────────────────────────────

def _check_strip(model: WaveguideModel, kappa: np.ndarray) -> None:
    if np.any(np.abs(kappa.imag) > model.m * (1.0 + 1e-12)):
        raise DomainError("continuation only defined on the strip |Im κ| ≤ m")
    near = np.minimum(np.abs(kappa - 1j * model.m), np.abs(kappa + 1j * model.m))
    if np.any(near <= BRANCH_TOL * max(model.m, 1.0)):
        raise BranchPointError("κ = ±im is a branch point of ω(κ)")


def omega_cont(model: WaveguideModel, kappa: complex | np.ndarray) -> complex | np.ndarray:
    """Principal branch of √(κ² + m²) on the strip.

    κ² + m² is formed as (κ − im)(κ + im) so that values next to the branch
    points keep full relative precision.
    """
    arr = np.asarray(kappa, dtype=complex)
    _check_strip(model, arr)
    out = np.sqrt((arr - 1j * model.m) * (arr + 1j * model.m))
    return complex(out) if out.ndim == 0 else out


def form_factor_cont(model: WaveguideModel, kappa: complex | np.ndarray) -> complex | np.ndarray:
    """F(κ) = √(γ / 2πω(κ)), principal branch."""
    w = np.asarray(omega_cont(model, kappa))
    out = np.sqrt(model.gamma / (2.0 * np.pi * w))
    return complex(out) if out.ndim == 0 else out


def coupling_density_cont(model: WaveguideModel, kappa: complex | np.ndarray) -> complex | np.ndarray:
    """f(κ) = F(κ)² = γ / 2πω(κ)."""
    w = np.asarray(omega_cont(model, kappa))
    out = model.gamma / (2.0 * np.pi * w)
    return complex(out) if out.ndim == 0 else out


# ── Derived scalars ──────────────────────────────────────────────────────────

def k_of_E(model: WaveguideModel, E: float) -> float:
    """Positive root of ω(k) = E."""
    if not (E > model.m):
        raise DomainError(f"E={E} is not above the threshold m={model.m}; no propagating photon")
    return math.sqrt((E - model.m) * (E + model.m))


def resonant_energy(model: WaveguideModel, d: float, nu: int) -> float:
    """E_ν = ω(νπ/d)."""
    if not (d > 0):
        raise DomainError(f"spacing d must be positive, got {d}")
    if nu < 0:
        raise DomainError(f"resonance index must be non-negative, got {nu}")
    return math.hypot(nu * math.pi / d, model.m)


def residue_weight_Z(model: WaveguideModel, E: float) -> float:
    """Z(E) = 2π f(k_E) / ω′(k_E)."""
    k = k_of_E(model, E)
    f = model.gamma / (2.0 * math.pi * E)
    return 2.0 * math.pi * f / (k / E)


def field_weight_W(model: WaveguideModel, E: float) -> float:
    """W(E) = √(2π) F(k_E) / ω′(k_E)."""
    k = k_of_E(model, E)
    return math.sqrt(2.0 * math.pi) * math.sqrt(model.gamma / (2.0 * math.pi * E)) / (k / E)


def residue_weight_closed(model: WaveguideModel, E: float) -> float:
    """Klein–Gordon simplification Z = γ/k."""
    return model.gamma / k_of_E(model, E)


def field_weight_closed(model: WaveguideModel, E: float) -> float:
    """Klein–Gordon simplification W = √(γE)/k."""
    return math.sqrt(model.gamma * E) / k_of_E(model, E)


def beta0_closed_form(model: WaveguideModel, E: float) -> float:
    """Exact Re Σ_jj(E + i0) = γ·arccosh(E/m) / (π k_E) for Klein–Gordon."""
    return model.gamma * math.acosh(E / model.m) / (math.pi * k_of_E(model, E))


def omega_on_line(model: WaveguideModel, k: float) -> complex:
    """ω(k + im) for real k ≠ 0, scalar fast path used inside quadrature loops."""
    return cmath.sqrt(k * (k + 2j * model.m))
