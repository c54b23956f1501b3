"""Self-energy Σ(E + i0), contour corrections β_j(E) and the inverse propagator.

Two independent evaluation paths:
- contour: Σ_jℓ = −iZ e^{i|j−ℓ|k_E d} + β_{|j−ℓ|}, with β_j integrated along
  the shifted line Im κ = m
- principal value: Sokhotski–Plemelj on the real axis with explicit pole
  subtraction at k = k_E (oracle for the contour path)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from physics.errors import DomainError
from physics.model import (
    EmitterArray,
    WaveguideModel,
    coupling_density_cont,
    k_of_E,
    omega,
    omega_on_line,
    residue_weight_Z,
)
from services.quadrature import (
    QuadratureConfig,
    integrate_segment,
    oscillatory_segment,
    shifted_line_integral,
)

log = logging.getLogger(__name__)

SUPPRESSION_FLOOR = 1e-20
DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class BetaResult:
    j: int
    value: float
    error: float
    imag_residual: float
    tail_bound: float


@dataclass(frozen=True)
class PropagatorBundle:
    E: float
    n: int
    d: float
    epsilon: float
    k: float
    Z: float
    beta: np.ndarray
    betas: tuple[BetaResult, ...]
    sigma: np.ndarray
    g_inv: np.ndarray
    quad_error: float


def default_k_max(model: WaveguideModel, d: float, E: float) -> float:
    return 40.0 * max(E, model.m, 1.0 / d)


def _branch_window(model: WaveguideModel, d: float) -> float:
    return max(1.0 / d, model.m)


def _integral_scale(model: WaveguideModel, E: float) -> float:
    return model.gamma / (2.0 * math.pi * max(E, model.m))


# ── Contour path ─────────────────────────────────────────────────────────────

@lru_cache(maxsize=4096)
def _beta_cached(m: float, gamma: float, d: float, E: float, j: int, quad: QuadratureConfig) -> BetaResult:
    model = WaveguideModel(m=m, gamma=gamma)
    k_max = quad.resolve_k_max(default_k_max(model, d, E))
    tail_bound = gamma / (math.pi * k_max)
    suppression = math.exp(-j * m * d)

    if j > 0 and suppression < SUPPRESSION_FLOOR:
        beta0 = _beta_cached(m, gamma, d, E, 0, quad)
        return BetaResult(j, 0.0, suppression * abs(beta0.value), 0.0, suppression * tail_bound)

    def kernel(k: float) -> complex:
        return coupling_density_cont(model, complex(k, m)) / (E - omega_on_line(model, k))

    res = shifted_line_integral(
        kernel, j * d, _branch_window(model, d), k_max, quad, scale=_integral_scale(model, E)
    )
    log.debug("beta_%d(E=%.6g, d=%g) raw=%.12g err=%.2e", j, E, d, res.value, res.error)
    return BetaResult(
        j=j,
        value=suppression * res.value,
        error=suppression * res.error,
        imag_residual=suppression * res.imag_residual,
        tail_bound=suppression * tail_bound,
    )


def beta_result(
    model: WaveguideModel, d: float, E: float, j: int, quad: QuadratureConfig = DEFAULT_QUAD
) -> BetaResult:
    """β_j(E) with its error budget. Memoised per (m, γ, d, E, j, quad)."""
    if j < 0:
        raise DomainError(f"β index must be non-negative, got {j}")
    k_of_E(model, E)
    return _beta_cached(model.m, model.gamma, float(d), float(E), int(j), quad)


def beta_j(
    model: WaveguideModel, d: float, E: float, j: int, quad: QuadratureConfig = DEFAULT_QUAD
) -> float:
    """β_j(E) = e^{−jmd} ∫ f(k+im) e^{ijkd} / (E − ω(k+im)) dk, real."""
    return beta_result(model, d, E, j, quad).value


def _toeplitz_symmetric(first: np.ndarray) -> np.ndarray:
    return linalg.toeplitz(first, first)


def sigma_contour(
    model: WaveguideModel, array: EmitterArray, E: float, quad: QuadratureConfig = DEFAULT_QUAD
) -> np.ndarray:
    """Σ(E + i0) assembled from Z(E), k(E) and the β vector."""
    k = k_of_E(model, E)
    Z = residue_weight_Z(model, E)
    lags = np.arange(array.n)
    beta = np.array([beta_j(model, array.d, E, int(j), quad) for j in lags])
    first = -1j * Z * np.exp(1j * lags * k * array.d) + beta
    return _toeplitz_symmetric(first)


# ── Principal-value path ─────────────────────────────────────────────────────

def _pv_lag(model: WaveguideModel, d: float, E: float, lag: int, quad: QuadratureConfig) -> float:
    """2·PV∫₀^∞ f(k) cos(lag·k·d) / (E − ω(k)) dk."""
    gamma = model.gamma
    k_E = k_of_E(model, E)
    length = lag * d
    scale = _integral_scale(model, E)

    def psi(k: float) -> float:
        # f/(E − ω) written as φ(k)/(k − k_E) without cancellation in E − ω
        w = omega(model, k)
        return -gamma / (2.0 * math.pi * w) * (E + w) / ((k + k_E) * (k - k_E))

    def phi(k: float) -> float:
        w = omega(model, k)
        return -gamma / (2.0 * math.pi * w) * (E + w) / (k + k_E) * math.cos(length * k)

    c = phi(k_E)

    def remainder(k: float) -> float:
        return (phi(k) - c) / (k - k_E)

    upper = 2.0 * k_E
    k_max = max(quad.resolve_k_max(default_k_max(model, d, E)), 2.0 * upper)
    left, _ = integrate_segment(remainder, 0.0, k_E, quad, scale)
    right, _ = integrate_segment(remainder, k_E, upper, quad, scale)
    # PV of c/(k − k_E) over the symmetric window [0, 2k_E]
    window = c * math.log((upper - k_E) / k_E)
    mid, _ = oscillatory_segment(psi, None, upper, k_max, length, quad, scale)
    tail, _ = oscillatory_segment(psi, None, k_max, np.inf, length, quad, scale)
    return 2.0 * (left + right + window + mid + tail)


def sigma_pv(
    model: WaveguideModel, array: EmitterArray, E: float, quad: QuadratureConfig = DEFAULT_QUAD
) -> np.ndarray:
    """Σ(E + i0) via PV integral minus iπ × (pole contributions at ±k_E)."""
    k = k_of_E(model, E)
    Z = residue_weight_Z(model, E)
    lags = np.arange(array.n)
    pv = np.array([_pv_lag(model, array.d, E, int(lag), quad) for lag in lags])
    first = pv - 1j * Z * np.cos(lags * k * array.d)
    return _toeplitz_symmetric(first)


# ── Propagator ───────────────────────────────────────────────────────────────

def propagator_inv(
    model: WaveguideModel, array: EmitterArray, E: float, quad: QuadratureConfig = DEFAULT_QUAD
) -> PropagatorBundle:
    """G⁻¹(E) = (ε − E)·I + Σ(E + i0), bundled with its ingredients."""
    k = k_of_E(model, E)
    Z = residue_weight_Z(model, E)
    betas = tuple(beta_result(model, array.d, E, j, quad) for j in range(array.n))
    beta = np.array([b.value for b in betas])
    sigma = sigma_contour(model, array, E, quad)
    g_inv = (array.epsilon - E) * np.eye(array.n) + sigma
    sigma.setflags(write=False)
    g_inv.setflags(write=False)
    beta.setflags(write=False)
    return PropagatorBundle(
        E=E,
        n=array.n,
        d=array.d,
        epsilon=array.epsilon,
        k=k,
        Z=Z,
        beta=beta,
        betas=betas,
        sigma=sigma,
        g_inv=g_inv,
        quad_error=float(sum(b.error for b in betas)),
    )


def det_residual(bundle: PropagatorBundle) -> complex:
    """det G⁻¹(E); vanishes at bound-state energies."""
    return complex(linalg.det(bundle.g_inv))
