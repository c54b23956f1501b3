"""Brute-force check: diagonalise the single-excitation Hamiltonian on a k-grid.

Discretisation rules enforced here:
- cell-centred momenta k_i = −K + (i + ½)Δk, mirror symmetric about k = 0
- emitter block ε·I, field block diag ω(k_i)
- coupling ⟨k_i|H|e_j⟩ = F(k_i) e^{−i(j−1)k_i d} √Δk
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from physics.errors import DomainError, EigensolverError, NotFoundError, SizeError
from physics.model import (
    EmitterArray,
    WaveguideModel,
    form_factor,
    k_of_E,
    omega,
    residue_weight_Z,
    resonant_energy,
)
from physics.selfenergy import DEFAULT_QUAD
from physics.waves import Parity, closed_form_parity, closed_form_wave, epsilon_for_bic, sign_convention
from services.quadrature import QuadratureConfig

log = logging.getLogger(__name__)

MAX_SIZE = 20000
MIN_MODES = 500
PARITY_FILTER_TOL = 1e-3


@dataclass(frozen=True)
class DiscretizedHamiltonian:
    n: int
    d: float
    m: float
    epsilon: float
    k_grid: np.ndarray
    dk: float
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        try:
            return linalg.eigh(self.matrix)
        except linalg.LinAlgError as exc:
            raise EigensolverError(f"Hermitian eigensolve failed: {exc}") from exc


@dataclass(frozen=True)
class BicCandidate:
    energy: float
    amplitudes: np.ndarray
    emitter_weight: float
    field_weight: float
    vector: np.ndarray


def default_cutoff(model: WaveguideModel, E: float) -> float:
    return 10.0 * max(k_of_E(model, E), model.m)


def build_hamiltonian(
    model: WaveguideModel, array: EmitterArray, K: float, N_k: int
) -> DiscretizedHamiltonian:
    """Dense Hermitian matrix of size (n + N_k)."""
    if not (K > 0):
        raise DomainError(f"momentum cutoff must be positive, got {K}")
    if N_k < MIN_MODES:
        raise DomainError(f"need at least {MIN_MODES} field modes, got {N_k}")
    size = array.n + N_k
    if size > MAX_SIZE:
        raise SizeError(f"matrix of size {size} exceeds the limit {MAX_SIZE}")

    dk = 2.0 * K / N_k
    k = -K + (np.arange(N_k) + 0.5) * dk
    coupling = (
        form_factor(model, k)[:, None]
        * np.exp(-1j * np.outer(k, array.positions))
        * math.sqrt(dk)
    )
    H = np.zeros((size, size), dtype=complex)
    H[: array.n, : array.n] = array.epsilon * np.eye(array.n)
    H[array.n :, array.n :] = np.diag(omega(model, k))
    H[array.n :, : array.n] = coupling
    H[: array.n, array.n :] = coupling.conj().T
    log.debug("discretised Hamiltonian: n=%d, N_k=%d, K=%g, dk=%g", array.n, N_k, K, dk)
    return DiscretizedHamiltonian(
        n=array.n, d=array.d, m=model.m, epsilon=array.epsilon, k_grid=k, dk=dk, matrix=H
    )


def _has_parity(amps: np.ndarray, parity: Parity) -> bool:
    norm = np.linalg.norm(amps)
    if norm == 0:
        return False
    sign = 1.0 if parity is Parity.SYMMETRIC else -1.0
    return np.linalg.norm(amps - sign * amps[::-1]) <= PARITY_FILTER_TOL * norm


def find_bic_candidate(
    ham: DiscretizedHamiltonian,
    E_target: float,
    window: tuple[float, float],
    parity: Parity | None = None,
    target: np.ndarray | None = None,
) -> BicCandidate:
    """Eigenvector in *window* with the largest emitter weight.

    With *parity* set, only eigenvectors whose emitter part has that mirror
    parity compete. With *target* set, the weight is the emitter part projected
    on *target*, so one wave is picked out of a sector holding several.
    """
    lo, hi = window
    if lo <= ham.m or hi <= lo:
        raise DomainError(f"window {window} must lie above the threshold {ham.m}")
    vals, vecs = ham.eigensystem
    inside = np.flatnonzero((vals >= lo) & (vals <= hi))
    if inside.size == 0:
        raise NotFoundError(f"no eigenvalue in window {window}")

    unit = None if target is None else np.asarray(target) / np.linalg.norm(target)
    best: tuple[float, float, int] | None = None
    for idx in inside:
        amps = vecs[: ham.n, idx]
        if parity is not None and not _has_parity(amps, parity):
            continue
        if target is None:
            score = float(np.sum(np.abs(amps) ** 2))
        else:
            score = float(abs(np.vdot(unit, amps)) ** 2)
        key = (score, -abs(vals[idx] - E_target), int(idx))
        if best is None or key[:2] > best[:2]:
            best = key
    if best is None:
        raise NotFoundError(f"no {parity.value.lower()} eigenvector in window {window}")

    _, _, idx = best
    vec = vecs[:, idx]
    weight = float(np.sum(np.abs(vec[: ham.n]) ** 2))
    return BicCandidate(
        energy=float(vals[idx]),
        amplitudes=sign_convention(vec[: ham.n]),
        emitter_weight=weight,
        field_weight=1.0 - weight,
        vector=vec,
    )


def field_profile(ham: DiscretizedHamiltonian, vector: np.ndarray, x: np.ndarray) -> np.ndarray:
    """ξ(x) = √(Δk/2π) Σ_i c_i e^{i k_i x} from the field components c_i."""
    field = np.asarray(vector)[ham.n :]
    phases = np.exp(1j * np.outer(np.asarray(x, dtype=float), ham.k_grid))
    return math.sqrt(ham.dk / (2.0 * math.pi)) * (phases @ field)


def run_oracle(
    model: WaveguideModel,
    d: float,
    n: int,
    nu: int,
    j: int,
    n_k: int = 2000,
    k_cut: float | None = None,
    detune: float = 0.0,
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> dict:
    """Tune ε for wave (ν, j), diagonalise, and compare with the analytic profile.

    *detune* shifts ε by that many multiples of Z(E_ν).
    """
    E = resonant_energy(model, d, nu)
    eps = epsilon_for_bic(model, d, n, nu, j, quad) + detune * residue_weight_Z(model, E)
    array = EmitterArray(n=n, d=d, epsilon=eps)
    K = k_cut if k_cut is not None else default_cutoff(model, E)
    ham = build_hamiltonian(model, array, K, n_k)
    half = 0.5 * (E - model.m)
    _, analytic = closed_form_wave(n, j)
    cand = find_bic_candidate(
        ham, E, (E - half, E + half), parity=closed_form_parity(j), target=analytic
    )
    amps = cand.amplitudes / np.linalg.norm(cand.amplitudes)
    return {
        "n": n,
        "nu": nu,
        "j": j,
        "N_k": n_k,
        "candidate_E": cand.energy,
        "emitter_weight": cand.emitter_weight,
        "overlap_with_analytic": float(abs(analytic @ amps)),
    }
