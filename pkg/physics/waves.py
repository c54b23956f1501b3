"""Excitation waves of the emitter chain.

Rules enforced here:
- Δ_n eigenpairs are taken in closed form, χ⁽ʲ⁾ = 2cos(jπ/(n+1)),
  a⁽ʲ⁾_ℓ ∝ sin(jℓπ/(n+1)), j ordered 1..n
- A(νπ, b) commutes with the exchange matrix, so it is diagonalised block by
  block in the mirror-symmetric and mirror-antisymmetric subspaces
- A wave is Exact iff u_ν·a⁽ʲ⁾ = 0; the single eigenvalue with Im > n/2 is
  Superradiant; everything else is Deformed
- Sign convention: first component with modulus > 1e-10 is real positive
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from physics.errors import ClassificationError, DomainError, EigensolverError, ParityError
from physics.model import WaveguideModel, residue_weight_Z, resonant_energy
from physics.selfenergy import DEFAULT_QUAD, beta_j
from services.quadrature import QuadratureConfig

log = logging.getLogger(__name__)

MAX_CHAIN = 500
SIGN_TOL = 1e-10
PARITY_TOL = 1e-8
EXACT_AGREEMENT = 1e-8
B1_LIMIT = 0.1


class WaveKind(str, Enum):
    EXACT = "Exact"
    DEFORMED = "Deformed"
    SUPERRADIANT = "Superradiant"


class Parity(str, Enum):
    SYMMETRIC = "Symmetric"
    ANTISYMMETRIC = "Antisymmetric"


@dataclass(frozen=True)
class ExcitationWave:
    j: int
    nu: int
    amplitudes: np.ndarray
    chi: complex
    eigenvalue: complex
    kind: WaveKind
    parity: Parity
    resonance_overlap: complex
    deformation: np.ndarray | None = None
    approximate: bool = False

    @property
    def n(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class WaveCatalog:
    n: int
    nu: int
    b1: float
    waves: tuple[ExcitationWave, ...]
    epsilon_values: tuple[float, ...] = field(default_factory=tuple)

    def wave(self, j: int) -> ExcitationWave:
        for w in self.waves:
            if w.j == j:
                return w
        raise KeyError(j)

    def counts(self) -> dict[WaveKind, int]:
        out = {kind: 0 for kind in WaveKind}
        for w in self.waves:
            out[w.kind] += 1
        return out


# ── Adjacency matrix ─────────────────────────────────────────────────────────

def delta_matrix(n: int) -> np.ndarray:
    """Δ_n: ones on the first super- and sub-diagonal."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return np.eye(n, k=1) + np.eye(n, k=-1)


def exchange_matrix(n: int) -> np.ndarray:
    """J_n, the anti-diagonal identity."""
    return np.fliplr(np.eye(n))


def sign_convention(vec: np.ndarray) -> np.ndarray:
    """Rotate by a global phase so the first non-negligible entry is real positive."""
    vec = np.asarray(vec)
    idx = np.flatnonzero(np.abs(vec) > SIGN_TOL)
    if idx.size == 0:
        return vec
    lead = vec[idx[0]]
    return vec * (np.conj(lead) / abs(lead))


def closed_form_wave(n: int, j: int) -> tuple[float, np.ndarray]:
    """(χ⁽ʲ⁾, a⁽ʲ⁾) for Δ_n, unit norm."""
    if not 1 <= j <= n:
        raise DomainError(f"wave index j must lie in 1..{n}, got {j}")
    ell = np.arange(1, n + 1)
    vec = np.sin(j * ell * np.pi / (n + 1))
    vec = vec / np.linalg.norm(vec)
    return 2.0 * math.cos(j * math.pi / (n + 1)), sign_convention(vec)


def delta_spectrum(n: int) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of Δ_n for j = 1..n (decreasing χ)."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return [closed_form_wave(n, j) for j in range(1, n + 1)]


def u_vector(nu: int, n: int) -> np.ndarray:
    """u_ν with components (−1)^{ν(ℓ−1)}."""
    return np.where((nu * np.arange(n)) % 2 == 0, 1.0, -1.0)


def _phase_table(theta: float, lags: np.ndarray) -> np.ndarray:
    turns = theta / math.pi
    nearest = round(turns)
    if abs(turns - nearest) < 1e-12:
        # exact ±1 at resonance
        return np.where((nearest * lags) % 2 == 0, 1.0, -1.0).astype(complex)
    return np.exp(1j * lags * theta)


def a_matrix(theta: float, b: np.ndarray | list[float], n: int) -> np.ndarray:
    """A_jℓ = i e^{i|j−ℓ|θ} − b_{|j−ℓ|} off the diagonal, i on it."""
    coeffs = np.zeros(n)
    b = np.asarray(b, dtype=float)
    if b.size > n - 1:
        raise DomainError(f"b holds {b.size} coefficients, at most {n - 1} apply for n={n}")
    coeffs[1 : 1 + b.size] = b
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return 1j * _phase_table(theta, lags) - coeffs[lags]


# ── Parity ───────────────────────────────────────────────────────────────────

def vector_parity(vec: np.ndarray, tol: float = PARITY_TOL) -> Parity:
    vec = np.asarray(vec)
    scale = max(np.linalg.norm(vec), 1e-300)
    mirrored = vec[::-1]
    if np.linalg.norm(vec - mirrored) <= tol * scale:
        return Parity.SYMMETRIC
    if np.linalg.norm(vec + mirrored) <= tol * scale:
        return Parity.ANTISYMMETRIC
    raise ParityError("vector has no definite mirror parity (degenerate eigenvalue?)")


def parity_of(wave: ExcitationWave | np.ndarray) -> Parity:
    amps = wave.amplitudes if isinstance(wave, ExcitationWave) else wave
    return vector_parity(amps)


def closed_form_parity(j: int) -> Parity:
    return Parity.SYMMETRIC if j % 2 == 1 else Parity.ANTISYMMETRIC


def _parity_basis(n: int, parity: Parity) -> np.ndarray:
    """Orthonormal basis (columns) of the mirror-symmetric or antisymmetric subspace."""
    half = n // 2
    cols = []
    sign = 1.0 if parity is Parity.SYMMETRIC else -1.0
    for ell in range(half):
        col = np.zeros(n)
        col[ell] = 1.0 / math.sqrt(2.0)
        col[n - 1 - ell] = sign / math.sqrt(2.0)
        cols.append(col)
    if parity is Parity.SYMMETRIC and n % 2 == 1:
        col = np.zeros(n)
        col[half] = 1.0
        cols.append(col)
    return np.column_stack(cols) if cols else np.zeros((n, 0))


def u_parity(nu: int, n: int) -> Parity:
    return Parity.SYMMETRIC if (nu * (n - 1)) % 2 == 0 else Parity.ANTISYMMETRIC


# ── Classification ───────────────────────────────────────────────────────────

def expected_kind(n: int, nu: int, j: int) -> WaveKind:
    """Closed-form classification rule of the exact, deformed and superradiant waves."""
    if not 1 <= j <= n:
        raise DomainError(f"wave index j must lie in 1..{n}, got {j}")
    if n % 2 == 0:
        exact = (j + nu) % 2 == 0
    else:
        exact = j % 2 == 0
    if exact:
        return WaveKind.EXACT
    superradiant_j = 1 if nu % 2 == 0 else n
    return WaveKind.SUPERRADIANT if j == superradiant_j else WaveKind.DEFORMED


def _greedy_match(overlaps: np.ndarray, labels: list[int]) -> dict[int, int]:
    """Bijective row → label assignment by descending overlap, ties to lower label."""
    order = sorted(
        (-overlaps[r, c], labels[c], r, c)
        for r in range(overlaps.shape[0])
        for c in range(overlaps.shape[1])
    )
    rows_done: set[int] = set()
    cols_done: set[int] = set()
    out: dict[int, int] = {}
    for _, label, r, c in order:
        if r in rows_done or c in cols_done:
            continue
        out[r] = label
        rows_done.add(r)
        cols_done.add(c)
    return out


def _sector_eig(matrix: np.ndarray, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    block = basis.T @ matrix @ basis
    try:
        vals, vecs = linalg.eig(block)
    except linalg.LinAlgError as exc:
        raise EigensolverError(f"eigendecomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise EigensolverError("eigendecomposition returned non-finite values")
    full = basis @ vecs
    return vals, full / np.linalg.norm(full, axis=0)


def classify_waves(n: int, nu: int, b1: float) -> WaveCatalog:
    """Classify the eigenvectors of A(νπ, (b1, 0, …)) against the waves a⁽ʲ⁾."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if n > MAX_CHAIN:
        raise EigensolverError(f"dense classification refused above n={MAX_CHAIN}")
    if b1 == 0 or abs(b1) > B1_LIMIT:
        raise DomainError(f"b1={b1} outside the nearest-neighbour regime 0 < |b1| ≤ {B1_LIMIT}")

    A = a_matrix(nu * math.pi, [b1][: n - 1], n)
    u = u_vector(nu, n)
    spectrum = {j: closed_form_wave(n, j) for j in range(1, n + 1)}
    waves: list[ExcitationWave] = []

    for parity in Parity:
        basis = _parity_basis(n, parity)
        if basis.shape[1] == 0:
            continue
        vals, vecs = _sector_eig(A, basis)
        labels = [j for j in spectrum if closed_form_parity(j) is parity]
        refs = np.column_stack([spectrum[j][1] for j in labels])
        overlaps = np.abs(refs.T @ vecs).T
        for row, j in _greedy_match(overlaps, labels).items():
            waves.append(_make_wave(n, nu, j, spectrum[j], vals[row], vecs[:, row], u, parity))

    waves.sort(key=lambda w: w.j)
    catalog = WaveCatalog(n=n, nu=nu, b1=b1, waves=tuple(waves))
    _check_catalog(catalog)
    return catalog


def _make_wave(
    n: int,
    nu: int,
    j: int,
    closed: tuple[float, np.ndarray],
    eigenvalue: complex,
    vec: np.ndarray,
    u: np.ndarray,
    parity: Parity,
) -> ExcitationWave:
    chi, ref = closed
    numeric = sign_convention(vec)
    if eigenvalue.imag > n / 2:
        return ExcitationWave(
            j=j, nu=nu, amplitudes=numeric, chi=complex(eigenvalue), eigenvalue=complex(eigenvalue),
            kind=WaveKind.SUPERRADIANT, parity=parity, resonance_overlap=complex(u @ numeric),
        )
    if abs(u @ ref) <= SIGN_TOL:
        if np.linalg.norm(numeric - ref) > EXACT_AGREEMENT:
            raise ClassificationError(f"exact wave j={j} disagrees with its closed form")
        return ExcitationWave(
            j=j, nu=nu, amplitudes=ref, chi=complex(chi), eigenvalue=complex(eigenvalue),
            kind=WaveKind.EXACT, parity=parity, resonance_overlap=complex(u @ ref),
        )
    phase = ref @ numeric
    aligned = numeric * (np.conj(phase) / abs(phase))
    return ExcitationWave(
        j=j, nu=nu, amplitudes=numeric, chi=complex(eigenvalue), eigenvalue=complex(eigenvalue),
        kind=WaveKind.DEFORMED, parity=parity, resonance_overlap=complex(u @ numeric),
        deformation=aligned - ref, approximate=True,
    )


def _check_catalog(catalog: WaveCatalog) -> None:
    n, nu = catalog.n, catalog.nu
    if len(catalog.waves) != n:
        raise ClassificationError(f"matched {len(catalog.waves)} waves for n={n}")
    counts = catalog.counts()
    if counts[WaveKind.SUPERRADIANT] != 1:
        raise ClassificationError(f"found {counts[WaveKind.SUPERRADIANT]} superradiant modes")
    if counts[WaveKind.EXACT] != n // 2 or counts[WaveKind.DEFORMED] != (n + 1) // 2 - 1:
        raise ClassificationError(f"unexpected counts {counts} for n={n}")
    for w in catalog.waves:
        if w.kind is not expected_kind(n, nu, w.j):
            raise ClassificationError(f"wave j={w.j} classified {w.kind.value}")


# ── Limits and profiles ──────────────────────────────────────────────────────

def resonance_profile(n: int, nu: int) -> np.ndarray:
    """|u_ν·a⁽ʲ⁾| for j = 1..n, normalised to its maximum."""
    u = u_vector(nu, n)
    overlaps = np.array([abs(u @ a) for _, a in delta_spectrum(n)])
    overlaps[overlaps < SIGN_TOL] = 0.0
    return overlaps / overlaps.max()


def compressed_limit(n: int, nu: int) -> dict[int, np.ndarray]:
    """b1 → 0 limit of the deformed waves.

    Eigenvectors of Δ_n compressed to the part of the u_ν parity sector that is
    orthogonal to u_ν, keyed by the deformed index they match.
    """
    parity = u_parity(nu, n)
    basis = _parity_basis(n, parity)
    u_sector = basis.T @ u_vector(nu, n)
    complement = linalg.null_space(u_sector[None, :])
    if complement.shape[1] == 0:
        return {}
    block = complement.T @ basis.T @ delta_matrix(n) @ basis @ complement
    _, vecs = linalg.eigh(block)
    vecs = basis @ complement @ vecs
    labels = [j for j in range(1, n + 1) if expected_kind(n, nu, j) is WaveKind.DEFORMED]
    refs = np.column_stack([closed_form_wave(n, j)[1] for j in labels])
    match = _greedy_match(np.abs(refs.T @ vecs).T, labels)
    return {j: sign_convention(vecs[:, row]) for row, j in match.items()}


# ── Selection rule ───────────────────────────────────────────────────────────

def b1_at_resonance(
    model: WaveguideModel, d: float, nu: int, quad: QuadratureConfig = DEFAULT_QUAD
) -> float:
    """b₁ = β₁(E_ν) / Z(E_ν)."""
    E = resonant_energy(model, d, nu)
    return beta_j(model, d, E, 1, quad) / residue_weight_Z(model, E)


def epsilon_for_bic(
    model: WaveguideModel,
    d: float,
    n: int,
    nu: int,
    j: int,
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """ε = E_ν − β₀(E_ν) − β₁(E_ν)·χ⁽ʲ⁾."""
    kind = expected_kind(n, nu, j)
    if kind is WaveKind.SUPERRADIANT:
        raise ClassificationError(
            f"wave j={j} is superradiant for n={n}, ν={nu}; it radiates and is not a BIC"
        )
    if kind is WaveKind.DEFORMED:
        log.warning("wave j=%d (n=%d, ν=%d) is deformed; ε is approximate", j, n, nu)
    E = resonant_energy(model, d, nu)
    chi = 2.0 * math.cos(j * math.pi / (n + 1))
    return E - beta_j(model, d, E, 0, quad) - beta_j(model, d, E, 1, quad) * chi


def build_catalog(
    model: WaveguideModel,
    d: float,
    n: int,
    nu: int,
    quad: QuadratureConfig = DEFAULT_QUAD,
    b1: float | None = None,
) -> WaveCatalog:
    """Classify with the physical b₁ (or an override) and attach the required ε."""
    if nu < 1:
        raise DomainError(f"resonance index must be at least 1, got {nu}")
    if b1 is None:
        b1 = b1_at_resonance(model, d, nu, quad)
    catalog = classify_waves(n, nu, b1)
    E = resonant_energy(model, d, nu)
    beta0 = beta_j(model, d, E, 0, quad)
    beta1 = beta_j(model, d, E, 1, quad)
    eps = tuple(
        math.nan if w.kind is WaveKind.SUPERRADIANT
        else E - beta0 - beta1 * 2.0 * math.cos(w.j * math.pi / (n + 1))
        for w in catalog.waves
    )
    return WaveCatalog(n=n, nu=nu, b1=b1, waves=catalog.waves, epsilon_values=eps)


def deformation_rows(catalog: WaveCatalog) -> list[dict]:
    """Per deformed wave: how far ã⁽ʲ⁾ sits from a⁽ʲ⁾ and from the b₁ → 0 limit."""
    limit = compressed_limit(catalog.n, catalog.nu)
    rows = []
    for w in catalog.waves:
        if w.kind is not WaveKind.DEFORMED:
            continue
        chi, ref = closed_form_wave(catalog.n, w.j)
        amps = np.asarray(w.amplitudes)
        rows.append({
            "j": w.j,
            "chi_closed": chi,
            "chi_re_over_b1": float(np.real(w.eigenvalue)) / catalog.b1,
            "chi_im": float(np.imag(w.eigenvalue)),
            "overlap_with_closed": float(abs(ref @ amps)),
            "overlap_with_limit": float(abs(np.conj(limit[w.j]) @ amps)) if w.j in limit else math.nan,
            "deformation_norm": float(np.linalg.norm(w.deformation)),
            "u_overlap": abs(w.resonance_overlap),
        })
    return rows
