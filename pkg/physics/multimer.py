"""Multimerised BICs: r copies of an h-emitter wave separated by dark emitters.

Block rules enforced here:
- n = r·h + r − 1, every (h+1)-th slot is zero
- antisymmetric base repeats as (a, 0, a, 0, …), symmetric base alternates as
  (a, 0, −a, 0, a, …), so a⁽ˢ⁾_h = −a⁽ˢ⁺¹⁾_1 at every junction
- the assembled vector is the Δ_n eigenvector with index j_n = r·j_h
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from data.presets import FIGURE_MULTIMERS
from physics.errors import DomainError
from physics.waves import (
    ExcitationWave,
    Parity,
    closed_form_wave,
    delta_matrix,
    delta_spectrum,
    sign_convention,
    u_vector,
    vector_parity,
)

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class MultimerPlan:
    n: int
    h: int
    r: int
    j_h: int
    base: np.ndarray
    base_parity: Parity
    chi: float
    assembled: np.ndarray

    @property
    def target_j(self) -> int:
        return self.r * self.j_h

    @property
    def degenerate_block(self) -> bool:
        return self.h == 1


@dataclass(frozen=True)
class MultimerReport:
    eigen_residual: float
    u_overlap: float
    matched_j: int
    match_overlap: float
    base_u_overlap: float
    junction_ok: bool
    degenerate_block: bool

    @property
    def is_bic(self) -> bool:
        return self.eigen_residual <= RESIDUAL_TOL and abs(self.u_overlap) <= RESIDUAL_TOL


def admissible_decompositions(n: int) -> list[tuple[int, int]]:
    """All (h, r) with h ≥ 1, r ≥ 2 and n = r·h + r − 1, ordered by r."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    return [((n + 1) // r - 1, r) for r in range(2, n + 2) if (n + 1) % r == 0 and (n + 1) // r >= 2]


def build(base: ExcitationWave | np.ndarray, r: int, alternate: bool | None = None) -> np.ndarray:
    """Chain r copies of *base* with one dark emitter between neighbours.

    *alternate* forces the block sign pattern; by default it follows the
    base parity.
    """
    if r < 2:
        raise DomainError(f"need at least two blocks, got r={r}")
    amps = np.asarray(base.amplitudes if isinstance(base, ExcitationWave) else base)
    if alternate is None:
        alternate = vector_parity(amps) is Parity.SYMMETRIC
    h = amps.size
    out = np.zeros(r * h + r - 1, dtype=amps.dtype)
    for s in range(r):
        sign = -1.0 if (alternate and s % 2 == 1) else 1.0
        start = s * (h + 1)
        out[start : start + h] = sign * amps
    return sign_convention(out / np.linalg.norm(out))


def plan(h: int, r: int, j_h: int) -> MultimerPlan:
    chi, base = closed_form_wave(h, j_h)
    return MultimerPlan(
        n=r * h + r - 1,
        h=h,
        r=r,
        j_h=j_h,
        base=base,
        base_parity=vector_parity(base),
        chi=chi,
        assembled=build(base, r),
    )


def verify(p: MultimerPlan, nu: int, assembled: np.ndarray | None = None) -> MultimerReport:
    """Check Δ_n A = χ A and U_ν·A = 0; failures are reported, not raised."""
    vec = p.assembled if assembled is None else np.asarray(assembled)
    residual = float(np.max(np.abs(delta_matrix(p.n) @ vec - p.chi * vec)))
    overlaps = np.array([abs(a @ vec) for _, a in delta_spectrum(p.n)])
    best = int(np.argmax(overlaps))
    junction_ok = all(
        abs(vec[s * (p.h + 1) + p.h - 1] + vec[(s + 1) * (p.h + 1)]) <= RESIDUAL_TOL
        for s in range(p.r - 1)
    )
    return MultimerReport(
        eigen_residual=residual,
        u_overlap=float(u_vector(nu, p.n) @ vec),
        matched_j=best + 1,
        match_overlap=float(overlaps[best]),
        base_u_overlap=float(u_vector(nu, p.h) @ p.base),
        junction_ok=bool(junction_ok),
        degenerate_block=p.degenerate_block,
    )


def resolve_figure_index(r: int, j_figure: int) -> int:
    """Base index for a quoted index: j_n when r divides it, j_h otherwise."""
    return j_figure // r if j_figure % r == 0 else j_figure


def figure_plans() -> list[MultimerPlan]:
    return [
        plan(entry["h"], entry["r"], resolve_figure_index(entry["r"], entry["j"]))
        for entry in FIGURE_MULTIMERS
    ]


def multimer_rows(n: int, nu: int) -> list[dict]:
    """One row per admissible (h, r) and base index j_h."""
    rows = []
    for h, r in admissible_decompositions(n):
        for j_h in range(1, h + 1):
            p = plan(h, r, j_h)
            rep = verify(p, nu)
            rows.append({
                "h": h,
                "r": r,
                "j_h": j_h,
                "j_n": p.target_j,
                "parity": p.base_parity.value,
                "chi": p.chi,
                "eig_residual": rep.eigen_residual,
                "u_overlap": rep.u_overlap,
                "degenerate_block": rep.degenerate_block,
            })
    return rows
