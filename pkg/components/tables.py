"""CSV renderers. Every file starts with a provenance comment line.

Output rules enforced here:
- one header row, no index column
- floats written with "%.12g" so identical runs give identical bytes
- complex amplitudes are written as real parts plus the norm of the
  imaginary parts
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from physics import __version__
from physics.bic import BicState, derivative_jumps
from physics.selfenergy import PropagatorBundle
from physics.waves import WaveCatalog

FLOAT_FORMAT = "%.12g"


def write_csv(df: pd.DataFrame, path: Path, digest: str) -> Path:
    """Write *df* to *path* below a ``# bicwave <version> <hash>`` line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# bicwave {__version__} {digest}\n")
        df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def catalog_table(catalog: WaveCatalog) -> pd.DataFrame:
    eps = catalog.epsilon_values or tuple(np.nan for _ in catalog.waves)
    rows = []
    for wave, epsilon in zip(catalog.waves, eps):
        amps = np.asarray(wave.amplitudes)
        row = {
            "j": wave.j,
            "kind": wave.kind.value,
            "chi_re": float(np.real(wave.chi)),
            "chi_im": float(np.imag(wave.chi)),
            "parity": wave.parity.value,
            "overlap_with_u": abs(wave.resonance_overlap),
            "epsilon_required": epsilon,
            "amp_imag_norm": float(np.linalg.norm(np.imag(amps))),
        }
        row.update({f"a_{ell}": float(v) for ell, v in enumerate(np.real(amps), start=1)})
        rows.append(row)
    return pd.DataFrame(rows)


def selfenergy_table(bundle: PropagatorBundle, m: float) -> pd.DataFrame:
    """β_j next to the e^{−jmd}·|β₀| envelope."""
    lags = np.arange(bundle.n)
    return pd.DataFrame({
        "j": lags,
        "beta_j": bundle.beta,
        "beta_bound": np.exp(-lags * m * bundle.d) * abs(bundle.beta[0]),
        "quad_err": [b.error for b in bundle.betas],
    })


def state_tables(state: BicState) -> tuple[pd.DataFrame, pd.DataFrame]:
    """(field samples, per-emitter amplitudes and jumps)."""
    field = pd.DataFrame({
        "x": state.x,
        "xi_full": np.real(state.xi),
        "xi_pole_only": np.real(state.xi_pole),
    })
    amps = pd.DataFrame({
        "ell": np.arange(1, state.amplitudes.size + 1),
        "a_ell": np.real(state.amplitudes),
        "jump_ell": np.real(state.jumps),
        "jump_pole_ell": np.real(derivative_jumps(state, "pole")),
    })
    return field, amps


def rows_table(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows)
