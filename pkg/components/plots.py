"""SVG figures rendered with matplotlib's Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from physics.bic import BicState
from physics.multimer import MultimerPlan

plt.rcParams["svg.hashsalt"] = "bicwave"
_SVG_META = {"Date": None}


def _save(fig: plt.Figure, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_META, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_bic(state: BicState, W: float, d: float, path: Path) -> Path:
    """Field ξ/W(E) over x/d with the emitter amplitudes as lollipops."""
    norm = np.linalg.norm(state.amplitudes)
    fig, (ax_field, ax_amp) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    ax_field.plot(state.x / d, np.real(state.xi) / (W * norm), lw=1.2, label="full")
    ax_field.plot(state.x / d, np.real(state.xi_pole) / (W * norm), lw=0.8, ls="--", label="pole part")
    ax_field.set_ylabel(r"$\xi/W$")
    ax_field.legend(frameon=False, fontsize=8)
    ell = np.arange(state.amplitudes.size)
    ax_amp.stem(ell, np.real(state.amplitudes) / norm)
    ax_amp.set_xlabel("x / d")
    ax_amp.set_ylabel(r"$a_\ell$")
    title = f"ν={state.nu}, j={state.j}" + (" (approximate)" if state.approximate else "")
    ax_field.set_title(title)
    return _save(fig, path)


def plot_multimer(p: MultimerPlan, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 2.5))
    ax.stem(np.arange(1, p.n + 1), p.assembled)
    ax.set_title(f"n={p.n}, r={p.r}, h={p.h}, j_n={p.target_j}")
    ax.set_xlabel("emitter")
    return _save(fig, path)


def plot_profile(profile: np.ndarray, n: int, nu: int, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.bar(np.arange(1, n + 1), profile, width=0.8)
    ax.set_xlabel("j")
    ax.set_ylabel(r"$|u_\nu \cdot a^{(j)}|$ (normalised)")
    ax.set_title(f"n={n}, ν={nu}")
    return _save(fig, path)
