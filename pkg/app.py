"""bicwave: bound states in the continuum of emitter arrays in a massive waveguide.

Each subcommand writes provenance-stamped CSV files (and SVG with --svg) into
the output directory.

Run:
    bicwave spectrum --n 30 --nu 1
    bicwave bic --n 30 --nu 1 --j 1 --svg
    bicwave figures --jobs 4
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from components.plots import plot_bic, plot_multimer, plot_profile
from components.tables import catalog_table, rows_table, selfenergy_table, state_tables, write_csv
from data.presets import FIGURE_DEFORMED, FIGURE_FIELDS, FIGURE_MULTIMERS, FIGURE_PROFILES
from physics import __version__
from physics.bic import GridSpec, assemble
from physics.errors import BicwaveError, ConfigError
from physics.model import (
    EmitterArray,
    WaveguideModel,
    beta0_closed_form,
    field_weight_W,
    resonant_energy,
)
from physics.multimer import multimer_rows, plan, resolve_figure_index, verify
from physics.oracle import run_oracle
from physics.selfenergy import det_residual, propagator_inv
from physics.waves import (
    WaveCatalog,
    WaveKind,
    build_catalog,
    classify_waves,
    deformation_rows,
    resonance_profile,
)
from services.config import RunConfig, config_hash, load_config
from services.quadrature import QuadratureConfig

log = logging.getLogger("bicwave")

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


# ── Option plumbing ──────────────────────────────────────────────────────────
_RUN_OPTIONS = [
    click.option("--m", type=float, default=None, help="Waveguide mass gap m."),
    click.option("--gamma", type=float, default=None, help="Coupling strength γ."),
    click.option("--d", type=float, default=None, help="Emitter spacing d."),
    click.option("--n", type=int, default=None, help="Number of emitters."),
    click.option("--nu", type=int, default=None, help="Resonance index ν (E = E_ν)."),
    click.option("--j", type=int, default=None, help="Excitation-wave index."),
    click.option("--b1", type=float, default=None, help="Override b1 = β1/Z."),
    click.option("--model-free", is_flag=True, default=None, help="Classify from --b1 alone."),
    click.option("--E", "E", type=str, default=None, help="Energy: 'resonant:<ν>' or a number."),
    click.option("--k-max", type=float, default=None, help="Split point of the oscillatory tail."),
    click.option("--rel-tol", type=float, default=None, help="Quadrature relative tolerance."),
    click.option("--grid-per-cell", type=int, default=None, help="Field samples per spacing d."),
    click.option("--pad", type=float, default=None, help="Field padding beyond the end emitters."),
    click.option("--n-k", type=int, default=None, help="Oracle field modes."),
    click.option("--k-cut", type=float, default=None, help="Oracle momentum cutoff."),
    click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory."),
    click.option("--svg", is_flag=True, default=None, help="Also write SVG figures."),
    click.option("--jobs", type=int, default=None, help="Parallel workers for sweeps."),
    click.option("--seed", type=int, default=None, help="Recorded in the run configuration."),
    click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                 help="JSON configuration file."),
    click.option("-v", "--verbose", is_flag=True, default=None, help="Debug logging."),
]


def run_options(func):
    """Attach the shared flags and turn them into a RunConfig."""
    for option in reversed(_RUN_OPTIONS):
        func = option(func)

    @functools.wraps(func)
    def wrapper(config_path: str | None, **flags):
        try:
            cfg = load_config(flags, config_path)
            _setup_logging(cfg.verbose)
            func(cfg)
        except BicwaveError as exc:
            click.secho(f"error: {exc}", fg="red", bold=True, err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING, format=LOG_FORMAT, force=True
    )


# ── Shared helpers ───────────────────────────────────────────────────────────
def _model(cfg: RunConfig) -> WaveguideModel:
    return WaveguideModel(m=cfg.m, gamma=cfg.gamma)


def _quad(cfg: RunConfig) -> QuadratureConfig:
    return QuadratureConfig(
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, k_max=cfg.k_max, max_refinements=cfg.max_refinements
    )


def parse_energy(spec: str, model: WaveguideModel, d: float) -> float:
    """'resonant:<ν>' → E_ν, otherwise a plain number."""
    text = str(spec).strip()
    try:
        if text.startswith("resonant:"):
            return resonant_energy(model, d, int(text.split(":", 1)[1]))
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse energy {spec!r}") from exc


def _require_j(cfg: RunConfig) -> int:
    if cfg.j is None:
        raise ConfigError("this command needs --j")
    return cfg.j


def _catalog(cfg: RunConfig) -> WaveCatalog:
    if cfg.model_free:
        return classify_waves(cfg.n, cfg.nu, cfg.b1_override)
    return build_catalog(_model(cfg), cfg.d, cfg.n, cfg.nu, _quad(cfg), b1=cfg.b1_override)


def _out(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _done(paths: list[Path]) -> None:
    for p in paths:
        click.echo(f"  wrote {p}")


# ── CLI ──────────────────────────────────────────────────────────────────────
@click.group()
@click.version_option(__version__, prog_name="bicwave")
def cli():
    """Bound states in the continuum of emitter arrays in a massive waveguide."""


@cli.command()
@run_options
def spectrum(cfg: RunConfig):
    """Classify the excitation waves of an n-emitter chain at E_ν."""
    catalog = _catalog(cfg)
    path = write_csv(
        catalog_table(catalog), _out(cfg) / f"waves_n{cfg.n}_nu{cfg.nu}.csv", config_hash(cfg)
    )
    counts = catalog.counts()
    click.echo(
        f"n={cfg.n} ν={cfg.nu} b1={catalog.b1:.6g}: "
        + ", ".join(f"{counts[k]} {k.value.lower()}" for k in WaveKind)
    )
    _done([path])


@cli.command()
@run_options
def bic(cfg: RunConfig):
    """Assemble, normalise and write the BIC carried by wave j."""
    j = _require_j(cfg)
    model = _model(cfg)
    wave = _catalog(cfg).wave(j)
    state = assemble(
        model, EmitterArray(n=cfg.n, d=cfg.d), wave, GridSpec(cfg.grid_per_cell, cfg.pad), _quad(cfg)
    )
    out, digest = _out(cfg), config_hash(cfg)
    stem = f"n{cfg.n}_nu{cfg.nu}_j{j}"
    field, amps = state_tables(state)
    paths = [write_csv(field, out / f"bic_{stem}.csv", digest), write_csv(amps, out / f"amps_{stem}.csv", digest)]
    if cfg.svg:
        paths.append(plot_bic(state, field_weight_W(model, state.E), cfg.d, out / f"bic_{stem}.svg"))
    click.echo(
        f"E={state.E:.10g} ε={state.epsilon_required:.10g} "
        f"emitter weight={state.norm_report.emitters:.6f}"
        + (" (approximate)" if state.approximate else "")
    )
    _done(paths)


@cli.command()
@run_options
def multimer(cfg: RunConfig):
    """Tabulate every multimer decomposition of an n-emitter chain."""
    rows = multimer_rows(cfg.n, cfg.nu)
    if not rows:
        click.echo(f"n={cfg.n} admits no multimer decomposition")
    path = write_csv(rows_table(rows), _out(cfg) / f"multimers_n{cfg.n}.csv", config_hash(cfg))
    _done([path])


@cli.command()
@run_options
def selfenergy(cfg: RunConfig):
    """Tabulate β_j(E) and the e^{−jmd} envelope."""
    model = _model(cfg)
    E = parse_energy(cfg.E_spec, model, cfg.d)
    bundle = propagator_inv(model, EmitterArray(n=cfg.n, d=cfg.d), E, _quad(cfg))
    path = write_csv(selfenergy_table(bundle, cfg.m), _out(cfg) / "selfenergy.csv", config_hash(cfg))
    click.echo(
        f"E={E:.10g} β0={bundle.beta[0]:.12g} (closed form {beta0_closed_form(model, E):.12g}), "
        f"|det G⁻¹|={abs(det_residual(bundle)):.3e}"
    )
    _done([path])


@cli.command()
@run_options
def oracle(cfg: RunConfig):
    """Diagonalise the discretised Hamiltonian and compare with wave j."""
    row = run_oracle(
        _model(cfg), cfg.d, cfg.n, cfg.nu, _require_j(cfg), n_k=cfg.n_k, k_cut=cfg.k_cut, quad=_quad(cfg)
    )
    path = write_csv(rows_table([row]), _out(cfg) / "oracle_report.csv", config_hash(cfg))
    click.echo(
        f"candidate E={row['candidate_E']:.8g} emitter weight={row['emitter_weight']:.4f} "
        f"overlap={row['overlap_with_analytic']:.6f}"
    )
    _done([path])


# ── Figure data ──────────────────────────────────────────────────────────────
def figure_field(entry: dict, cfg: RunConfig) -> list[Path]:
    model, quad = _model(cfg), _quad(cfg)
    wave = build_catalog(model, cfg.d, entry["n"], entry["nu"], quad).wave(entry["j"])
    state = assemble(
        model, EmitterArray(n=entry["n"], d=cfg.d), wave, GridSpec(cfg.grid_per_cell, cfg.pad), quad
    )
    out, digest = Path(cfg.output_dir), config_hash(cfg)
    field, amps = state_tables(state)
    paths = [
        write_csv(field, out / f"{entry['name']}.csv", digest),
        write_csv(amps, out / f"{entry['name']}_amps.csv", digest),
    ]
    if cfg.svg:
        paths.append(plot_bic(state, field_weight_W(model, state.E), cfg.d, out / f"{entry['name']}.svg"))
    return paths


def figure_profile(entry: dict, cfg: RunConfig) -> list[Path]:
    n, nu = entry["n"], entry["nu"]
    profile = resonance_profile(n, nu)
    out = Path(cfg.output_dir)
    df = pd.DataFrame({"j": np.arange(1, n + 1), "overlap": profile})
    paths = [write_csv(df, out / f"{entry['name']}.csv", config_hash(cfg))]
    if cfg.svg:
        paths.append(plot_profile(profile, n, nu, out / f"{entry['name']}.svg"))
    return paths


def figure_deformed(entry: dict, cfg: RunConfig) -> list[Path]:
    catalog = classify_waves(entry["n"], entry["nu"], entry["b1"])
    df = rows_table(deformation_rows(catalog))
    return [write_csv(df, Path(cfg.output_dir) / f"{entry['name']}.csv", config_hash(cfg))]


def figure_multimers(cfg: RunConfig) -> list[Path]:
    rows, paths = [], []
    out = Path(cfg.output_dir)
    for entry in FIGURE_MULTIMERS:
        p = plan(entry["h"], entry["r"], resolve_figure_index(entry["r"], entry["j"]))
        row = {"name": entry["name"], "n": p.n, "h": p.h, "r": p.r, "j_h": p.j_h, "j_n": p.target_j}
        reports = {nu: verify(p, nu) for nu in (1, 2)}
        row["eig_residual"] = reports[1].eigen_residual
        row["junction_ok"] = reports[1].junction_ok
        row.update({f"u_overlap_nu{nu}": rep.u_overlap for nu, rep in reports.items()})
        rows.append(row)
        if cfg.svg:
            paths.append(plot_multimer(p, out / f"{entry['name']}.svg"))
    paths.insert(0, write_csv(rows_table(rows), out / "multimers_reference.csv", config_hash(cfg)))
    return paths


@cli.command()
@run_options
def figures(cfg: RunConfig):
    """Regenerate every reference data set (fields, multimers, profiles, deformation)."""
    _out(cfg)
    tasks = (
        [(figure_field, e) for e in FIGURE_FIELDS]
        + [(figure_profile, e) for e in FIGURE_PROFILES]
        + [(figure_deformed, e) for e in FIGURE_DEFORMED]
    )
    if (cfg.m, cfg.gamma, cfg.d) != (1.0, 0.1, 5.0):
        log.warning("reference sets assume m=1, γ=0.1, d=5; running with m=%g γ=%g d=%g",
                    cfg.m, cfg.gamma, cfg.d)
    results = Parallel(n_jobs=cfg.jobs)(delayed(fn)(entry, cfg) for fn, entry in tasks)
    paths = [p for batch in results for p in batch] + figure_multimers(cfg)
    click.secho(f"{len(paths)} files written to {cfg.output_dir}", fg="green", bold=True)
    _done(paths)


def main() -> None:
    cli(prog_name="bicwave")


if __name__ == "__main__":
    main()
