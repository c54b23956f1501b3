import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from physics.errors import DomainError, NotFoundError, SizeError
from physics.model import EmitterArray, WaveguideModel, resonant_energy
from physics.oracle import (
    MIN_MODES,
    build_hamiltonian,
    default_cutoff,
    field_profile,
    find_bic_candidate,
    run_oracle,
)
from physics.waves import Parity, closed_form_wave


@pytest.fixture
def weak_model():
    return WaveguideModel(m=1.0, gamma=0.01)


@pytest.fixture
def small_ham(model, d, E1):
    return build_hamiltonian(model, EmitterArray(n=3, d=d, epsilon=E1), default_cutoff(model, E1), 600)


def test_hamiltonian_structure(small_ham):
    H = small_ham.matrix
    assert H.shape == (603, 603)
    assert_allclose(H, H.conj().T)
    assert_allclose(small_ham.k_grid, -small_ham.k_grid[::-1], atol=1e-12)
    vals, vecs = small_ham.eigensystem
    assert np.all(np.diff(vals) >= 0)
    assert_allclose(vecs.conj().T @ vecs, np.eye(603), atol=1e-10)


def test_hamiltonian_limits(model, d):
    array = EmitterArray(n=3, d=d)
    with pytest.raises(DomainError):
        build_hamiltonian(model, array, 10.0, MIN_MODES - 1)
    with pytest.raises(DomainError):
        build_hamiltonian(model, array, 0.0, 1000)
    with pytest.raises(SizeError):
        build_hamiltonian(model, array, 10.0, 20000)


def test_candidate_windows(small_ham, E1):
    with pytest.raises(DomainError):
        find_bic_candidate(small_ham, E1, (0.5, 1.5))
    with pytest.raises(NotFoundError):
        find_bic_candidate(small_ham, E1, (1.1800001, 1.1800002))


def test_candidate_weights(small_ham, E1):
    cand = find_bic_candidate(small_ham, E1, (E1 - 0.05, E1 + 0.05), parity=Parity.ANTISYMMETRIC)
    assert_allclose(cand.emitter_weight + cand.field_weight, 1.0)
    assert_allclose(np.linalg.norm(cand.vector), 1.0)
    assert_allclose(cand.amplitudes, -cand.amplitudes[::-1], atol=1e-3 * np.linalg.norm(cand.amplitudes))


def test_candidate_projected_on_target(small_ham, E1):
    window = (E1 - 0.05, E1 + 0.05)
    _, target = closed_form_wave(3, 2)
    cand = find_bic_candidate(small_ham, E1, window, parity=Parity.ANTISYMMETRIC, target=target)
    vals, vecs = small_ham.eigensystem
    inside = np.flatnonzero((vals >= window[0]) & (vals <= window[1]))
    amps = vecs[:3, inside]
    odd = np.linalg.norm(amps + amps[::-1], axis=0) <= 1e-3 * np.linalg.norm(amps, axis=0)
    projected = np.abs(target @ amps[:, odd]) ** 2
    assert_allclose(abs(target @ cand.amplitudes) ** 2, projected.max(), rtol=1e-12)
    assert_allclose(cand.emitter_weight, np.sum(np.abs(cand.amplitudes) ** 2), rtol=1e-12)


def test_field_profile_shape(small_ham, E1):
    cand = find_bic_candidate(small_ham, E1, (E1 - 0.05, E1 + 0.05))
    x = np.linspace(-5.0, 15.0, 41)
    assert field_profile(small_ham, cand.vector, x).shape == (41,)


@pytest.mark.slow
def test_exact_wave_recovered(model, d, quad):
    row = run_oracle(model, d, 3, 1, 2, n_k=2000, quad=quad)
    assert row["overlap_with_analytic"] >= 0.99
    assert row["emitter_weight"] > 0.5
    E = resonant_energy(model, d, 1)
    assert abs(row["candidate_E"] - E) < 0.5 * (E - model.m)
    assert math.isfinite(row["candidate_E"])


@pytest.mark.slow
def test_weak_coupling_wave_recovered(weak_model, d, quad):
    row = run_oracle(weak_model, d, 3, 1, 2, n_k=2000, quad=quad)
    assert row["overlap_with_analytic"] >= 0.99
    assert row["emitter_weight"] > 0.5


@pytest.mark.slow
def test_detuned_emitters_do_not_bind(weak_model, d, quad):
    row = run_oracle(weak_model, d, 3, 1, 2, n_k=2000, detune=10.0, quad=quad)
    assert row["emitter_weight"] < 0.5


@pytest.mark.slow
def test_overlap_converges_with_modes(weak_model, d, quad):
    overlaps = [
        run_oracle(weak_model, d, 3, 1, 2, n_k=n_k, quad=quad)["overlap_with_analytic"]
        for n_k in (500, 1000, 2000, 4000)
    ]
    for coarse, fine in zip(overlaps, overlaps[1:]):
        assert fine >= coarse - 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("n,nu,j,min_overlap,min_weight", [(7, 1, 4, 0.85, 0.75), (6, 2, 2, 0.78, 0.6)])
def test_wave_picked_from_shared_parity_sector(weak_model, d, quad, n, nu, j, min_overlap, min_weight):
    row = run_oracle(weak_model, d, n, nu, j, n_k=2000, quad=quad)
    assert row["overlap_with_analytic"] >= min_overlap
    assert row["emitter_weight"] >= min_weight
    E = resonant_energy(weak_model, d, nu)
    assert abs(row["candidate_E"] - E) < 0.5 * (E - weak_model.m)
