import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import linalg

from physics.errors import ClassificationError, DomainError, ParityError
from physics.model import resonant_energy
from physics.selfenergy import beta_j
from physics.waves import (
    Parity,
    WaveKind,
    _greedy_match,
    a_matrix,
    b1_at_resonance,
    build_catalog,
    classify_waves,
    closed_form_parity,
    closed_form_wave,
    compressed_limit,
    deformation_rows,
    delta_matrix,
    delta_spectrum,
    epsilon_for_bic,
    expected_kind,
    exchange_matrix,
    parity_of,
    resonance_profile,
    u_vector,
    vector_parity,
)


# ── Δ_n ──────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("n", [1, 2, 5, 30])
def test_delta_spectrum(n):
    pairs = delta_spectrum(n)
    vecs = np.column_stack([a for _, a in pairs])
    assert_allclose(vecs.T @ vecs, np.eye(n), atol=1e-12)
    for chi, a in pairs:
        assert_allclose(delta_matrix(n) @ a, chi * a, atol=1e-12)
    chis = [chi for chi, _ in pairs]
    assert all(x > y for x, y in zip(chis, chis[1:]))


def test_closed_form_matches_dense_eigensolver():
    for n in range(2, 201):
        vals, vecs = linalg.eigh(delta_matrix(n))
        pairs = delta_spectrum(n)
        assert_allclose([chi for chi, _ in pairs], vals[::-1], atol=1e-12)
        # Δ_n has a simple spectrum, so each wave is its eigenvector up to sign
        overlaps = np.abs(vecs[:, ::-1].T @ np.column_stack([a for _, a in pairs]))
        assert_allclose(np.diag(overlaps), 1.0, atol=1e-9)


def test_closed_form_sign_and_parity():
    for j in range(1, 8):
        _, a = closed_form_wave(7, j)
        assert a[0] > 0
        assert vector_parity(a) is closed_form_parity(j)
        assert_allclose(exchange_matrix(7) @ a, a if j % 2 else -a, atol=1e-12)
    with pytest.raises(DomainError):
        closed_form_wave(7, 8)


def test_vector_without_parity():
    with pytest.raises(ParityError):
        vector_parity(np.array([1.0, 2.0, 0.5]))


def test_a_matrix_at_resonance():
    A = a_matrix(math.pi, [0.01], 4)
    assert_allclose(np.diag(A), 1j)
    u = u_vector(1, 4)
    assert_array_equal(A.imag, np.outer(u, u))
    assert_allclose(A.real, -0.01 * delta_matrix(4))
    with pytest.raises(DomainError):
        a_matrix(math.pi, [0.1, 0.2, 0.3, 0.4], 4)


def test_greedy_tie_goes_to_lower_index():
    assert _greedy_match(np.array([[1.0, 1.0]]), [2, 4]) == {0: 2}


# ── Classification ───────────────────────────────────────────────────────────

def test_expected_kind_table():
    kinds = [expected_kind(30, 1, j) for j in range(1, 31)]
    assert kinds[29] is WaveKind.SUPERRADIANT
    assert kinds.count(WaveKind.EXACT) == 15
    assert all(kinds[j - 1] is WaveKind.EXACT for j in range(1, 30, 2))
    assert expected_kind(31, 2, 1) is WaveKind.SUPERRADIANT
    assert expected_kind(31, 2, 4) is WaveKind.EXACT
    assert expected_kind(31, 1, 31) is WaveKind.SUPERRADIANT


@pytest.mark.parametrize("n,nu", [(30, 1), (30, 2), (31, 1), (31, 2), (2, 1), (3, 2)])
def test_classification_counts(n, nu):
    catalog = classify_waves(n, nu, 1e-2)
    counts = catalog.counts()
    assert counts[WaveKind.EXACT] == n // 2
    assert counts[WaveKind.SUPERRADIANT] == 1
    assert counts[WaveKind.DEFORMED] == (n + 1) // 2 - 1
    assert [w.j for w in catalog.waves] == list(range(1, n + 1))
    for w in catalog.waves:
        assert w.kind is expected_kind(n, nu, w.j)


@pytest.mark.parametrize("nu", [1, 2, 3, 4])
def test_classification_table_full_grid(nu):
    for n in range(2, 32):
        catalog = classify_waves(n, nu, 1e-3)
        counts = catalog.counts()
        assert counts[WaveKind.EXACT] == n // 2, (n, nu)
        assert counts[WaveKind.SUPERRADIANT] == 1, (n, nu)
        assert counts[WaveKind.DEFORMED] == (n + 1) // 2 - 1, (n, nu)
        assert all(w.kind is expected_kind(n, nu, w.j) for w in catalog.waves), (n, nu)


def test_single_emitter_is_superradiant():
    catalog = classify_waves(1, 1, 1e-3)
    assert [w.kind for w in catalog.waves] == [WaveKind.SUPERRADIANT]


@pytest.mark.parametrize("n,nu", [(30, 1), (31, 2)])
def test_exact_waves(n, nu):
    b1 = 1e-2
    u = u_vector(nu, n)
    for w in classify_waves(n, nu, b1).waves:
        if w.kind is not WaveKind.EXACT:
            continue
        chi, a = closed_form_wave(n, w.j)
        assert abs(w.resonance_overlap) <= 1e-12
        assert abs(u @ w.amplitudes) <= 1e-12
        assert_allclose(w.amplitudes, a, atol=1e-8)
        assert w.chi.imag == 0.0
        assert abs(w.eigenvalue.imag) <= 1e-12
        assert_allclose(w.eigenvalue.real, -b1 * chi, atol=1e-12)
        assert w.parity is closed_form_parity(w.j)
        assert not w.approximate


@pytest.mark.parametrize("n,nu", [(30, 1), (31, 2), (20, 2)])
def test_real_eigenvalue_count(n, nu):
    waves = classify_waves(n, nu, 1e-2).waves
    real = [w for w in waves if abs(w.eigenvalue.imag) <= 1e-12]
    assert len(real) == n // 2


def test_superradiant_mode():
    n, nu = 30, 1
    sr = classify_waves(n, nu, 1e-3).wave(30)
    assert sr.kind is WaveKind.SUPERRADIANT
    assert sr.eigenvalue.imag > 0.99 * n
    u = u_vector(nu, n) / math.sqrt(n)
    assert abs(u @ sr.amplitudes) > 0.999


@pytest.mark.parametrize("nu", [1, 2])
def test_deformed_overlaps(nu):
    n = 100
    catalog = classify_waves(n, nu, 1e-3)
    edge = 1 if nu % 2 == 0 else n
    for w in catalog.waves:
        if w.kind is not WaveKind.DEFORMED:
            continue
        _, a = closed_form_wave(n, w.j)
        overlap = abs(a @ w.amplitudes)
        assert overlap >= 0.9
        if abs(w.j - edge) >= 8:
            assert overlap >= 0.99
        assert w.approximate
        assert_allclose(np.linalg.norm(w.deformation), np.linalg.norm(w.amplitudes * np.conj(a @ w.amplitudes) / overlap - a), rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("nu", [1, 2])
def test_resonance_projection_scales_with_b1(nu):
    n = 100
    ratios = []
    for b1 in (1e-2, 1e-3, 1e-4):
        catalog = classify_waves(n, nu, b1)
        projections = [abs(w.resonance_overlap) for w in catalog.waves if w.kind is WaveKind.DEFORMED]
        ratios.append(np.linalg.norm(projections) / b1)
    assert max(ratios) <= 1.5 * min(ratios)


def test_deformed_waves_approach_compressed_limit():
    catalog = classify_waves(30, 1, 1e-4)
    rows = deformation_rows(catalog)
    assert {r["j"] for r in rows} == set(compressed_limit(30, 1))
    for row in rows:
        assert row["overlap_with_limit"] >= 0.999
        assert row["deformation_norm"] > 0.0


def test_classification_domain():
    with pytest.raises(DomainError):
        classify_waves(5, 1, 0.0)
    with pytest.raises(DomainError):
        classify_waves(5, 1, 0.2)
    with pytest.raises(DomainError):
        classify_waves(0, 1, 1e-3)


# ── Profiles and selection rule ──────────────────────────────────────────────

@pytest.mark.parametrize("n,nu", [(50, 2), (50, 1), (51, 2), (51, 1)])
def test_resonance_profile(n, nu):
    profile = resonance_profile(n, nu)
    assert profile.max() == 1.0
    for j in range(1, n + 1):
        if expected_kind(n, nu, j) is WaveKind.EXACT:
            assert profile[j - 1] == 0.0
        else:
            assert profile[j - 1] > 0.0


def test_epsilon_selection_rule(model, d, quad):
    E = resonant_energy(model, d, 1)
    chi, _ = closed_form_wave(30, 1)
    expected = E - beta_j(model, d, E, 0, quad) - beta_j(model, d, E, 1, quad) * chi
    assert_allclose(epsilon_for_bic(model, d, 30, 1, 1, quad), expected, rtol=1e-14)


def test_epsilon_refuses_superradiant(model, d, quad):
    with pytest.raises(ClassificationError, match="superradiant"):
        epsilon_for_bic(model, d, 30, 1, 30, quad)


def test_epsilon_warns_for_deformed(model, d, quad, caplog):
    with caplog.at_level(logging.WARNING, logger="physics.waves"):
        epsilon_for_bic(model, d, 30, 1, 2, quad)
    assert "approximate" in caplog.text


def test_physical_catalog(model, d, quad):
    b1 = b1_at_resonance(model, d, 1, quad)
    assert 0 < abs(b1) < 0.1
    catalog = build_catalog(model, d, 30, 1, quad)
    assert catalog.b1 == b1
    eps = dict(zip([w.j for w in catalog.waves], catalog.epsilon_values))
    assert math.isnan(eps[30])
    assert_allclose(eps[1], epsilon_for_bic(model, d, 30, 1, 1, quad), rtol=1e-14)


def test_parity_of_classified_waves():
    for w in classify_waves(12, 2, 1e-2).waves:
        assert vector_parity(w.amplitudes) is w.parity
        assert w.parity is closed_form_parity(w.j) or w.kind is not WaveKind.EXACT
        assert parity_of(w) is w.parity
    assert Parity.SYMMETRIC.value == "Symmetric"


def test_parity_of_accepts_arrays():
    assert parity_of(np.array([1.0, -2.0, 1.0])) is Parity.SYMMETRIC
    assert parity_of(np.array([0.5j, 0.0, -0.5j])) is Parity.ANTISYMMETRIC
    assert parity_of(closed_form_wave(6, 3)[1]) is Parity.SYMMETRIC
    with pytest.raises(ParityError):
        parity_of(np.array([1.0, 0.0, 0.2]))
