import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from physics.errors import BranchPointError, DomainError
from physics.model import (
    EmitterArray,
    WaveguideModel,
    coupling_density_cont,
    field_weight_W,
    field_weight_closed,
    form_factor,
    form_factor_cont,
    k_of_E,
    omega,
    omega_cont,
    omega_on_line,
    omega_prime,
    residue_weight_Z,
    residue_weight_closed,
    resonant_energy,
)


def test_dispersion_on_real_axis(model):
    assert omega(model, 0.0) == 1.0
    assert_allclose(omega(model, 3.0), math.sqrt(10.0))
    assert_allclose(omega(model, np.array([0.0, 3.0])), [1.0, math.sqrt(10.0)])
    assert_allclose(omega_prime(model, 3.0), 3.0 / math.sqrt(10.0))


def test_form_factor_squared_is_coupling_density(model):
    k = np.linspace(0.0, 4.0, 9)
    assert_allclose(form_factor(model, k) ** 2, model.gamma / (2 * np.pi * omega(model, k)))


def test_continuation_matches_real_axis(model):
    assert_allclose(omega_cont(model, 2.0), math.sqrt(5.0))
    assert_allclose(form_factor_cont(model, 2.0), form_factor(model, 2.0))


def test_coupling_density_on_strip(model):
    rng = np.random.default_rng(7)
    kappa = rng.uniform(-5.0, 5.0, 20) + 1j * rng.uniform(-0.99, 0.99, 20)
    f = coupling_density_cont(model, kappa)
    assert_allclose(f, form_factor_cont(model, kappa) ** 2, rtol=1e-13)
    assert_allclose(np.conj(f), coupling_density_cont(model, np.conj(kappa)), rtol=1e-13)
    # scalar on the shifted line, as the β integrand evaluates it
    assert_allclose(coupling_density_cont(model, 0.7 + 1j),
                    model.gamma / (2 * np.pi * omega_on_line(model, 0.7)), rtol=1e-14)


@pytest.mark.parametrize("k", [0.05, 0.7, 3.0, 25.0])
def test_shifted_line_fast_path(model, k):
    assert_allclose(omega_on_line(model, k), omega_cont(model, k + 1j), rtol=1e-14)
    # mirror symmetry of the strip
    assert_allclose(omega_cont(model, -k + 1j), np.conj(omega_cont(model, k + 1j)), rtol=1e-14)


def test_branch_point_and_strip_refused(model):
    with pytest.raises(BranchPointError):
        omega_cont(model, 1j)
    with pytest.raises(BranchPointError):
        omega_cont(model, -1j)
    with pytest.raises(DomainError):
        omega_cont(model, 0.3 + 2j)


def test_k_of_E(model):
    assert_allclose(k_of_E(model, math.sqrt(5.0)), 2.0)
    with pytest.raises(DomainError):
        k_of_E(model, 1.0)
    with pytest.raises(DomainError):
        k_of_E(model, 0.5)


def test_resonant_energy(model):
    assert_allclose(resonant_energy(model, 5.0, 1), math.sqrt(1 + (math.pi / 5) ** 2))
    assert resonant_energy(model, 5.0, 0) == 1.0
    with pytest.raises(DomainError):
        resonant_energy(model, 0.0, 1)


@pytest.mark.parametrize("E", [1.01, 1.18, 2.0, 7.5])
def test_weights_reduce_to_closed_forms(model, E):
    assert_allclose(residue_weight_Z(model, E), residue_weight_closed(model, E), rtol=1e-14)
    assert_allclose(field_weight_W(model, E), field_weight_closed(model, E), rtol=1e-14)


def test_invalid_parameters():
    with pytest.raises(DomainError):
        WaveguideModel(m=0.0)
    with pytest.raises(DomainError):
        WaveguideModel(gamma=-1.0)
    with pytest.raises(DomainError):
        EmitterArray(n=0, d=1.0)
    with pytest.raises(ValueError):
        EmitterArray(n=2, d=0.0)


def test_positions():
    assert_allclose(EmitterArray(n=4, d=2.5).positions, [0.0, 2.5, 5.0, 7.5])
