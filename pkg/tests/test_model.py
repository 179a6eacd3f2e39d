import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uncertainty_lab.model import (
    MeasurementModel,
    MissingPointerError,
    b_out,
    build_joint_unbiased_spin,
    build_noisy_unbiased,
    build_projective,
    build_projective_spin,
    heisenberg_out,
    identity_model,
    lift,
    load_model,
    m_out,
    model_from_dict,
    model_to_dict,
    n_out,
    save_model,
)
from uncertainty_lab.operators import I2, KET, SX, SY, SZ, commutator, sigma_phi, tensor
from uncertainty_lab.quantities import error_epsilon
from uncertainty_lab.sampling import random_hermitian, random_instance, random_model, random_state

from conftest import angles, seeds

KET0 = KET["+z"]


def controlled_flip(phi):
    """P+ (x) 1 + P- (x) X written out from the eigenvectors of sigma_phi."""
    plus = np.array([1, np.exp(1j * phi)]) / np.sqrt(2)
    minus = np.array([1, -np.exp(1j * phi)]) / np.sqrt(2)
    Pp, Pm = np.outer(plus, plus.conj()), np.outer(minus, minus.conj())
    return np.kron(Pp, I2) + np.kron(Pm, SX)


@pytest.mark.parametrize("phi", [0.0, 0.3, 1.2, np.pi / 2])
def test_projective_spin_matches_controlled_flip(phi):
    model = build_projective_spin(phi)
    assert np.allclose(model.U, controlled_flip(phi), atol=1e-12)
    assert np.allclose(model.pointers["M"], SZ)
    assert np.allclose(model.xi, KET0)


@given(angles, seeds)
def test_m_out_acts_as_sigma_phi_on_ready_sector(phi, seed):
    psi = random_state(2, np.random.default_rng(seed))
    model = build_projective_spin(phi)
    out = heisenberg_out(model, tensor(I2, SZ)) @ tensor(psi, KET0)
    assert np.allclose(out, tensor(sigma_phi(phi) @ psi, KET0), atol=1e-12)


def test_identity_evolution():
    model = identity_model(2, KET0, {"M": SZ})
    X = random_hermitian(4, np.random.default_rng(0))
    assert np.allclose(heisenberg_out(model, X), X)
    assert np.allclose(b_out(model, SY), tensor(SY, I2))


@given(seeds)
def test_identity_is_fixed_by_any_unitary(seed):
    model = random_model(np.random.default_rng(seed))
    assert np.allclose(heisenberg_out(model, np.eye(model.dim)), np.eye(model.dim))


@given(seeds)
def test_output_commutator_vanishes(seed):
    model, _, B, _ = random_instance(np.random.default_rng(seed))
    assert np.abs(commutator(m_out(model), b_out(model, B))).max() < 1e-10


@given(seeds)
def test_spectrum_preserved(seed):
    model, _, B, _ = random_instance(np.random.default_rng(seed))
    X = lift(model, B)
    assert np.allclose(np.linalg.eigvalsh(heisenberg_out(model, X)), np.linalg.eigvalsh(X), atol=1e-10)


@given(angles, seeds)
def test_disturbance_norm_closed_form(phi, seed):
    # ||(B_out - B (x) 1)|psi, 0>||^2 = 2 cos^2(phi) for every psi
    psi = random_state(2, np.random.default_rng(seed))
    model = build_projective_spin(phi)
    v = (b_out(model, SY) - lift(model, SY)) @ model.joint_state(psi)
    assert np.vdot(v, v).real == pytest.approx(2 * np.cos(phi) ** 2, abs=1e-12)


def test_projective_spin_endpoints():
    assert error_epsilon(build_projective_spin(0.0), SX, KET0) < 1e-12
    model = build_projective_spin(np.pi / 2)
    assert np.linalg.norm((b_out(model, SY) - lift(model, SY)) @ model.joint_state(KET0)) < 1e-12


@pytest.mark.parametrize("phi", [0.0, 0.3, 1.2])
def test_projective_spin_m_out_spectrum(phi):
    vals = np.linalg.eigvalsh(m_out(build_projective_spin(phi)))
    assert np.allclose(vals, [-1, -1, 1, 1])


def test_projective_spin_is_precise_on_random_states():
    rng = np.random.default_rng(3)
    for _ in range(50):
        phi = rng.uniform(0, 2 * np.pi)
        model = build_projective_spin(phi)
        dev = m_out(model) - lift(model, sigma_phi(phi))
        s = model.joint_state(random_state(2, rng))
        assert np.vdot(s, dev @ dev @ s).real < 1e-20


def test_build_projective_generic():
    A = np.diag([3.0, -1.0, 3.0])
    model = build_projective(A)
    assert model.d_app == 2
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert error_epsilon(model, A, random_state(3, rng)) < 1e-12


def test_noisy_unbiased_output_operator():
    g = 0.5
    model = build_noisy_unbiased(SX, g * SX, KET0)
    # apparatus = copy register (x) noise register
    expected = tensor(SX, np.eye(4)) + tensor(np.eye(4), g * SX)
    assert np.allclose(m_out(model), expected)
    assert error_epsilon(model, SX, KET["+y"]) == pytest.approx(g)


def test_noisy_unbiased_zero_noise_is_precise():
    model = build_noisy_unbiased(SX, np.zeros((2, 2)), KET0)
    assert error_epsilon(model, SX, KET["+x"]) == pytest.approx(0, abs=1e-15)


def test_noisy_unbiased_rejects_biased_noise():
    with pytest.raises(ValueError, match="nonzero mean"):
        build_noisy_unbiased(SX, SZ, KET0)


def test_joint_model_pointers_commute():
    model = build_joint_unbiased_spin()
    assert np.allclose(commutator(model.pointers["M"], model.pointers["N"]), 0)
    assert np.abs(commutator(m_out(model), n_out(model))).max() < 1e-12


def test_missing_pointer():
    with pytest.raises(MissingPointerError):
        n_out(build_projective_spin(0.1))


def test_model_validation():
    with pytest.raises(ValueError):
        MeasurementModel(2, 2, KET0, 2 * np.eye(4), {"M": SZ})
    with pytest.raises(ValueError):
        MeasurementModel(2, 2, np.array([1, 1]), np.eye(4), {"M": SZ})
    with pytest.raises(ValueError):
        MeasurementModel(2, 2, KET0, np.eye(4), {"M": np.array([[0, 1], [0, 0]])})


@given(seeds, st.booleans())
def test_json_round_trip(seed, two):
    model = random_model(np.random.default_rng(seed), two_pointers=two)
    back = model_from_dict(json.loads(json.dumps(model_to_dict(model))))
    assert (back.d_sys, back.d_app) == (model.d_sys, model.d_app)
    for a, b in [(back.U, model.U), (back.xi, model.xi)] + [
        (back.pointers[k], model.pointers[k]) for k in model.pointers
    ]:
        assert np.all(np.abs(a - b) <= 1e-15 * np.maximum(np.abs(b), 1e-300))


def test_save_load(tmp_path):
    model = build_projective_spin(0.7)
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert np.array_equal(back.U, model.U)
