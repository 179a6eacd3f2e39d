import math

import numpy as np
import pytest
from hypothesis import given

from uncertainty_lab.model import build_joint_unbiased_spin, build_projective, build_projective_spin, identity_model
from uncertainty_lab.operators import KET, SX, SY, SZ, Tolerances
from uncertainty_lab.quantities import quantity_set
from uncertainty_lab.relations import (
    ALL_IDS,
    CONDITIONAL,
    SATISFIED,
    SATURATED,
    UNIVERSAL,
    VIOLATED,
    PreconditionError,
    RelationId as R,
    classify,
    evaluate,
    evaluate_all,
    robertson_variants,
)
from uncertainty_lab.sampling import random_hermitian, random_instance, random_state

from conftest import seeds

PLUS_Z = KET["+z"]
UNIVERSAL_SET = {R.R1_ROBERTSON, R.R5_OZAWA, R.R6_UV_HEISENBERG, R.R8_SIGMA_SUM, R.R9_SIGMA_PRODUCT_SUM, R.R10_BASE_DIFF}


def spin(phi, rid):
    return evaluate(rid, None, build_projective_spin(phi), SX, SY, PLUS_Z)


def test_classify_boundaries():
    tol = Tolerances()
    assert classify(0.0, 0.0, tol) == SATURATED
    assert classify(-5e-9, 0.0, tol) == SATURATED
    assert classify(-2e-8, 0.0, tol) == VIOLATED
    assert classify(2e-8, 0.0, tol) == SATISFIED
    # relative to rhs once rhs > 1
    assert classify(-1.5e-8, 2.0, tol) == SATURATED


def test_universality_labels():
    for rid in UNIVERSAL_SET:
        assert spin(0.3, rid).universality == UNIVERSAL
    for rid in (R.R4_NAIVE_ED, R.R7_MOD_AK):
        assert spin(0.3, rid).universality == CONDITIONAL
    joint = build_joint_unbiased_spin()
    for rid in (R.R2_ERROR_ERROR, R.R3_ARTHURS_KELLY, R.R11_ERROR_ERROR_EPS):
        assert evaluate(rid, None, joint, SX, SY, PLUS_Z).universality == CONDITIONAL


def test_robertson_saturated_on_plus_z():
    r = spin(0.0, R.R1_ROBERTSON)
    assert (r.lhs, r.rhs) == (pytest.approx(1), pytest.approx(1))
    assert r.status == SATURATED


def test_naive_fails_at_precise_measurement():
    r = spin(0.0, R.R4_NAIVE_ED)
    assert r.lhs == pytest.approx(0, abs=1e-12) and r.rhs == pytest.approx(1)
    assert r.status == VIOLATED


def test_ozawa_and_uv_at_zero():
    r5 = spin(0.0, R.R5_OZAWA)
    assert r5.lhs == pytest.approx(math.sqrt(2)) and r5.status == SATISFIED
    r6 = spin(0.0, R.R6_UV_HEISENBERG)
    assert r6.lhs == pytest.approx(1 + math.sqrt(2)) and r6.rhs == pytest.approx(2)
    assert r6.status == SATISFIED


def test_modified_arthurs_kelly_fails_at_zero():
    r7 = spin(0.0, R.R7_MOD_AK)
    assert r7.lhs == pytest.approx(1) and r7.rhs == pytest.approx(2)
    assert r7.status == VIOLATED


def test_precise_measurement_saturates_difference_robertson():
    r10 = spin(0.0, R.R10_BASE_DIFF)
    assert r10.lhs == pytest.approx(0, abs=1e-12) and r10.rhs == pytest.approx(0, abs=1e-12)
    assert r10.status == SATURATED
    assert spin(0.0, R.R12_PRECISE_ZERO).status == SATURATED
    assert spin(0.5, R.R12_PRECISE_ZERO).status == SATISFIED


def test_full_suite_at_pi_over_6():
    suite = evaluate_all(build_projective_spin(math.pi / 6), SX, SY, PLUS_Z)
    for rid in UNIVERSAL_SET:
        assert suite[rid].status in (SATISFIED, SATURATED)
    assert suite[R.R4_NAIVE_ED].lhs == pytest.approx(0.5176380902050415 * 1.224744871391589)
    assert suite[R.R4_NAIVE_ED].status == VIOLATED
    assert suite[R.R7_MOD_AK].status == VIOLATED
    assert set(suite.skipped) == {R.R2_ERROR_ERROR, R.R3_ARTHURS_KELLY, R.R11_ERROR_ERROR_EPS}
    assert [r.id.order for r in suite] == sorted(r.id.order for r in suite)


def test_equal_observables_never_violate():
    suite = evaluate_all(build_projective_spin(0.4), SX, SX, PLUS_Z)
    # R10 bounds by the commutator of the difference operators, not of A and B
    assert all(r.rhs == pytest.approx(0, abs=1e-15) for r in suite if r.id is not R.R10_BASE_DIFF)
    assert not any(r.violated for r in suite)


def test_no_interaction():
    model = identity_model(2, PLUS_Z, {"M": SZ})
    suite = evaluate_all(model, SX, SY, PLUS_Z)
    assert suite[R.R1_ROBERTSON].status == SATURATED
    # eta = 0 so the naive product is zero
    assert suite[R.R4_NAIVE_ED].lhs == 0 and suite[R.R4_NAIVE_ED].status == VIOLATED


def test_two_pointer_relations_need_n():
    with pytest.raises(PreconditionError):
        evaluate(R.R3_ARTHURS_KELLY, None, build_projective_spin(0.1), SX, SY, PLUS_Z)


def test_joint_unbiased_model_reaches_arthurs_kelly_bound():
    # sigma(M_out) = sigma(N_out) = sqrt2 and sigma(M_out - A) = sigma(N_out - B) = 1 on |+z>
    suite = evaluate_all(build_joint_unbiased_spin(), SX, SY, PLUS_Z)
    r3, r2 = suite[R.R3_ARTHURS_KELLY], suite[R.R2_ERROR_ERROR]
    assert r3.lhs == pytest.approx(2) and r3.status == SATURATED
    assert r2.lhs == pytest.approx(1) and r2.status == SATURATED
    assert suite[R.R11_ERROR_ERROR_EPS].status == SATURATED
    assert not suite.skipped


@given(seeds)
def test_universal_relations_hold_on_random_instances(seed):
    model, A, B, psi = random_instance(np.random.default_rng(seed), two_pointers=True)
    suite = evaluate_all(model, A, B, psi)
    assert suite.universal_violations() == []
    assert not any(r.violated for r in robertson_variants(model, A, B, psi).values())


@given(seeds)
def test_monotone_chain(seed):
    model, A, B, psi = random_instance(np.random.default_rng(seed))
    q = quantity_set(model, A, B, psi)
    suite = evaluate_all(model, A, B, psi, q=q)
    r4, r5, r6 = suite[R.R4_NAIVE_ED].lhs, suite[R.R5_OZAWA].lhs, suite[R.R6_UV_HEISENBERG].lhs
    assert r6 >= r5 - 1e-12 >= r4 - 2e-12
    assert r6 == pytest.approx(r5 + q.sigma_A * q.sigma_B)
    assert r6 >= q.sigma_Mout * q.sigma_Bout - 1e-10


@given(seeds)
def test_variance_decomposition_for_unbiased_undisturbed(seed):
    # precise measurement of a diagonal A leaves any diagonal B undisturbed
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    A = np.diag(rng.normal(size=d)).astype(complex)
    B = np.diag(rng.normal(size=d)).astype(complex)
    psi = random_state(d, rng)
    model = build_projective(A)
    q = quantity_set(model, A, B, psi)
    r7 = evaluate(R.R7_MOD_AK, q, model, A, B, psi)
    expected = (q.eps_A**2 + q.sigma_A**2) * (q.eta_B**2 + q.sigma_B**2)
    assert r7.lhs**2 == pytest.approx(expected, rel=1e-8, abs=1e-12)


def test_robertson_variants_names():
    names = set(robertson_variants(build_joint_unbiased_spin(), SX, SY, PLUS_Z))
    assert names == {"error_vs_disturbance", "error_vs_B", "A_vs_disturbance", "error_vs_error"}


def test_report_dict():
    d = spin(0.2, R.R6_UV_HEISENBERG).as_dict()
    assert d["id"] == "R6_UV_HEISENBERG" and d["universality"] == UNIVERSAL


def test_all_ids_excludes_box():
    assert R.BOX_PX not in ALL_IDS and len(ALL_IDS) == 12
