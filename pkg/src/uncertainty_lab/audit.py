"""Operator-level unbiasedness checks and the precise/unbiased inconsistency.

A model is unbiased for A when <M_out - A> vanishes for every system state.
By the polarization identity this holds iff the partial expectation
<xi|M_out - A (x) 1|xi>, an operator on the system, is zero.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import MeasurementModel, b_out, lift, m_out, pointer_out
from .operators import (
    Tolerances,
    as_operator,
    commutator,
    dispersion,
    expectation,
    operator_norm,
)
from .quantities import commutator_bound, error_epsilon
from .sampling import random_state

CONSISTENT = "consistent"
TRADEOFF = "tradeoff"
FAULT = "fault"


def reduce_to_system(model: MeasurementModel, x_total) -> np.ndarray:
    """Partial expectation <xi| X |xi> as a d_sys x d_sys operator."""
    x = as_operator(x_total, model.dim)
    ds, da = model.d_sys, model.d_app
    return np.einsum("iajb,a,b->ij", x.reshape(ds, da, ds, da), model.xi.conj(), model.xi)


@dataclass(frozen=True)
class BiasReport:
    observable_label: str
    reduced_deviation_norm: float
    is_unbiased: bool


def _bias(model, label, deviation, tol) -> BiasReport:
    norm = operator_norm(reduce_to_system(model, deviation))
    return BiasReport(label, norm, norm <= tol.tol_alg)


def measurement_bias(model: MeasurementModel, A, pointer: str = "M") -> float:
    return operator_norm(reduce_to_system(model, pointer_out(model, pointer) - lift(model, A)))


def disturbance_bias(model: MeasurementModel, B) -> float:
    return operator_norm(reduce_to_system(model, b_out(model, B) - lift(model, B)))


def check_unbiased_measurement(
    model: MeasurementModel, A, label: str = "A", tol: Tolerances | None = None
) -> BiasReport:
    tol = model.tol if tol is None else tol
    return _bias(model, label, m_out(model) - lift(model, A), tol)


def check_unbiased_disturbance(
    model: MeasurementModel, B, label: str = "B", tol: Tolerances | None = None
) -> BiasReport:
    tol = model.tol if tol is None else tol
    return _bias(model, label, b_out(model, B) - lift(model, B), tol)


@dataclass(frozen=True)
class CrossTermCheck:
    max_deviation: float | None
    skipped: str | None = None


def strong_consequence_check(
    model: MeasurementModel, A, B, trials: int = 100, seed: int = 0
) -> CrossTermCheck:
    """Largest |<(M_out - A)(B (x) 1)>| and |<(B (x) 1)(M_out - A)>| over random psi.

    Both vanish for every psi when the measurement of A is unbiased.
    """
    report = check_unbiased_measurement(model, A)
    if not report.is_unbiased:
        return CrossTermCheck(
            None, f"model is biased for A (reduced deviation {report.reduced_deviation_norm:.3g})"
        )
    dev = m_out(model) - lift(model, A)
    Bt = lift(model, B)
    left, right = dev @ Bt, Bt @ dev
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        full = model.joint_state(random_state(model.d_sys, rng))
        worst = max(worst, abs(expectation(left, full)), abs(expectation(right, full)))
    return CrossTermCheck(worst)


def variance_decomposition_check(model: MeasurementModel, A, psi) -> tuple[float, float]:
    """(sigma(M_out)^2, sigma(M_out - A)^2 + sigma(A)^2) on psi (x) xi."""
    full = model.joint_state(psi)
    M = m_out(model)
    lhs = dispersion(M, full) ** 2
    rhs = dispersion(M - lift(model, A), full) ** 2 + dispersion(A, psi) ** 2
    return lhs, rhs


@dataclass(frozen=True)
class InconsistencyCertificate:
    eps_A: float
    bias_disturbance_B: float
    commutator_expectation: float
    verdict: str
    # <[M_out, B_out]>, zero because the two act on different factors
    out_commutator: float
    # bias of a second pointer N as a measurement of B, when the model has one
    bias_measurement_B: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def inconsistency_certificate(
    model: MeasurementModel, A, B, psi, tol: Tolerances | None = None
) -> InconsistencyCertificate:
    """Check that precise A, unbiased disturbance of B and <[A,B]> != 0 never coexist.

    If the measurement of A is precise and B is undisturbed on average, then
    <[A, B]> = <[M_out, B_out]> = 0.  A nonzero commutator therefore forces
    one of the first two to fail; seeing all three is reported as a fault.
    """
    tol = model.tol if tol is None else tol
    eps = error_epsilon(model, A, psi)
    bias_b = disturbance_bias(model, B)
    comm = commutator_bound(A, B, psi)
    out_comm = abs(expectation(commutator(m_out(model), b_out(model, B)), model.joint_state(psi)))

    bias_nb = None
    forbidden = eps <= tol.tol_alg and bias_b <= tol.tol_alg and comm > tol.tol_rel
    if model.has_pointer("N"):
        bias_nb = measurement_bias(model, B, "N")
        forbidden = forbidden or (eps <= tol.tol_alg and bias_nb <= tol.tol_alg and comm > tol.tol_rel)

    if forbidden or out_comm > tol.tol_rel:
        verdict = FAULT
    elif comm <= tol.tol_rel:
        verdict = CONSISTENT
    else:
        verdict = TRADEOFF
    return InconsistencyCertificate(eps, bias_b, comm, verdict, out_comm, bias_nb)
