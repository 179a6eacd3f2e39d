"""Error, disturbance and dispersion quantities for a model, observables and state."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .model import MeasurementModel, b_out, lift, m_out, n_out
from .operators import as_operator, commutator, dispersion, expectation, require_hermitian, rms


def error_epsilon(model: MeasurementModel, A, psi) -> float:
    """eps(A) = <(M_out - A(x)1)^2>^(1/2) on psi (x) xi."""
    A = as_operator(A, model.d_sys)
    require_hermitian(A, "A", model.tol)
    return rms(m_out(model) - lift(model, A), model.joint_state(psi))


def disturbance_eta(model: MeasurementModel, B, psi) -> float:
    """eta(B) = <(B_out - B(x)1)^2>^(1/2) on psi (x) xi."""
    return rms(b_out(model, B) - lift(model, B), model.joint_state(psi))


def error_of_second_pointer(model: MeasurementModel, B, psi) -> float:
    """eps(B) read from pointer N: <(N_out - B(x)1)^2>^(1/2)."""
    B = as_operator(B, model.d_sys)
    return rms(n_out(model) - lift(model, B), model.joint_state(psi))


def commutator_bound(A, B, psi) -> float:
    """|<psi|[A, B]|psi>|."""
    return abs(expectation(commutator(A, B), psi))


@dataclass(frozen=True)
class QuantitySet:
    sigma_A: float
    sigma_B: float
    eps_A: float
    eta_B: float
    bar_eps_A: float
    bar_eta_B: float
    sigma_Mout: float
    sigma_Bout: float
    bound_half: float
    bound_full: float
    # dispersions of the difference operators, used by the Robertson-level relations
    sigma_Mout_minus_A: float
    sigma_Bout_minus_B: float
    # only defined when the model carries a second pointer N
    sigma_Nout: float | None = None
    eps_B: float | None = None
    sigma_Nout_minus_B: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def quantity_set(model: MeasurementModel, A, B, psi) -> QuantitySet:
    A = as_operator(A, model.d_sys)
    B = as_operator(B, model.d_sys)
    tol = model.tol
    require_hermitian(A, "A", tol)
    require_hermitian(B, "B", tol)
    full = model.joint_state(psi)

    A_t, B_t = lift(model, A), lift(model, B)
    M = m_out(model)
    Bo = b_out(model, B)
    sigma_A = dispersion(A, psi, tol)
    sigma_B = dispersion(B, psi, tol)
    eps_A = rms(M - A_t, full)
    eta_B = rms(Bo - B_t, full)
    bound = commutator_bound(A, B, psi)

    extra = {}
    if model.has_pointer("N"):
        N = n_out(model)
        extra = dict(
            sigma_Nout=dispersion(N, full, tol),
            eps_B=rms(N - B_t, full),
            sigma_Nout_minus_B=dispersion(N - B_t, full, tol),
        )

    return QuantitySet(
        sigma_A=sigma_A,
        sigma_B=sigma_B,
        eps_A=eps_A,
        eta_B=eta_B,
        bar_eps_A=eps_A + sigma_A,
        bar_eta_B=eta_B + sigma_B,
        sigma_Mout=dispersion(M, full, tol),
        sigma_Bout=dispersion(Bo, full, tol),
        bound_half=0.5 * bound,
        bound_full=bound,
        sigma_Mout_minus_A=dispersion(M - A_t, full, tol),
        sigma_Bout_minus_B=dispersion(Bo - B_t, full, tol),
        **extra,
    )

