"""Uncertainty relations as LHS >= RHS checks with a saturation-aware status."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .model import MeasurementModel, b_out, lift, m_out, n_out
from .operators import DEFAULT_TOL, Tolerances, commutator, dispersion, expectation
from .quantities import QuantitySet, quantity_set

SATISFIED = "satisfied"
SATURATED = "saturated"
VIOLATED = "violated"
UNIVERSAL = "universal"
CONDITIONAL = "conditional"


class RelationId(enum.Enum):
    R1_ROBERTSON = "R1_ROBERTSON"
    R2_ERROR_ERROR = "R2_ERROR_ERROR"
    R3_ARTHURS_KELLY = "R3_ARTHURS_KELLY"
    R4_NAIVE_ED = "R4_NAIVE_ED"
    R5_OZAWA = "R5_OZAWA"
    R6_UV_HEISENBERG = "R6_UV_HEISENBERG"
    R7_MOD_AK = "R7_MOD_AK"
    R8_SIGMA_SUM = "R8_SIGMA_SUM"
    R9_SIGMA_PRODUCT_SUM = "R9_SIGMA_PRODUCT_SUM"
    R10_BASE_DIFF = "R10_BASE_DIFF"
    R11_ERROR_ERROR_EPS = "R11_ERROR_ERROR_EPS"
    R12_PRECISE_ZERO = "R12_PRECISE_ZERO"
    BOX_PX = "BOX_PX"

    @property
    def order(self) -> int:
        return _ORDER[self]

    @property
    def short(self) -> str:
        return self.value.split("_", 1)[0]


_ORDER = {rid: k for k, rid in enumerate(RelationId)}

UNIVERSAL_IDS = frozenset(
    {
        RelationId.R1_ROBERTSON,
        RelationId.R5_OZAWA,
        RelationId.R6_UV_HEISENBERG,
        RelationId.R8_SIGMA_SUM,
        RelationId.R9_SIGMA_PRODUCT_SUM,
        RelationId.R10_BASE_DIFF,
        # eps*eta >= 0 cannot fail; its saturation flags a precise measurement
        RelationId.R12_PRECISE_ZERO,
        RelationId.BOX_PX,
    }
)
NEEDS_SECOND_POINTER = frozenset(
    {RelationId.R2_ERROR_ERROR, RelationId.R3_ARTHURS_KELLY, RelationId.R11_ERROR_ERROR_EPS}
)
# the model-based suite; BOX_PX is evaluated on box states only
ALL_IDS = tuple(r for r in RelationId if r is not RelationId.BOX_PX)


class PreconditionError(ValueError):
    pass


def classify(margin: float, rhs: float, tol: Tolerances = DEFAULT_TOL) -> str:
    scale = tol.tol_rel * max(1.0, rhs)
    if abs(margin) <= scale:
        return SATURATED
    return VIOLATED if margin < 0 else SATISFIED


@dataclass(frozen=True)
class RelationReport:
    id: RelationId
    lhs: float
    rhs: float
    margin: float
    status: str
    universality: str

    @classmethod
    def build(cls, rid: RelationId, lhs: float, rhs: float, tol: Tolerances = DEFAULT_TOL):
        margin = lhs - rhs
        return cls(
            rid,
            float(lhs),
            float(rhs),
            float(margin),
            classify(margin, rhs, tol),
            UNIVERSAL if rid in UNIVERSAL_IDS else CONDITIONAL,
        )

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def as_dict(self) -> dict:
        return {
            "id": self.id.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "status": self.status,
            "universality": self.universality,
        }


def _difference_commutator_half(model, X, Y, psi) -> float:
    return 0.5 * abs(expectation(commutator(X, Y), model.joint_state(psi)))


def evaluate(
    rid: RelationId,
    q: QuantitySet | None,
    model: MeasurementModel,
    A,
    B,
    psi,
    tol: Tolerances | None = None,
) -> RelationReport:
    tol = model.tol if tol is None else tol
    if rid in NEEDS_SECOND_POINTER and not model.has_pointer("N"):
        raise PreconditionError(f"{rid.value} needs a model with pointers M and N")
    if q is None:
        q = quantity_set(model, A, B, psi)
    half, full = q.bound_half, q.bound_full

    if rid is RelationId.R1_ROBERTSON:
        lhs, rhs = q.sigma_A * q.sigma_B, half
    elif rid is RelationId.R2_ERROR_ERROR:
        lhs, rhs = q.sigma_Mout_minus_A * q.sigma_Nout_minus_B, half
    elif rid is RelationId.R3_ARTHURS_KELLY:
        lhs, rhs = q.sigma_Mout * q.sigma_Nout, full
    elif rid is RelationId.R4_NAIVE_ED:
        lhs, rhs = q.eps_A * q.eta_B, half
    elif rid is RelationId.R5_OZAWA:
        lhs = q.eps_A * q.eta_B + q.sigma_A * q.eta_B + q.eps_A * q.sigma_B
        rhs = half
    elif rid is RelationId.R6_UV_HEISENBERG:
        lhs, rhs = q.bar_eps_A * q.bar_eta_B, full
    elif rid is RelationId.R7_MOD_AK:
        lhs, rhs = q.sigma_Mout * q.sigma_Bout, full
    elif rid is RelationId.R8_SIGMA_SUM:
        e, d = q.sigma_Mout_minus_A, q.sigma_Bout_minus_B
        lhs = e * d + e * q.sigma_B + q.sigma_A * d
        rhs = half
    elif rid is RelationId.R9_SIGMA_PRODUCT_SUM:
        lhs = (q.sigma_Mout_minus_A + q.sigma_A) * (q.sigma_Bout_minus_B + q.sigma_B)
        rhs = full
    elif rid is RelationId.R10_BASE_DIFF:
        lhs = q.sigma_Mout_minus_A * q.sigma_Bout_minus_B
        rhs = _difference_commutator_half(
            model, m_out(model) - lift(model, A), b_out(model, B) - lift(model, B), psi
        )
    elif rid is RelationId.R11_ERROR_ERROR_EPS:
        lhs, rhs = q.eps_A * q.eps_B, half
    elif rid is RelationId.R12_PRECISE_ZERO:
        lhs, rhs = q.eps_A * q.eta_B, 0.0
    else:  # pragma: no cover
        raise ValueError(rid)
    return RelationReport.build(rid, lhs, rhs, tol)


@dataclass
class SuiteResult:
    reports: list[RelationReport]
    skipped: dict[RelationId, str] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def __getitem__(self, rid: RelationId) -> RelationReport:
        for r in self.reports:
            if r.id is rid:
                return r
        raise KeyError(rid)

    def __contains__(self, rid) -> bool:
        return any(r.id is rid for r in self.reports)

    def universal_violations(self) -> list[RelationReport]:
        return [r for r in self.reports if r.universality == UNIVERSAL and r.violated]


def evaluate_all(
    model: MeasurementModel,
    A,
    B,
    psi,
    which=ALL_IDS,
    tol: Tolerances | None = None,
    q: QuantitySet | None = None,
) -> SuiteResult:
    if q is None:
        q = quantity_set(model, A, B, psi)
    result = SuiteResult([])
    for rid in sorted(set(which), key=lambda r: r.order):
        try:
            result.reports.append(evaluate(rid, q, model, A, B, psi, tol))
        except PreconditionError as exc:
            result.skipped[rid] = str(exc)
    return result


def robertson_variants(
    model: MeasurementModel, A, B, psi, tol: Tolerances | None = None
) -> dict[str, RelationReport]:
    """Robertson's relation applied to the output and difference operators.

    Every entry uses the actual commutator of the two operators involved, so
    none of them can be violated.
    """
    tol = model.tol if tol is None else tol
    full = model.joint_state(psi)
    A_t, B_t = lift(model, A), lift(model, B)
    dM = m_out(model) - A_t
    dB = b_out(model, B) - B_t
    pairs = {
        "error_vs_disturbance": (dM, dB),
        "error_vs_B": (dM, B_t),
        "A_vs_disturbance": (A_t, dB),
    }
    if model.has_pointer("N"):
        pairs["error_vs_error"] = (dM, n_out(model) - B_t)
    out = {}
    for name, (X, Y) in pairs.items():
        lhs = dispersion(X, full, tol) * dispersion(Y, full, tol)
        rhs = 0.5 * abs(expectation(commutator(X, Y), full))
        out[name] = RelationReport.build(RelationId.R10_BASE_DIFF, lhs, rhs, tol)
    return out
