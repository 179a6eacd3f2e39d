"""Spin sweep, random property campaigns, and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import box
from .audit import FAULT, inconsistency_certificate
from .model import build_projective_spin
from .operators import DEFAULT_TOL, KET, SX, SY, Tolerances, dispersion
from .quantities import QuantitySet, commutator_bound, quantity_set
from .relations import ALL_IDS, RelationId, RelationReport, evaluate_all
from .sampling import random_hermitian, random_instance, random_precise_instance, random_state

SPIN_SWEEP_HEADER = (
    "phi,eps_A,eta_B,sigma_A,sigma_B,bound_half,bound_full,naive_lhs,ozawa_lhs,"
    "uvh_lhs,modak_lhs,sigma_Mout,sigma_Bout,r4_status,r5_status,r6_status,r7_status"
).split(",")

CAMPAIGN_SUITES = ("robertson", "universal-relations", "unbiasedness-theorem", "box")
CHECKED_UNIVERSAL = (
    RelationId.R1_ROBERTSON,
    RelationId.R5_OZAWA,
    RelationId.R6_UV_HEISENBERG,
    RelationId.R8_SIGMA_SUM,
    RelationId.R9_SIGMA_PRODUCT_SUM,
    RelationId.R10_BASE_DIFF,
)


def fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


@dataclass
class SweepRecord:
    value: float
    quantities: QuantitySet
    reports: list[RelationReport]

    def report(self, rid: RelationId) -> RelationReport:
        return next(r for r in self.reports if r.id is rid)


@dataclass
class SweepResult:
    scenario: str
    parameter_name: str
    records: list[SweepRecord]
    seed: int = 0
    tolerances: Tolerances = DEFAULT_TOL

    def universal_violations(self) -> list[tuple[float, RelationReport]]:
        return [
            (rec.value, r)
            for rec in self.records
            for r in rec.reports
            if r.universality == "universal" and r.violated
        ]

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "parameter_name": self.parameter_name,
            "seed": self.seed,
            "tolerances": {"tol_alg": self.tolerances.tol_alg, "tol_rel": self.tolerances.tol_rel},
            "records": [
                {
                    self.parameter_name: rec.value,
                    "quantities": rec.quantities.as_dict(),
                    "reports": [r.as_dict() for r in rec.reports],
                }
                for rec in self.records
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SPIN_SWEEP_HEADER)
        for rec in self.records:
            q = rec.quantities
            get = rec.report
            w.writerow(
                [
                    fmt(rec.value),
                    fmt(q.eps_A),
                    fmt(q.eta_B),
                    fmt(q.sigma_A),
                    fmt(q.sigma_B),
                    fmt(q.bound_half),
                    fmt(q.bound_full),
                    fmt(get(RelationId.R4_NAIVE_ED).lhs),
                    fmt(get(RelationId.R5_OZAWA).lhs),
                    fmt(get(RelationId.R6_UV_HEISENBERG).lhs),
                    fmt(get(RelationId.R7_MOD_AK).lhs),
                    fmt(q.sigma_Mout),
                    fmt(q.sigma_Bout),
                    get(RelationId.R4_NAIVE_ED).status,
                    get(RelationId.R5_OZAWA).status,
                    get(RelationId.R6_UV_HEISENBERG).status,
                    get(RelationId.R7_MOD_AK).status,
                ]
            )
        return buf.getvalue()


def run_spin_sweep(
    phi_start: float = 0.0,
    phi_end: float = math.pi / 2,
    steps: int = 91,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
) -> SweepResult:
    """A = sx, B = sy, psi = |+z>, measured along sigma_phi on a uniform phi grid."""
    if steps < 2 or not phi_start < phi_end:
        raise ValueError("need steps >= 2 and phi_start < phi_end")
    psi = KET["+z"]
    records = []
    for phi in np.linspace(phi_start, phi_end, steps):
        model = build_projective_spin(float(phi))
        q = quantity_set(model, SX, SY, psi)
        reports = evaluate_all(model, SX, SY, psi, ALL_IDS, tol, q).reports
        records.append(SweepRecord(float(phi), q, reports))
    return SweepResult("spin", "phi", records, seed, tol)


@dataclass
class CampaignSummary:
    suite: str
    instances: int
    seed: int
    passes: int = 0
    failures: int = 0
    worst_margin: float = math.inf
    rows: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def as_dict(self, with_rows: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "instances": self.instances,
            "seed": self.seed,
            "passes": self.passes,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
        }
        if with_rows:
            out["rows"] = self.rows
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "passed", "worst_margin", "detail"])
        for row in self.rows:
            w.writerow([row["index"], int(row["passed"]), fmt(row["worst_margin"]), row["detail"]])
        return buf.getvalue()

    def record(self, passed: bool, margin: float, detail: str):
        self.rows.append(
            {"index": len(self.rows), "passed": passed, "worst_margin": margin, "detail": detail}
        )
        self.worst_margin = min(self.worst_margin, margin)
        if passed:
            self.passes += 1
        else:
            self.failures += 1


def _robertson_instance(rng, tol, summary):
    d = int(rng.integers(2, 9))
    A, B = random_hermitian(d, rng), random_hermitian(d, rng)
    psi = random_state(d, rng)
    rep = RelationReport.build(
        RelationId.R1_ROBERTSON,
        dispersion(A, psi, tol) * dispersion(B, psi, tol),
        0.5 * commutator_bound(A, B, psi),
        tol,
    )
    summary.record(not rep.violated, rep.margin, f"d={d} {rep.status}")


def _universal_instance(rng, tol, summary):
    model, A, B, psi = random_instance(rng)
    reports = evaluate_all(model, A, B, psi, CHECKED_UNIVERSAL, tol).reports
    worst = min(reports, key=lambda r: r.margin)
    bad = [r.id.short for r in reports if r.violated]
    detail = f"{model.d_sys}x{model.d_app} " + ("violated:" + "/".join(bad) if bad else "ok")
    summary.record(not bad, worst.margin, detail)


def _theorem_instance(rng, tol, summary):
    k = len(summary.rows)
    if k % 2:
        model, A, B, psi = random_precise_instance(rng)
    else:
        model, A, B, psi = random_instance(rng, two_pointers=bool(k % 4 == 0))
    cert = inconsistency_certificate(model, A, B, psi, tol)
    # margin: how far the instance is from the forbidden corner
    margin = max(cert.eps_A, cert.bias_disturbance_B)
    summary.record(cert.verdict != FAULT, margin, cert.verdict)


def _box_instance(rng, tol, summary):
    s = box.random_box_state(rng, int(rng.integers(1, 17)), float(rng.uniform(1, 10)))
    rep = box.check_relation_4_1(s, tol)
    summary.record(not rep.violated, rep.margin, rep.status)


_CAMPAIGNS = {
    "robertson": _robertson_instance,
    "universal-relations": _universal_instance,
    "unbiasedness-theorem": _theorem_instance,
    "box": _box_instance,
}


def run_property_campaign(
    suite: str, instances: int = 1000, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> CampaignSummary:
    """Random-instance campaign; failures are universal-relation violations or theorem faults."""
    if suite not in _CAMPAIGNS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(CAMPAIGN_SUITES)}")
    if instances < 1:
        raise ValueError("instances must be positive")
    rng = np.random.default_rng(seed)
    summary = CampaignSummary(suite, instances, seed)
    step = _CAMPAIGNS[suite]
    for _ in range(instances):
        step(rng, tol, summary)
    return summary

