"""Derivative-free search over parameterized measurement models.

A model is parameterized by real coefficients theta of a Hermitian generator
H(theta) = sum_k theta_k G_k over a fixed Hilbert-Schmidt orthonormal basis,
with U = exp(i H).  Nelder-Mead (scipy) runs on scalarized error/disturbance
objectives; every evaluation goes into an archive whose nondominated subset
is the returned frontier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .model import MeasurementModel, build_projective, projective_unitary
from .operators import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    as_operator,
    as_state,
    commutator,
    dagger,
    expectation,
    tensor,
)
from .relations import ALL_IDS, UNIVERSAL, RelationId, RelationReport, evaluate_all

WEIGHTS = tuple(round(0.1 * k, 1) for k in range(1, 10))
PENALTY_ROUNDS = 3
PENALTY_GROWTH = 10.0
PENALTY_START = 1.0
ENDPOINT_CAP = 1e-3
SPOT_CHECK_EVERY = 10
MIN_BUDGET = 100

SPOT_CHECK_IDS = (
    RelationId.R1_ROBERTSON,
    RelationId.R5_OZAWA,
    RelationId.R6_UV_HEISENBERG,
    RelationId.R10_BASE_DIFF,
)


@lru_cache(maxsize=None)
def hermitian_basis(dim: int) -> np.ndarray:
    """dim^2 Hermitian matrices, orthonormal under (X, Y) -> tr(X Y)."""
    basis = []
    for j in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[j, j] = 1
        basis.append(e)
    r = 1 / np.sqrt(2)
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = r
            asym = np.zeros((dim, dim), dtype=complex)
            asym[j, k], asym[k, j] = -1j * r, 1j * r
            basis += [sym, asym]
    out = np.array(basis)
    out.setflags(write=False)
    return out


def generator(theta, dim: int) -> np.ndarray:
    return np.tensordot(np.asarray(theta, dtype=float), hermitian_basis(dim), axes=1)


def unitary_from_theta(theta, dim: int) -> np.ndarray:
    vals, vecs = np.linalg.eigh(generator(theta, dim))
    return (vecs * np.exp(1j * vals)) @ dagger(vecs)


def theta_from_unitary(U) -> np.ndarray:
    """Coefficients of a Hermitian H with exp(i H) = U (principal branch)."""
    U = as_operator(U)
    T, Z = scipy.linalg.schur(U, output="complex")
    H = (Z * np.angle(np.diag(T))) @ dagger(Z)
    basis = hermitian_basis(U.shape[0])
    return np.einsum("kij,ji->k", basis, H).real


@dataclass(frozen=True)
class ModelParameterization:
    d_sys: int
    d_app: int
    theta: np.ndarray
    xi: np.ndarray
    pointer: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != ((self.d_sys * self.d_app) ** 2,):
            raise DimensionError(f"theta must have length {(self.d_sys * self.d_app) ** 2}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "xi", as_state(self.xi, self.d_app))
        object.__setattr__(self, "pointer", as_operator(self.pointer, self.d_app))

    @property
    def dim(self) -> int:
        return self.d_sys * self.d_app

    def with_theta(self, theta) -> "ModelParameterization":
        return ModelParameterization(self.d_sys, self.d_app, theta, self.xi, self.pointer)

    @classmethod
    def from_model(cls, model: MeasurementModel, pointer: str = "M") -> "ModelParameterization":
        return cls(model.d_sys, model.d_app, theta_from_unitary(model.U), model.xi, model.pointers[pointer])


def realize(p: ModelParameterization) -> MeasurementModel:
    if not np.all(np.isfinite(p.theta)):
        raise ValueError("theta has non-finite entries")
    return MeasurementModel(p.d_sys, p.d_app, p.xi, unitary_from_theta(p.theta, p.dim), {"M": p.pointer})


@dataclass(frozen=True)
class FrontierPoint:
    eps: float
    eta: float
    theta: np.ndarray
    reports: list[RelationReport]


@dataclass(frozen=True)
class BiasBlowupRecord:
    eps_cap: float
    achieved_eps: float
    min_bias_B: float
    evaluations: int
    penalty_schedule: tuple[float, ...]
    feasible: bool = True


@dataclass
class SearchMonitor:
    """Counters filled in while a search runs."""

    evaluations: int = 0
    spot_checks: int = 0
    universal_violations: int = 0
    forbidden_hits: int = 0
    worst_universal_margin: float = math.inf
    log: list[str] = field(default_factory=list)


class _Evaluator:
    """Cheap (eps, eta, bias_B) for a fixed setting; records and audits each call."""

    def __init__(self, A, B, psi, p0: ModelParameterization, monitor: SearchMonitor, tol: Tolerances):
        self.A = as_operator(A, p0.d_sys)
        self.B = as_operator(B, p0.d_sys)
        self.psi = as_state(psi, p0.d_sys)
        self.p0 = p0
        self.tol = tol
        self.monitor = monitor
        eye_app = np.eye(p0.d_app)
        self.A_t = tensor(self.A, eye_app)
        self.B_t = tensor(self.B, eye_app)
        self.M_t = tensor(np.eye(p0.d_sys), p0.pointer)
        self.full = tensor(self.psi, p0.xi)
        self.comm = abs(expectation(commutator(self.A, self.B), self.psi))
        self.archive: list[tuple[float, float, np.ndarray]] = []

    def measure(self, theta) -> tuple[float, float, float]:
        U = unitary_from_theta(theta, self.p0.dim)
        Ud = dagger(U)
        dM = Ud @ self.M_t @ U - self.A_t
        dB = Ud @ self.B_t @ U - self.B_t
        eps = float(np.linalg.norm(dM @ self.full))
        eta = float(np.linalg.norm(dB @ self.full))
        red = np.einsum(
            "iajb,a,b->ij",
            dB.reshape(self.p0.d_sys, self.p0.d_app, self.p0.d_sys, self.p0.d_app),
            self.p0.xi.conj(),
            self.p0.xi,
        )
        bias = float(np.linalg.norm(red, ord=2))
        self._audit(theta, eps, bias)
        self.archive.append((eps, eta, np.array(theta, dtype=float)))
        return eps, eta, bias

    def _audit(self, theta, eps, bias):
        mon = self.monitor
        mon.evaluations += 1
        tol = self.tol
        if eps <= tol.tol_alg and bias <= tol.tol_alg and self.comm > tol.tol_rel:
            mon.forbidden_hits += 1
            mon.log.append(f"forbidden region entered at evaluation {mon.evaluations}")
        if mon.evaluations % SPOT_CHECK_EVERY == 1:
            self.spot_check(theta)

    def spot_check(self, theta, ids=SPOT_CHECK_IDS) -> list[RelationReport]:
        model = realize(self.p0.with_theta(theta))
        reports = evaluate_all(model, self.A, self.B, self.psi, ids, self.tol).reports
        mon = self.monitor
        mon.spot_checks += 1
        for r in (r for r in reports if r.universality == UNIVERSAL):
            mon.worst_universal_margin = min(mon.worst_universal_margin, r.margin)
            if r.violated:
                mon.universal_violations += 1
                mon.log.append(f"{r.id.value} violated (margin {r.margin:.3e})")
        return reports


def nondominated(points: list[tuple[float, float, np.ndarray]]) -> list[tuple[float, float, np.ndarray]]:
    """Pareto-minimal subset for (eps, eta), sorted by increasing eps; exact duplicates dropped."""
    ordered = sorted(points, key=lambda p: (p[0], p[1]))
    front = []
    best_eta = math.inf
    for p in ordered:
        if p[1] < best_eta:
            front.append(p)
            best_eta = p[1]
    return front


def _nelder_mead(fun, x0, maxfev: int):
    if maxfev <= 0:
        return np.asarray(x0, dtype=float)
    res = minimize(
        fun,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        options={"maxfev": maxfev, "xatol": 1e-10, "fatol": 1e-12, "adaptive": True},
    )
    return res.x


def _structured_starts(p0: ModelParameterization, *observables) -> list[np.ndarray]:
    """Encodings of the precise projective measurement of each observable."""
    starts = []
    for X in observables:
        try:
            U, _ = projective_unitary(X, p0.d_app)
        except DimensionError:
            continue
        starts.append(theta_from_unitary(U))
    return starts


def _penalized_search(ev: _Evaluator, x0, target, constraint, cap, budget):
    """Minimize target(theta) subject to constraint(theta) <= cap.

    Quadratic penalty on the relative violation, weight grown by
    PENALTY_GROWTH over PENALTY_ROUNDS rounds.  Returns the best feasible
    (value, constraint, theta) seen, or None, and the schedule used.
    """
    best = None
    schedule = []

    def consider(theta, value, con):
        nonlocal best
        if con <= cap and (best is None or value < best[0]):
            best = (value, con, np.array(theta, dtype=float))

    x = np.asarray(x0, dtype=float)
    per_round = budget // PENALTY_ROUNDS
    mu = PENALTY_START
    for _ in range(PENALTY_ROUNDS):
        schedule.append(mu)

        def fun(theta, mu=mu):
            values = ev.measure(theta)
            value, con = target(values), constraint(values)
            consider(theta, value, con)
            return value + mu * (max(0.0, con - cap) / cap) ** 2

        x = _nelder_mead(fun, x, per_round)
        mu *= PENALTY_GROWTH
    return best, tuple(schedule)


def trace_frontier(
    A,
    B,
    psi,
    p0: ModelParameterization,
    budget: int = 3000,
    seed: int = 0,
    monitor: SearchMonitor | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> list[FrontierPoint]:
    """Nondominated (eps(A), eta(B)) points found by scalarized Nelder-Mead.

    For each weight w in WEIGHTS, w*eps + (1-w)*eta is minimized from p0 and
    from one seeded random restart.  The two ends of the frontier come from
    penalized probes (min eta with eps <= ENDPOINT_CAP and vice versa) started
    at the precise measurements of A and of B.
    """
    if budget < MIN_BUDGET:
        raise ValueError(f"budget >= {MIN_BUDGET} required, got {budget}")
    monitor = SearchMonitor() if monitor is None else monitor
    ev = _Evaluator(A, B, psi, p0, monitor, tol)
    rng = np.random.default_rng(seed)

    restarts = [p0.theta, rng.normal(size=p0.theta.size)]
    starts_a = _structured_starts(p0, ev.A)
    starts_b = _structured_starts(p0, ev.B)
    n_probes = len(starts_a) + len(starts_b)
    n_runs = len(WEIGHTS) * len(restarts) + n_probes
    per_run = budget // n_runs

    for w in WEIGHTS:
        for x0 in restarts:

            def scalarized(theta, w=w):
                eps, eta, _ = ev.measure(theta)
                return w * eps + (1 - w) * eta

            _nelder_mead(scalarized, x0, per_run)

    def take_eps(v):
        return v[0]

    def take_eta(v):
        return v[1]

    for x0 in starts_a:
        _penalized_search(ev, x0, take_eta, take_eps, ENDPOINT_CAP, per_run)
    for x0 in starts_b:
        _penalized_search(ev, x0, take_eps, take_eta, ENDPOINT_CAP, per_run)

    points = []
    for eps, eta, theta in nondominated(ev.archive):
        reports = ev.spot_check(theta, ALL_IDS)
        points.append(FrontierPoint(eps, eta, theta, reports))
    return points


def default_parameterization(A, d_app: int | None = None) -> ModelParameterization:
    """Parameterization anchored at the precise projective measurement of A."""
    return ModelParameterization.from_model(build_projective(A, d_app))


def bias_blowup_probe(
    A,
    B,
    psi,
    caps,
    budget: int = 3000,
    seed: int = 0,
    p0: ModelParameterization | None = None,
    monitor: SearchMonitor | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> list[BiasBlowupRecord]:
    """Smallest disturbance bias of B reachable with eps(A) <= cap, per cap.

    Starts: the precise measurement of A (always feasible), no interaction,
    and one seeded random theta.  Caps must be positive and decreasing.
    """
    caps = [float(c) for c in caps]
    if not caps or any(c <= 0 for c in caps) or any(b >= a for a, b in zip(caps, caps[1:])):
        raise ValueError("caps must be positive and strictly decreasing")
    p0 = default_parameterization(A) if p0 is None else p0
    monitor = SearchMonitor() if monitor is None else monitor
    ev = _Evaluator(A, B, psi, p0, monitor, tol)
    rng = np.random.default_rng(seed)
    starts = _structured_starts(p0, ev.A) + [np.zeros_like(p0.theta), rng.normal(size=p0.theta.size)]
    per_cap = budget // len(caps)
    per_start = per_cap // len(starts)

    def take_bias(v):
        return v[2]

    def take_eps(v):
        return v[0]

    records = []
    for cap in caps:
        before = monitor.evaluations
        best, schedule = None, ()
        for x0 in starts:
            found, schedule = _penalized_search(ev, x0, take_bias, take_eps, cap, per_start)
            if found is not None and (best is None or found[0] < best[0]):
                best = found
        used = monitor.evaluations - before
        if best is None:
            records.append(BiasBlowupRecord(cap, math.nan, math.inf, used, schedule, feasible=False))
        else:
            records.append(BiasBlowupRecord(cap, best[1], best[0], used, schedule))
    return records

