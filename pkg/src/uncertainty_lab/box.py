"""Position-momentum uncertainty on a periodic interval [-L/2, L/2].

States are truncated plane-wave expansions
    psi(x) = sum_{n=-n_max}^{n_max} c_n exp(2 pi i n x / L) / sqrt(L).
Momentum is diagonal (p_n = 2 pi hbar n / L).  Position is the coordinate
on the interval, whose plane-wave matrix elements are exact closed forms.
Because x psi is not periodic, the commutator expectation picks up the
boundary term hbar (1 - L |psi(L/2)|^2).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .operators import DEFAULT_TOL, Tolerances, clamp_sqrt, normalize
from .relations import RelationId, RelationReport


@dataclass(frozen=True)
class BoxState:
    L: float
    n_max: int
    coeffs: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if self.L <= 0 or self.hbar <= 0:
            raise ValueError("L and hbar must be positive")
        if self.n_max < 0 or c.shape != (2 * self.n_max + 1,):
            raise ValueError(f"need {2 * self.n_max + 1} coefficients, got shape {c.shape}")
        if abs(np.linalg.norm(c) - 1) > DEFAULT_TOL.tol_alg:
            raise ValueError("coefficients are not normalized")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2


def single_mode(n: int, n_max: int = 16, L: float = 2 * np.pi, hbar: float = 1.0) -> BoxState:
    c = np.zeros(2 * n_max + 1, dtype=complex)
    c[n + n_max] = 1.0
    return BoxState(L, n_max, c, hbar)


def from_modes(amplitudes: dict[int, complex], n_max: int, L: float = 2 * np.pi, hbar: float = 1.0) -> BoxState:
    """Normalized state with the given (unnormalized) amplitude per mode index."""
    c = np.zeros(2 * n_max + 1, dtype=complex)
    for n, a in amplitudes.items():
        c[n + n_max] = a
    return BoxState(L, n_max, normalize(c), hbar)


def random_box_state(rng: np.random.Generator, n_max: int = 16, L: float = 2 * np.pi, hbar: float = 1.0) -> BoxState:
    """Complex Gaussian amplitudes with geometric decay away from a random center mode."""
    n = np.arange(-n_max, n_max + 1)
    center = rng.integers(-n_max, n_max + 1)
    ratio = rng.uniform(0.3, 0.9)
    amp = (rng.normal(size=n.size) + 1j * rng.normal(size=n.size)) * ratio ** np.abs(n - center)
    return BoxState(L, n_max, normalize(amp), hbar)


def momenta(s: BoxState) -> np.ndarray:
    return 2 * np.pi * s.hbar * s.modes / s.L


def position_matrix(s: BoxState) -> np.ndarray:
    """<m|x|n> on the truncated basis."""
    j = s.modes[None, :] - s.modes[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        x = -1j * (-1.0) ** j * s.L / (2 * np.pi * j)
    x[j == 0] = 0.0
    return x


def position_squared_matrix(s: BoxState) -> np.ndarray:
    """<m|x^2|n>, the exact matrix of x^2 (not the square of the truncated x)."""
    j = s.modes[None, :] - s.modes[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        x2 = (-1.0) ** j * s.L**2 / (2 * np.pi**2 * j**2)
    x2[j == 0] = s.L**2 / 12
    return x2.astype(complex)


def mean_x(s: BoxState) -> float:
    c = s.coeffs
    return float(np.vdot(c, position_matrix(s) @ c).real)


def delta_x(s: BoxState, tol: Tolerances = DEFAULT_TOL) -> float:
    c = s.coeffs
    second = np.vdot(c, position_squared_matrix(s) @ c).real
    return clamp_sqrt(second - mean_x(s) ** 2, tol)


def delta_p(s: BoxState, tol: Tolerances = DEFAULT_TOL) -> float:
    p, w = momenta(s), s.weights
    mean = np.dot(w, p)
    return clamp_sqrt(float(np.dot(w, (p - mean) ** 2)), tol)


def wavefunction(s: BoxState, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    phases = np.exp(2j * np.pi * np.multiply.outer(x, s.modes) / s.L)
    return phases @ s.coeffs / np.sqrt(s.L)


def boundary_value(s: BoxState) -> complex:
    """psi(L/2), equal to psi(-L/2) by periodicity."""
    return complex(np.dot(s.coeffs, (-1.0) ** s.modes) / np.sqrt(s.L))


def boundary_term(s: BoxState) -> float:
    """(hbar/2) |1 - L |psi(L/2)|^2|."""
    return 0.5 * s.hbar * abs(1 - s.L * abs(boundary_value(s)) ** 2)


def boundary_commutator(s: BoxState) -> float:
    """i (<x psi|p psi> - <p psi|x psi>) from the coefficient algebra.

    Equals -hbar (1 - L |psi(L/2)|^2); on a periodic domain the boundary
    contribution replaces the textbook value -hbar.
    """
    c = s.coeffs
    X = position_matrix(s)
    p = momenta(s)
    value = 1j * np.vdot(c, (X * (p[None, :] - p[:, None])) @ c)
    return float(value.real)


def check_relation_4_1(s: BoxState, tol: Tolerances = DEFAULT_TOL) -> RelationReport:
    """Delta p Delta x >= (hbar/2) |1 - L |psi(L/2)|^2|."""
    return RelationReport.build(RelationId.BOX_PX, delta_p(s, tol) * delta_x(s, tol), boundary_term(s), tol)


def box_to_dict(s: BoxState) -> dict:
    return {
        "L": s.L,
        "hbar": s.hbar,
        "n_max": s.n_max,
        "coeffs": [[float(z.real), float(z.imag)] for z in s.coeffs],
    }


def box_from_dict(doc: dict) -> BoxState:
    coeffs = np.array([complex(re, im) for re, im in doc["coeffs"]], dtype=complex)
    return BoxState(float(doc["L"]), int(doc["n_max"]), coeffs, float(doc.get("hbar", 1.0)))


def save_box(s: BoxState, path) -> None:
    Path(path).write_text(json.dumps(box_to_dict(s), indent=1))


def load_box(path) -> BoxState:
    return box_from_dict(json.loads(Path(path).read_text()))
