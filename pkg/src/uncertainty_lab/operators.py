"""Dense complex linear algebra on finite-dimensional Hilbert spaces.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)`` and pure
states are complex vectors of shape ``(d,)``.  The helpers here validate
shapes and predicates; nothing is wrapped in a class.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# eigenvalues closer than this are grouped into one spectral projector
DEGENERACY_GAP = 1e-9


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NumericalFault(ArithmeticError):
    """A quantity that must be nonnegative came out below -tol_alg."""


@dataclass(frozen=True)
class Tolerances:
    tol_alg: float = 1e-10
    tol_rel: float = 1e-8

    def __post_init__(self):
        if not (0 < self.tol_alg <= self.tol_rel < 1):
            raise ValueError(
                f"need 0 < tol_alg <= tol_rel < 1, got {self.tol_alg}, {self.tol_rel}"
            )


DEFAULT_TOL = Tolerances()


# Pauli matrices and a few named states, used all over the spin scenarios.
I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

KET = {
    "+z": np.array([1, 0], dtype=complex),
    "-z": np.array([0, 1], dtype=complex),
    "+x": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-x": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "+y": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    "-y": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}


def sigma_phi(phi: float) -> np.ndarray:
    """cos(phi) sx + sin(phi) sy."""
    return np.cos(phi) * SX + np.sin(phi) * SY


def as_operator(x, dim: int | None = None) -> np.ndarray:
    op = np.asarray(x, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError(f"operator must be square, got shape {op.shape}")
    if dim is not None and op.shape[0] != dim:
        raise DimensionError(f"expected dim {dim}, got {op.shape[0]}")
    return op


def as_state(v, dim: int | None = None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    s = np.asarray(v, dtype=complex)
    if s.ndim != 1:
        raise DimensionError(f"state must be a vector, got shape {s.shape}")
    if dim is not None and s.shape[0] != dim:
        raise DimensionError(f"expected dim {dim}, got {s.shape[0]}")
    if abs(np.linalg.norm(s) - 1.0) > tol.tol_alg:
        raise ValueError(f"state not normalized (norm {np.linalg.norm(s)!r})")
    return s


def normalize(v) -> np.ndarray:
    s = np.asarray(v, dtype=complex)
    n = np.linalg.norm(s)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return s / n


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def is_hermitian(x, tol: Tolerances = DEFAULT_TOL) -> bool:
    op = as_operator(x)
    return bool(np.max(np.abs(op - dagger(op)), initial=0.0) <= tol.tol_alg)


def is_unitary(u, tol: Tolerances = DEFAULT_TOL) -> bool:
    op = as_operator(u)
    eye = np.eye(op.shape[0])
    return bool(np.max(np.abs(dagger(op) @ op - eye), initial=0.0) <= tol.tol_alg)


def require_hermitian(x, name: str = "operator", tol: Tolerances = DEFAULT_TOL):
    if not is_hermitian(x, tol):
        raise NotHermitianError(f"{name} is not Hermitian")


def _check_same_dim(x: np.ndarray, y: np.ndarray):
    if x.shape[-1] != y.shape[-1]:
        raise DimensionError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")


def tensor(x, y) -> np.ndarray:
    """Kronecker product; works for operators and state vectors alike."""
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def expectation(x, s) -> complex:
    op, st = as_operator(x), np.asarray(s, dtype=complex)
    _check_same_dim(op, st)
    return complex(np.vdot(st, op @ st))


def commutator(x, y) -> np.ndarray:
    x, y = as_operator(x), as_operator(y)
    _check_same_dim(x, y)
    return x @ y - y @ x


def anticommutator(x, y) -> np.ndarray:
    x, y = as_operator(x), as_operator(y)
    _check_same_dim(x, y)
    return x @ y + y @ x


def clamp_sqrt(radicand: float, tol: Tolerances = DEFAULT_TOL) -> float:
    if radicand < -tol.tol_alg:
        raise NumericalFault(f"negative radicand {radicand!r}")
    return float(np.sqrt(max(radicand, 0.0)))


def rms(x, s) -> float:
    """<s|X^2|s>^(1/2) for Hermitian X, evaluated as the norm of X|s>."""
    op, st = as_operator(x), np.asarray(s, dtype=complex)
    _check_same_dim(op, st)
    return float(np.linalg.norm(op @ st))


def dispersion(x, s, tol: Tolerances = DEFAULT_TOL) -> float:
    """Standard deviation (<X^2> - <X>^2)^(1/2) of a Hermitian X in state s.

    Computed as the norm of (X - <X>)|s>, which equals the square root of
    the variance but does not lose digits when the variance is tiny.
    """
    op = as_operator(x)
    require_hermitian(op, tol=tol)
    st = np.asarray(s, dtype=complex)
    _check_same_dim(op, st)
    mean = expectation(op, st).real
    return float(np.linalg.norm(op @ st - mean * st))


def polarization_terms(acal, s1, s2) -> tuple[complex, complex]:
    """Return (reconstructed, direct) values of <s1|Acal|s2>.

    The reconstruction uses only diagonal matrix elements of Acal on the four
    combinations s1 + s2, s1 - s2, s1 + i s2, s1 - i s2.
    """
    op = as_operator(acal)
    a, b = np.asarray(s1, dtype=complex), np.asarray(s2, dtype=complex)
    _check_same_dim(op, a)
    _check_same_dim(op, b)

    def diag(v):
        return np.vdot(v, op @ v)

    recon = 0.25 * (
        diag(a + b) - diag(a - b) - 1j * diag(a + 1j * b) + 1j * diag(a - 1j * b)
    )
    return complex(recon), complex(np.vdot(a, op @ b))


def polarization_check(acal, s1, s2) -> float:
    recon, direct = polarization_terms(acal, s1, s2)
    return abs(recon - direct)


def projectors_of(x, tol: Tolerances = DEFAULT_TOL) -> list[tuple[float, np.ndarray]]:
    """Spectral decomposition of a Hermitian operator.

    Eigenvalues within DEGENERACY_GAP of each other share one projector.
    Returned in increasing eigenvalue order.
    """
    op = as_operator(x)
    require_hermitian(op, tol=tol)
    vals, vecs = np.linalg.eigh(op)
    groups: list[list[int]] = []
    for k, v in enumerate(vals):
        if groups and v - vals[groups[-1][-1]] < DEGENERACY_GAP:
            groups[-1].append(k)
        else:
            groups.append([k])
    out = []
    for idx in groups:
        basis = vecs[:, idx]
        out.append((float(np.mean(vals[idx])), basis @ dagger(basis)))
    return out


def operator_norm(x) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(as_operator(x), ord=2))
