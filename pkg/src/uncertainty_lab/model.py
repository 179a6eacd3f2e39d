"""Measurement models: a unitary interaction on system (x) apparatus.

All models are unitary-generated.  Output operators are produced in the
Heisenberg picture, ``X_out = U^dag X U``, evaluated on the product state
``psi (x) xi``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .operators import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    as_operator,
    as_state,
    dagger,
    is_unitary,
    projectors_of,
    require_hermitian,
    sigma_phi,
    tensor,
)


class MissingPointerError(KeyError):
    pass


@dataclass(frozen=True)
class MeasurementModel:
    d_sys: int
    d_app: int
    xi: np.ndarray
    U: np.ndarray
    pointers: dict[str, np.ndarray] = field(default_factory=dict)
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if self.d_sys < 1 or self.d_app < 1:
            raise DimensionError("dimensions must be positive")
        xi = as_state(self.xi, self.d_app, self.tol)
        U = as_operator(self.U, self.d_sys * self.d_app)
        if not is_unitary(U, self.tol):
            raise ValueError("interaction U is not unitary")
        pointers = {}
        for label, op in self.pointers.items():
            op = as_operator(op, self.d_app)
            require_hermitian(op, f"pointer {label!r}", self.tol)
            pointers[label] = _frozen(op)
        object.__setattr__(self, "xi", _frozen(xi))
        object.__setattr__(self, "U", _frozen(U))
        object.__setattr__(self, "pointers", pointers)

    @property
    def dim(self) -> int:
        return self.d_sys * self.d_app

    def has_pointer(self, label: str) -> bool:
        return label in self.pointers

    def joint_state(self, psi) -> np.ndarray:
        """psi (x) xi."""
        return tensor(as_state(psi, self.d_sys, self.tol), self.xi)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def heisenberg_out(model: MeasurementModel, x_total) -> np.ndarray:
    x = as_operator(x_total, model.dim)
    return dagger(model.U) @ x @ model.U


def pointer_out(model: MeasurementModel, label: str) -> np.ndarray:
    if label not in model.pointers:
        raise MissingPointerError(f"model has no pointer {label!r}")
    return heisenberg_out(model, tensor(np.eye(model.d_sys), model.pointers[label]))


def m_out(model: MeasurementModel) -> np.ndarray:
    return pointer_out(model, "M")


def n_out(model: MeasurementModel) -> np.ndarray:
    return pointer_out(model, "N")


def b_out(model: MeasurementModel, B) -> np.ndarray:
    B = as_operator(B, model.d_sys)
    require_hermitian(B, "B", model.tol)
    return heisenberg_out(model, tensor(B, np.eye(model.d_app)))


def lift(model: MeasurementModel, A) -> np.ndarray:
    """A (x) 1 on the joint space."""
    return tensor(as_operator(A, model.d_sys), np.eye(model.d_app))


# -- constructions -----------------------------------------------------------


def _shift(d: int) -> np.ndarray:
    """Cyclic shift |j> -> |j+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def projective_unitary(A, d_app: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Controlled-shift unitary sum_k P_k (x) S^k for a Hermitian A.

    Spectral projectors are taken in decreasing eigenvalue order, so the
    k-th distinct eigenvalue is written to apparatus level |k>.  Returns the
    unitary and the pointer diag(eigenvalues) that reads it out.
    """
    spectrum = projectors_of(A)[::-1]
    k = len(spectrum)
    d_app = max(k, 2) if d_app is None else d_app
    if d_app < k:
        raise DimensionError(f"apparatus dim {d_app} < {k} distinct eigenvalues")
    shift = _shift(d_app)
    U = sum(tensor(P, np.linalg.matrix_power(shift, j)) for j, (_, P) in enumerate(spectrum))
    values = np.zeros(d_app)
    values[:k] = [v for v, _ in spectrum]
    return np.asarray(U, dtype=complex), np.diag(values).astype(complex)


def build_projective(A, d_app: int | None = None) -> MeasurementModel:
    """Precise projective measurement of A with xi = |0> and a diagonal pointer."""
    A = as_operator(A)
    U, pointer = projective_unitary(A, d_app)
    xi = np.zeros(pointer.shape[0], dtype=complex)
    xi[0] = 1.0
    return MeasurementModel(A.shape[0], pointer.shape[0], xi, U, {"M": pointer})


def build_projective_spin(phi: float) -> MeasurementModel:
    """Spin-1/2 measured along sigma_phi = cos(phi) sx + sin(phi) sy.

    U = P+(phi) (x) 1 + P-(phi) (x) X, xi = |0>, pointer sz.
    """
    return build_projective(sigma_phi(phi), d_app=2)


def build_noisy_unbiased(A, noise_pointer, xi, tol: Tolerances = DEFAULT_TOL) -> MeasurementModel:
    """Unbiased noisy measurement with M_out = A (x) 1 + 1 (x) noise.

    The apparatus is a copy register R (dim d_sys, prepared in |0>) times the
    noise register K (prepared in xi).  U swaps the system with R and the
    pointer is A_R (x) 1 + 1 (x) noise_K, so conjugating gives exactly
    A (x) 1_R (x) 1 + 1 (x) 1_R (x) noise.
    """
    A = as_operator(A)
    require_hermitian(A, "A", tol)
    noise = as_operator(noise_pointer)
    require_hermitian(noise, "noise pointer", tol)
    xi = as_state(xi, noise.shape[0], tol)
    mean = np.vdot(xi, noise @ xi)
    if abs(mean) > tol.tol_alg:
        raise ValueError(f"noise pointer has nonzero mean {mean.real!r} in xi")

    d, k = A.shape[0], noise.shape[0]
    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[j * d + i, i * d + j] = 1.0
    U = tensor(swap, np.eye(k))
    pointer = tensor(A, np.eye(k)) + tensor(np.eye(d), noise)
    reg0 = np.zeros(d, dtype=complex)
    reg0[0] = 1.0
    return MeasurementModel(d, d * k, tensor(reg0, xi), U, {"M": pointer}, tol)


def dilate_instrument(kraus: list[np.ndarray], pointers: dict[str, np.ndarray]) -> MeasurementModel:
    """Unitary dilation of a measurement with Kraus operators K_j.

    The isometry psi -> sum_j K_j psi (x) |j> fixes the columns of U on the
    xi = |0> sector; the remaining columns are an orthonormal complement.
    Pointer matrices act on the d_app = len(kraus) outcome register.
    """
    d = kraus[0].shape[0]
    n = len(kraus)
    dim = d * n
    isometry = np.zeros((dim, d), dtype=complex)
    for j, K in enumerate(kraus):
        isometry[j::n, :] = K
    if not np.allclose(dagger(isometry) @ isometry, np.eye(d), atol=1e-12):
        raise ValueError("Kraus operators do not sum to the identity")
    complement = scipy.linalg.null_space(dagger(isometry))
    U = np.zeros((dim, dim), dtype=complex)
    sector = [i * n for i in range(d)]
    rest = [c for c in range(dim) if c % n != 0]
    U[:, sector] = isometry
    U[:, rest] = complement
    xi = np.zeros(n, dtype=complex)
    xi[0] = 1.0
    return MeasurementModel(d, n, xi, U, dict(pointers))


def build_joint_unbiased_spin() -> MeasurementModel:
    """Joint unbiased measurement of sx (pointer M) and sy (pointer N).

    Four outcomes (a, b) in {+1,-1}^2 with effects (1 + (a sx + b sy)/sqrt2)/4
    and pointer values sqrt2*a, sqrt2*b, so <M_out> = <sx> and <N_out> = <sy>
    for every system state; [M, N] = 0 on the apparatus.
    """
    signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    kraus = []
    for a, b in signs:
        # rank-one effect: half the projector onto the Bloch vector (a, b, 0)/sqrt2
        n_op = (a * sigma_phi(0.0) + b * sigma_phi(np.pi / 2)) / np.sqrt(2)
        proj = 0.5 * (np.eye(2) + n_op)
        kraus.append(proj / np.sqrt(2))
    root2 = np.sqrt(2)
    M = np.diag([root2 * a for a, _ in signs]).astype(complex)
    N = np.diag([root2 * b for _, b in signs]).astype(complex)
    return dilate_instrument(kraus, {"M": M, "N": N})


def identity_model(d_sys: int, xi, pointers: dict[str, np.ndarray]) -> MeasurementModel:
    xi = np.asarray(xi, dtype=complex)
    return MeasurementModel(d_sys, xi.shape[0], xi, np.eye(d_sys * xi.shape[0]), pointers)


# -- JSON layout ---------------------------------------------------------------


def _pairs(a: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.ravel(a)]


def _unpairs(pairs, shape) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in pairs], dtype=complex)
    return arr.reshape(shape)


def model_to_dict(model: MeasurementModel) -> dict:
    return {
        "d_sys": model.d_sys,
        "d_app": model.d_app,
        "xi": _pairs(model.xi),
        "U": _pairs(model.U),
        "pointers": {k: _pairs(v) for k, v in model.pointers.items()},
    }


def model_from_dict(doc: dict, tol: Tolerances = DEFAULT_TOL) -> MeasurementModel:
    ds, da = int(doc["d_sys"]), int(doc["d_app"])
    return MeasurementModel(
        ds,
        da,
        _unpairs(doc["xi"], (da,)),
        _unpairs(doc["U"], (ds * da, ds * da)),
        {k: _unpairs(v, (da, da)) for k, v in doc.get("pointers", {}).items()},
        tol,
    )


def save_model(model: MeasurementModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1))


def load_model(path, tol: Tolerances = DEFAULT_TOL) -> MeasurementModel:
    return model_from_dict(json.loads(Path(path).read_text()), tol)


def operator_from_doc(doc) -> np.ndarray:
    """Square matrix given as nested rows of numbers or [re, im] pairs."""
    rows = [[complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in row] for row in doc]
    return as_operator(np.array(rows, dtype=complex))
