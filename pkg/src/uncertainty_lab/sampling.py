"""Seeded random instances: states, Hermitian operators, Haar unitaries, models."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .model import MeasurementModel, build_projective
from .operators import normalize


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (g + g.conj().T) / 2


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_model(
    rng: np.random.Generator,
    sys_dims=(2, 3, 4),
    app_dims=(2, 3, 4),
    two_pointers: bool = False,
) -> MeasurementModel:
    """Haar-random interaction with a random apparatus state and pointer(s).

    With two_pointers the second pointer is a random polynomial in the first,
    so [M, N] = 0 as required for a joint measurement.
    """
    ds = int(rng.choice(sys_dims))
    da = int(rng.choice(app_dims))
    M = random_hermitian(da, rng)
    pointers = {"M": M}
    if two_pointers:
        c = rng.normal(size=3)
        pointers["N"] = c[0] * np.eye(da) + c[1] * M + c[2] * (M @ M)
    return MeasurementModel(ds, da, random_state(da, rng), haar_unitary(ds * da, rng), pointers)


def random_instance(rng: np.random.Generator, **kwargs):
    """(model, A, B, psi) with Hermitian A, B on the model's system."""
    model = random_model(rng, **kwargs)
    d = model.d_sys
    return model, random_hermitian(d, rng), random_hermitian(d, rng), random_state(d, rng)


def random_precise_instance(rng: np.random.Generator, sys_dims=(2, 3, 4)):
    """Projective (precise) measurement of a random A, with random B and psi."""
    d = int(rng.choice(sys_dims))
    A = random_hermitian(d, rng)
    model = build_projective(A)
    return model, A, random_hermitian(d, rng), random_state(d, rng)
