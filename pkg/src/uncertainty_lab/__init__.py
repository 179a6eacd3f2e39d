"""Heisenberg-picture measurement models and numerical checks of uncertainty relations."""
from .operators import KET, SX, SY, SZ, Tolerances
from .model import (
    MeasurementModel,
    build_joint_unbiased_spin,
    build_noisy_unbiased,
    build_projective,
    build_projective_spin,
)
from .quantities import QuantitySet, disturbance_eta, error_epsilon, quantity_set
from .relations import RelationId, RelationReport, evaluate, evaluate_all

__version__ = "0.1.0"
