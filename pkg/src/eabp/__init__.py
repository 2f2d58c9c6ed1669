"""Evolution algebras of bisexual populations."""

from .algebra import (
    AlgebraElement,
    InheritanceTensor,
    ShapeError,
    StochasticityError,
    evolve,
    multiply,
    norm_l1,
    plenary_power,
    validate_tensor,
)
from .derivations import DerivationMatrix, derivation_basis, leibniz_residual
from .dynamics import classify_limit, trajectory, verify_xy_recurrence
from .properties import find_characters, property_suite
from .special import StochasticMatrixPair, absolute_nilpotents, classify_membership, expand_tensor, idempotents

__all__ = [
    "AlgebraElement",
    "InheritanceTensor",
    "ShapeError",
    "StochasticityError",
    "evolve",
    "multiply",
    "norm_l1",
    "plenary_power",
    "validate_tensor",
    "DerivationMatrix",
    "derivation_basis",
    "leibniz_residual",
    "classify_limit",
    "trajectory",
    "verify_xy_recurrence",
    "find_characters",
    "property_suite",
    "StochasticMatrixPair",
    "absolute_nilpotents",
    "classify_membership",
    "expand_tensor",
    "idempotents",
]
