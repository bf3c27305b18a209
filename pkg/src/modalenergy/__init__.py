"""Modal energy definitions for linear state-space systems.

Compute, compare, and sanity-check four notions of per-mode energy for
xdot = A x with an optional SPD weight P, quantify how far A is from
(P-weighted) normality, and build/simulate linearized swing-equation models.
"""

from .errors import (
    DefectiveMatrix,
    DimensionMismatch,
    InvalidModel,
    ModalEnergyError,
    NearZeroState,
    NonFinite,
    RefusedIndefiniteP,
    SingularM,
    SingularP,
    ZeroMatrix,
)
from .model import (
    Disturbance,
    StateSpaceModel,
    SwingParams,
    ValidationReport,
    build_swing_system,
    load_model,
    load_swing,
    model_from_dict,
    model_to_dict,
    swing_from_dict,
    validate_model,
)
from .spectral import (
    EigenBasis,
    decompose,
    modal_projection,
    participation_matrix,
    projection_matrix,
    residual_norms,
)
from .energy import (
    EnergyKind,
    EnergyReport,
    MethodKind,
    cross_energy,
    energy_report,
    modal_energy,
    modal_power,
    moving_frame,
    normality_index,
    sharp_adjoint,
    sharp_commutator,
    sum_error_pct,
    total_energy,
    total_power,
    weight_for,
)
from .simulate import (
    EnergyTable,
    TimeGrid,
    Trajectory,
    energy_timeseries,
    modal_trajectory,
    propagate,
)

__version__ = "0.1.0"

__all__ = [
    "DefectiveMatrix",
    "DimensionMismatch",
    "Disturbance",
    "EigenBasis",
    "EnergyKind",
    "EnergyReport",
    "EnergyTable",
    "InvalidModel",
    "MethodKind",
    "ModalEnergyError",
    "NearZeroState",
    "NonFinite",
    "RefusedIndefiniteP",
    "SingularM",
    "SingularP",
    "StateSpaceModel",
    "SwingParams",
    "TimeGrid",
    "Trajectory",
    "ValidationReport",
    "ZeroMatrix",
    "build_swing_system",
    "cross_energy",
    "decompose",
    "energy_report",
    "energy_timeseries",
    "load_model",
    "load_swing",
    "modal_energy",
    "modal_power",
    "modal_projection",
    "modal_trajectory",
    "model_from_dict",
    "model_to_dict",
    "moving_frame",
    "normality_index",
    "participation_matrix",
    "projection_matrix",
    "propagate",
    "residual_norms",
    "sharp_adjoint",
    "sharp_commutator",
    "sum_error_pct",
    "swing_from_dict",
    "total_energy",
    "total_power",
    "validate_model",
    "weight_for",
]
