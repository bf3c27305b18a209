"""Exception hierarchy shared by all modalenergy modules."""


class ModalEnergyError(Exception):
    """Base class for every error raised by this package."""


class InvalidModel(ModalEnergyError):
    """Model data violates a structural invariant (shape, schema, sign)."""


class NonFinite(ModalEnergyError):
    """A matrix or state contains NaN/Inf entries, or a computation overflowed."""


class DimensionMismatch(ModalEnergyError):
    """Operands have incompatible shapes."""


class SingularM(InvalidModel):
    """An inertia entry is zero or negative, so M cannot be inverted."""


class SingularP(ModalEnergyError):
    """The energy weight is not positive definite where an inverse is required."""


class RefusedIndefiniteP(ModalEnergyError):
    """Physical energy requested on a model whose weight is flagged indefinite."""


class NearZeroState(ModalEnergyError):
    """The state vector is too small to normalize against."""


class ZeroMatrix(ModalEnergyError):
    """The state matrix has zero Frobenius norm."""


class DefectiveMatrix(ModalEnergyError):
    """Left/right eigenvectors collapse onto each other; no modal expansion exists."""

    def __init__(self, mode_index: int, alignment: float):
        self.mode_index = mode_index
        self.alignment = alignment
        super().__init__(
            f"mode {mode_index} is numerically defective: "
            f"|u^T v| = {alignment:.3e} for unit-norm eigenvectors"
        )
