"""Semantic exception and warning types shared across the package."""


class OrdinalCpsError(Exception):
    """Base class for all package errors."""


class ValidationError(OrdinalCpsError, ValueError):
    """An input violates a domain invariant (simplex, label range, ...)."""


class CalibrationError(OrdinalCpsError, RuntimeError):
    """Calibration cannot certify the required coverage count."""


class NotRadiallyMonotoneError(CalibrationError):
    """A calibration row fails the radial-monotonicity precondition."""

    def __init__(self, row_index: int):
        self.row_index = row_index
        super().__init__(
            f"row {row_index} is not radially monotone; "
            "the order-statistic calibration path requires it "
            "(use the binary-search path for general score matrices)"
        )


class DatasetFormatError(OrdinalCpsError, ValueError):
    """A dataset file is malformed; the message names row and reason."""


class PredictorFormatError(OrdinalCpsError, ValueError):
    """A predictor document is malformed or has an unknown format version."""


class ConservativeCalibrationWarning(UserWarning):
    """Target count exceeds the calibration size; result clamped to be safe."""
