"""Exception hierarchy shared by the analysis, simulation and CLI layers.

Every error carries the process exit code the CLI uses when it escapes a
command: 2 for input/validation problems, 3 for connectivity, 4 for
divergence.
"""

from typing import Optional, Tuple


class SyncNetError(ValueError):
    """Base class for all domain failures"""

    exit_code = 2


class InvalidInput(SyncNetError):
    pass


class ConfigError(SyncNetError):
    pass


class ShapeMismatch(SyncNetError):
    pass


class NonFiniteMatrix(SyncNetError):
    pass


class SingularMatrix(SyncNetError):
    pass


class NotSymmetric(SyncNetError):
    pass


class NoConvergence(SyncNetError):
    pass


class NotMetzler(SyncNetError):
    def __init__(self, row: int, col: int, value: float):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(
            f"Off-diagonal entry ({row}, {col}) = {value} is negative; "
            "coupling matrix must be Metzler"
        )


class RowSumNonZero(SyncNetError):
    def __init__(self, row: int, residual: float):
        self.row = row
        self.residual = residual
        super().__init__(f"Row {row} sums to {residual}, expected zero row sum")


class AllGainsZero(SyncNetError):
    pass


class NotInKernel(SyncNetError):
    pass


class NotNormalized(SyncNetError):
    pass


class NotPositive(SyncNetError):
    pass


class NotNegativeDefinite(SyncNetError):
    pass


class ThetaUnresolvable(SyncNetError):
    pass


class NotStronglyConnected(SyncNetError):
    exit_code = 3


class NonFiniteState(SyncNetError):
    exit_code = 4


class Diverged(SyncNetError):
    exit_code = 4

    def __init__(self, t: float, detail: Optional[str] = None):
        self.t = t
        message = f"Simulation diverged at t={t}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


def exit_code_for(error: BaseException) -> int:
    """Map any exception to the CLI exit code"""
    if isinstance(error, SyncNetError):
        return error.exit_code
    return 2


__all__: Tuple[str, ...] = (
    "SyncNetError",
    "InvalidInput",
    "ConfigError",
    "ShapeMismatch",
    "NonFiniteMatrix",
    "SingularMatrix",
    "NotSymmetric",
    "NoConvergence",
    "NotMetzler",
    "RowSumNonZero",
    "AllGainsZero",
    "NotInKernel",
    "NotNormalized",
    "NotPositive",
    "NotNegativeDefinite",
    "ThetaUnresolvable",
    "NotStronglyConnected",
    "NonFiniteState",
    "Diverged",
    "exit_code_for",
)
