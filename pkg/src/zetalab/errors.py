"""Exception hierarchy shared by all modules.

The CLI maps each family to an exit code: validation errors exit with 3,
numerical failures with 4.
"""


class ZetaLabError(Exception):
    """Base class for every error raised by zetalab."""


class DomainError(ZetaLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class DataValidationError(ZetaLabError):
    """Input data (zero files, configs) failed validation."""


class ZeroFileParseError(DataValidationError):
    def __init__(self, path, line_no, reason):
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{path}:{line_no}: {reason}")


class NumericalError(ZetaLabError):
    """A numerical procedure could not reach its accuracy target."""


class InsufficientSieveError(NumericalError, ValueError):
    pass


class InsufficientZerosError(NumericalError, ValueError):
    pass


class IncompleteZeroSetError(NumericalError):
    def __init__(self, interval, found, expected):
        self.interval = interval
        self.found = found
        self.expected = expected
        super().__init__(
            f"zero count mismatch on [{interval[0]:.6f}, {interval[1]:.6f}]: "
            f"found {found}, expected about {expected}"
        )


class PathThroughZeroError(NumericalError):
    """The integration path passes too close to a zero of zeta."""


class QuadratureError(NumericalError):
    def __init__(self, achieved, target):
        self.achieved = achieved
        self.target = target
        super().__init__(f"quadrature did not converge: achieved {achieved:.3e}, target {target:.3e}")
