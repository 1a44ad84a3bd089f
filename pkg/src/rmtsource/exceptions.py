"""Custom exceptions for rmtsource.

Every package error carries the process exit code the CLI reports for it:
2 for invalid input, 3 for a numerical check that failed or could not be
carried out.
"""

EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class RMTSourceError(Exception):
    """Base exception for all rmtsource errors."""

    def __init__(self, message: str, exit_code: int = EXIT_NUMERICAL) -> None:
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class InvalidParameterError(RMTSourceError, ValueError):
    """Raised when an argument violates an operation's precondition."""

    def __init__(self, message: str = "Invalid parameter") -> None:
        super().__init__(message, exit_code=EXIT_INVALID)


class ConfigError(RMTSourceError):
    """Raised for malformed configuration files or unknown keys."""

    def __init__(self, message: str = "Invalid configuration") -> None:
        super().__init__(message, exit_code=EXIT_INVALID)


class NumericalError(RMTSourceError):
    """Base class for numerical failures (exit code 3)."""

    def __init__(self, message: str = "Numerical failure") -> None:
        super().__init__(message, exit_code=EXIT_NUMERICAL)


class NonConvergenceError(NumericalError):
    """Raised when a series or iteration hits its term/iteration limit."""

    def __init__(self, what: str, iterations: int) -> None:
        self.what = what
        self.iterations = iterations
        super().__init__(f"{what} did not converge after {iterations} iterations")


class ScaledOverflowError(NumericalError):
    """Raised when a log-scaled value cannot be decoded to a double."""

    def __init__(self, log_abs: float) -> None:
        self.log_abs = log_abs
        super().__init__(f"Value with log-modulus {log_abs:.6g} leaves double range")


class PochhammerPoleError(NumericalError):
    """Raised when a generalized Pochhammer symbol vanishes in a denominator."""

    def __init__(self, c: float, row: int) -> None:
        self.c = c
        self.row = row
        super().__init__(f"Generalized Pochhammer symbol vanishes for c={c} in row {row}")


class BracketFailureError(NumericalError):
    """Raised when a secular root escapes its bracketing interval."""

    def __init__(self, message: str = "Secular root left its bracket") -> None:
        super().__init__(message)


class InterlacingError(NumericalError):
    """Raised when secular roots fail to interlace the poles."""

    def __init__(self, step: int) -> None:
        self.step = step
        super().__init__(f"Interlacing violated at recursion step {step}")


class TraceIdentityError(NumericalError):
    """Raised when the roots do not sum to the poles plus the new diagonal entry."""

    def __init__(self, step: int, defect: float) -> None:
        self.step = step
        self.defect = defect
        super().__init__(f"Trace identity violated at step {step} (defect {defect:.3e})")


class CancellationError(NumericalError):
    """Raised when a quadrature sum cancels beyond the usable precision."""

    def __init__(self, ratio: float) -> None:
        self.ratio = ratio
        super().__init__(f"Quadrature cancellation ratio {ratio:.3e} exceeds 1e12")


class ImaginaryResidueError(NumericalError):
    """Raised when a nominally real quadrature keeps an imaginary part."""

    def __init__(self, residue: float) -> None:
        self.residue = residue
        super().__init__(f"Imaginary residue {residue:.3e} above tolerance")


class HermiteTableLimitError(NumericalError):
    """Raised when an expansion needs Hermite degrees past the table limit."""

    def __init__(self, degree: int, limit: int) -> None:
        self.degree = degree
        self.limit = limit
        super().__init__(f"Hermite degree {degree} exceeds table limit {limit}")


class JackDegreeError(NumericalError):
    """Raised when a partition weight exceeds the Jack engine's degree limit."""

    def __init__(self, degree: int, limit: int) -> None:
        self.degree = degree
        self.limit = limit
        super().__init__(f"Partition weight {degree} exceeds Jack degree limit {limit}")


class EigenResidualError(NumericalError):
    """Raised when an eigendecomposition fails its residual post-check."""

    def __init__(self, residual: float) -> None:
        self.residual = residual
        super().__init__(f"Eigen residual {residual:.3e} exceeds 1e-10 of the matrix norm")


class CheckFailedError(RMTSourceError):
    """Raised when a verification ran to completion but did not pass."""

    def __init__(self, message: str = "Verification failed") -> None:
        super().__init__(message, exit_code=EXIT_NUMERICAL)
