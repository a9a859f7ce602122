"""Exception types shared across the package.

Two broad families matter for the CLI exit-code mapping: UsageError for
malformed specs, arguments, or input shapes, and PreconditionError for
violated mathematical preconditions (non-Hermitian input, indefinite Gram
matrices, failed range inclusions, and so on).
"""


class MercerKitError(Exception):
    """Base class for every error raised by this package."""


class UsageError(MercerKitError):
    """Malformed input: bad spec strings, shapes, or lookups."""


class KernelParseError(UsageError):
    """A kernel spec string could not be parsed."""


class ConfigError(UsageError):
    """Invalid runtime configuration (e.g. MERCERKIT_THREADS)."""


class DimensionMismatchError(UsageError):
    """Operands do not have compatible dimensions or lengths."""


class UnknownPointError(UsageError):
    """A tabulated kernel was evaluated at a point outside its table."""


class PreconditionError(MercerKitError):
    """A mathematical precondition of an operation is violated."""


class NonHermitianError(PreconditionError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class NotPositiveSemidefiniteError(PreconditionError):
    """A matrix expected to be PSD has a materially negative eigenvalue."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RangeInclusionError(PreconditionError):
    """range(T) is not contained in range(S); carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class FactorizationError(PreconditionError):
    """Inputs do not satisfy the identity a factorization relies on."""


class HostMismatchError(PreconditionError):
    """Elements or spaces built over different point sets were combined."""


class MeasureError(PreconditionError):
    """A discrete measure violates its invariants (weights, distinctness)."""


class DuplicatePointError(PreconditionError):
    """A point list that must be pairwise distinct contains a repeat."""
