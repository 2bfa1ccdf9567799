"""Exception types shared across the package."""


class TomographyError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(TomographyError, ValueError):
    """An argument violates a documented precondition."""


class InvalidStateError(TomographyError, ValueError):
    """A matrix fails the density-matrix invariants (Hermitian/PSD/trace)."""


class DimensionMismatchError(InvalidArgumentError):
    """Operands have incompatible dimensions."""


class NotFoundError(TomographyError, KeyError):
    """A requested record (e.g. a measurement setting) is absent."""


class NumericalError(TomographyError):
    """A dense linear-algebra routine failed to converge."""


class DegenerateSolutionError(TomographyError):
    """The data-fit ball admits the zero matrix; the trace minimum is ~0."""


class InfeasibleError(TomographyError):
    """No PSD matrix satisfies the data-fit constraint."""


class FeasibilityUndeterminedError(TomographyError):
    """The feasibility probe hit its iteration limit before stabilizing."""


class MissingSettingError(TomographyError):
    """A target Pauli label cannot be estimated from the available settings."""


class UnsupportedError(TomographyError):
    """The operation is only implemented for a restricted parameter range."""
