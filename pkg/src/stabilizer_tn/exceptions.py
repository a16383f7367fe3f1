"""Exception hierarchy shared by all modules."""


class StabilizerTNError(Exception):
    """Base class for every error raised by this package."""


class InvalidSizeError(StabilizerTNError, ValueError):
    """Mismatched or invalid qubit counts, row indices or vector lengths."""


class CapacityError(StabilizerTNError):
    """A dense operation was requested on too many qubits."""


class UnsupportedGateError(StabilizerTNError, ValueError):
    """The requested gate has no two-term decomposition we can handle."""


class InvalidObservableError(StabilizerTNError, ValueError):
    """Observable is not Hermitian, or is the identity."""


class ImpossibleOutcomeError(StabilizerTNError):
    """A forced measurement outcome has (numerically) zero probability."""


class InternalConsistencyError(StabilizerTNError, AssertionError):
    """Raised when an internal bookkeeping identity fails; indicates a bug."""
