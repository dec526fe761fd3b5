"""Exception types shared across the package."""


class QracError(Exception):
    """Base class for every error raised by qracsim."""


class DomainError(QracError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class NotHermitianError(QracError):
    """Matrix handed to a Hermitian-only routine is not Hermitian."""


class NotNormalizedError(QracError):
    """State vector does not have unit norm."""


class OutsideBlochBallError(QracError):
    """Bloch vector has length greater than one."""


class InvalidDensityMatrixError(QracError):
    """Matrix violates Hermiticity, unit trace or positivity."""


class NotTracePreservingError(QracError):
    """Channel-only operation received a trace-non-increasing map."""


class FilterAnnihilatesStateError(QracError):
    """Post-selection probability vanished; conditional statistics undefined.

    ``state_label`` names the offending encoded input (a0, a1) when the
    failure happened inside the protocol pipeline.
    """

    def __init__(self, message: str, state_label: tuple[int, int] | None = None):
        super().__init__(message)
        self.state_label = state_label


class MissingEntryError(QracError):
    """Probability table lacks one of the eight required cells."""


class NoSignChangeError(QracError):
    """Critical-noise solver could not bracket the classical bound."""


class CountDataError(QracError):
    """Base class for coincidence-count ingestion failures."""


class MissingCellError(CountDataError):
    """A required (a0, a1, y) cell is absent from the count records."""


class DuplicateCellError(CountDataError):
    """The same (a0, a1, y) cell appears more than once."""


class EmptyCellError(CountDataError):
    """A cell has zero total coincidence counts."""


class ExcessiveDiscardsError(QracError):
    """More than 1% of Monte Carlo samples hit a vanishing post-selection."""
