"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
command line front end can report failures in a stable format.
"""


class ErgophaseError(Exception):
    """Base class for all library errors."""

    #: exit status used by the CLI when this error escapes a computation
    exit_status = 1

    @property
    def code(self):
        return type(self).__name__


class InputError(ErgophaseError):
    """Bad user input: malformed files, inconsistent shapes, invalid objects."""

    exit_status = 2


class DimensionMismatch(InputError):
    pass


class NotHermitian(InputError):
    pass


class NotUnitary(InputError):
    pass


class NotNormalized(InputError):
    pass


class ParseError(InputError):
    """Malformed input file; ``line`` and ``column`` locate the problem when known."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(InputError):
    pass


class GridMismatch(InputError):
    pass


class UnmatchedPairs(InputError):
    pass


class InvalidGeometry(InputError):
    pass


class NonpositiveTime(InputError):
    pass


class ConvergenceFailure(ErgophaseError):
    pass


class SingularCondition(ErgophaseError):
    """Vanishing overlap in a denominator (orthogonal pre/post selection)."""


class ZeroProbability(ErgophaseError):
    pass


class GridTooCoarse(ErgophaseError):
    pass


class GridTooNarrow(ErgophaseError):
    pass


class KernelTruncated(ErgophaseError):
    pass


class DegenerateUpdate(ErgophaseError):
    pass


class ZeroNorm(ErgophaseError):
    pass


class NoCrossing(ErgophaseError):
    """No classical arrival time exists (classically forbidden connection)."""


class DegenerateEnergies(ErgophaseError):
    pass


class WindowCrossesZero(InputError):
    """Averaging window reaches t <= 0."""


class WidthTooLarge(InputError):
    """Stationary width too large for the window (Delta t / T above the limit)."""


class NotTunneling(InputError):
    """Energy not below the barrier."""


class TailNotConverged(ErgophaseError):
    pass
