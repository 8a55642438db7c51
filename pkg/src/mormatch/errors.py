"""Exception hierarchy.

Every error class carries a distinct, stable ``exit_code`` used by the
command-line interface. Code 2 is left to argparse usage errors.
"""


class MorError(Exception):
    """Base class for all errors raised by :mod:`mormatch`."""

    exit_code = 1


class ParseError(MorError):
    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


class SpecError(MorError):
    """Malformed or incomplete reduction specification."""

    exit_code = 4


class SingularResolvent(MorError):
    """``sI - A`` is numerically singular at the requested point."""

    exit_code = 5


class ConvergenceFailure(MorError):
    exit_code = 6


class BadDegree(MorError):
    exit_code = 7


class InvalidInterpolationData(MorError):
    exit_code = 8


class NotConjugateClosed(InvalidInterpolationData):
    exit_code = 9


class ObservabilityFailure(MorError):
    exit_code = 10


class DuplicateFrequency(MorError):
    exit_code = 11


class SpectraOverlap(MorError):
    exit_code = 12


class IllConditioned(MorError):
    exit_code = 13


class PlacementFailure(MorError):
    exit_code = 14


class UnstableA(MorError):
    exit_code = 15


class StepTooLarge(MorError):
    exit_code = 16


class SingularShift(MorError):
    exit_code = 17


class RankDeficient(MorError):
    exit_code = 18


class DimensionMismatch(MorError):
    exit_code = 19


class NotAdmissible(MorError):
    exit_code = 20

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class RankDeficientX(MorError):
    exit_code = 21


class ZeroAtOrigin(MorError):
    exit_code = 22


class PoleAtOrigin(MorError):
    exit_code = 23


class EmbeddingFailure(MorError):
    exit_code = 24


class VerificationFailed(MorError):
    """A method-specific guarantee was not met within tolerance."""

    exit_code = 30


def all_error_classes():
    """Return every concrete error class, base first."""
    seen = []
    stack = [MorError]
    while stack:
        cls = stack.pop(0)
        seen.append(cls)
        stack.extend(cls.__subclasses__())
    return seen
