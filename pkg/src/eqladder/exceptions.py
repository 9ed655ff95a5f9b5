"""Exception hierarchy.

Every error carries an ``exit_code`` that the command-line front-end returns
unchanged, so scripts can tell failure kinds apart without parsing text.
"""


class LadderError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(LadderError, ValueError):
    """Input could not be read or does not satisfy its schema."""

    exit_code = 2


class ParseError(ValidationError):
    """Malformed file, row, or field."""


class InvalidConfig(ValidationError):
    """Ladder or pipeline configuration violates its invariants."""


class InvalidSpec(ValidationError):
    """Synthetic corpus specification violates its invariants."""


class EmptyIntersection(LadderError):
    """Reference and proposed ladder sets share no sequence."""

    exit_code = 3


class IncompleteGrid(ValidationError):
    """A (sequence, resolution) group is missing a CRF point."""

    exit_code = 4

    def __init__(self, holes):
        self.holes = list(holes)
        shown = ", ".join(f"({s}, {r}, crf={_num(c)})" for s, r, c in self.holes[:5])
        more = f" (+{len(self.holes) - 5} more)" if len(self.holes) > 5 else ""
        super().__init__(f"missing measurement(s): {shown}{more}")


class DuplicateKey(ValidationError):
    exit_code = 5


class NonPositiveValue(ValidationError):
    exit_code = 6


class EmptyCorpus(ValidationError):
    exit_code = 7


class InterpolationError(LadderError, ValueError):
    exit_code = 8


class TooFewKnots(InterpolationError):
    pass


class NonIncreasingX(InterpolationError):
    pass


class OutOfRange(InterpolationError):
    """Evaluation requested outside the knot range; extrapolation is disabled."""


class FrontError(LadderError, ValueError):
    exit_code = 9


class EmptyInput(FrontError):
    pass


class MixedSequences(FrontError):
    pass


class EmptyFront(FrontError):
    pass


class ComparisonError(LadderError, ValueError):
    exit_code = 10


class NoComparableRungs(ComparisonError):
    pass


class MethodMismatch(ComparisonError):
    pass


class MonotonicityWarning(UserWarning):
    """Quality rises or bitrate fails to fall as CRF increases within one group."""


class SchemaWarning(UserWarning):
    """Input carries columns the schema does not know about."""


class ClampWarning(UserWarning):
    """An interpolated sample left its admissible range and was clamped."""


def _num(x):
    return f"{x:g}" if isinstance(x, float) else str(x)
