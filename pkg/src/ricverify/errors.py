"""Exception hierarchy.

Every error raised on purpose by the library derives from ``RicVerifyError``;
input-validation errors also derive from ``ValueError`` so callers that only
care about bad arguments can catch the builtin.
"""


class RicVerifyError(Exception):
    """Base class for all library errors."""


class NonSymmetric(RicVerifyError, ValueError):
    pass


class BadCount(RicVerifyError, ValueError):
    pass


class TooLarge(RicVerifyError, ValueError):
    pass


class NotOrthonormal(RicVerifyError, ValueError):
    pass


class NotUnit(RicVerifyError, ValueError):
    pass


class BadK(RicVerifyError, ValueError):
    pass


class BadData(RicVerifyError, ValueError):
    pass


class BadT(RicVerifyError, ValueError):
    pass


class InsufficientGrid(RicVerifyError, ValueError):
    pass


class BadModel(RicVerifyError, ValueError):
    pass


class BadDim(RicVerifyError, ValueError):
    pass


class OutOfDomain(RicVerifyError, ValueError):
    pass


class NonPositiveWarp(RicVerifyError, ValueError):
    pass


class BadParams(RicVerifyError, ValueError):
    pass


class NoBracket(RicVerifyError, ValueError):
    pass


class SlopeMismatch(RicVerifyError, ValueError):
    pass


class GuardViolated(RicVerifyError):
    """Curvature inequalities failed after a smoothing step; shrink the window."""


class DegenerateSlope(RicVerifyError, ValueError):
    pass


class BadLambda(RicVerifyError, ValueError):
    pass


class BendTooLarge(RicVerifyError, ValueError):
    pass


class WrongStage(RicVerifyError, ValueError):
    pass


class PipelineFailed(RicVerifyError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class SchemaError(RicVerifyError, ValueError):
    pass


class IoError(RicVerifyError, OSError):
    pass
