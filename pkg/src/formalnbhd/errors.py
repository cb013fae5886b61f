"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`FormalNeighbourhoodError`.  Errors that describe bad user input
(files, expressions, parameters) also derive from :class:`InputError`,
which the command line maps to exit status 2.
"""

from __future__ import annotations

from typing import Any


class FormalNeighbourhoodError(Exception):
    """Base class; ``payload`` carries structured witness data."""

    def __init__(self, message: str, **payload: Any) -> None:
        super().__init__(message)
        self.message = message
        self.payload = payload

    def to_dict(self) -> dict:
        out = {"error": type(self).__name__, "message": self.message}
        if self.payload:
            out["details"] = self.payload
        return out


class InputError(FormalNeighbourhoodError):
    """Malformed or inconsistent user input."""


# -- series ----------------------------------------------------------------
class ShapeMismatchError(InputError):
    """Operands live in different series rings."""


class NonInvertibleDenominatorError(FormalNeighbourhoodError):
    """A substitution makes a coefficient denominator vanish identically."""


class AdaptednessError(InputError):
    """A normal component has a nonzero restriction to S."""


class NotAUnitError(InputError):
    """Division by a series whose restriction to S is zero."""


# -- parsing -----------------------------------------------------------------
class ExpressionSyntaxError(InputError):
    """Malformed expression; ``offset`` is the 0-based position."""

    def __init__(self, message: str, offset: int, **payload: Any) -> None:
        super().__init__(f"{message} at offset {offset}", offset=offset, **payload)
        self.offset = offset


class UnknownVariableError(InputError):
    pass


class SchemaError(InputError):
    """Atlas, cochain or parameter document does not follow the schema."""


# -- atlas -------------------------------------------------------------------
class InvertibilityError(InputError):
    """Singular restricted Jacobian, or supplied inverses disagree."""


class NeedsInverseError(InputError):
    """No closed-form inverse of the tangential map; supply both directions."""


class MissingTransitionError(InputError):
    pass


class TripleInconsistencyError(InputError):
    """A declared triple fails the cocycle condition."""


# -- obstructions --------------------------------------------------------------
class TruncationInsufficientError(InputError):
    """The requested order needs a larger truncation order K."""


class OrderError(FormalNeighbourhoodError):
    """Precondition on lower-order conditions not met."""


class KindMismatchError(InputError):
    """Cochain role/order incompatible with the cocycle or operation."""


class NotNormalizableError(FormalNeighbourhoodError):
    """The supplied cochain does not bound the obstruction cocycle."""


class NonInvertibleFrameError(InputError):
    pass


# -- curves / gallery -----------------------------------------------------------
class NotApplicableError(InputError):
    pass


class UnknownGalleryItemError(InputError):
    pass
