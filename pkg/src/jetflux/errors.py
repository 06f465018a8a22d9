"""Exception types shared across the package."""


class JetfluxError(Exception):
    """Base class for all package errors."""


class ExprSyntaxError(JetfluxError):
    """Raised on malformed expression text; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownIdentifierError(JetfluxError):
    """An identifier in expression text is not declared in the signature."""


class DivisionByExprError(JetfluxError):
    """Division is only defined by coefficient-valued (jet-free) expressions."""


class ExponentError(JetfluxError):
    """Invalid exponent: wrong constants, negative power of a jet, or a
    non-integer-linear form where an exponent was required."""


class PoleError(JetfluxError):
    """A coefficient denominator vanished under the given assignment."""


class MissingAssignmentError(JetfluxError):
    """Evaluation point lacks a value for some atom, constant or function."""


class NameCollisionError(JetfluxError):
    """A fresh name (field, parameter, auxiliary) collides with the signature."""


class DerivativeOfParameterError(JetfluxError):
    """An equation depends on derivatives of a parameter slated for promotion."""


class NoSolvedFormError(JetfluxError):
    """An on-shell operation was requested on a system without solved rules."""


class NonTerminatingRuleError(JetfluxError):
    """A solved-form rule violates the termination ranking."""


class NotHomogeneousError(JetfluxError):
    """Expression is not homogeneous under the given scaling characteristic."""


class ZeroWeightError(JetfluxError):
    """Current reconstruction from homogeneity requires a nonzero weight."""


class DocumentError(JetfluxError):
    """A system document failed schema validation; message carries the key path."""
