"""Exception types shared across the package."""


class NcError(Exception):
    """Base class for all ncconvex errors."""


class SignatureError(NcError):
    """Operands disagree on variable arities, or a letter index is out of range."""


class ShapeError(NcError):
    """Matrix-valued object has an incompatible or non-square shape."""


class ParseError(NcError):
    """Expression text could not be parsed.

    Carries the 0-based offset of the offending character or token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class DomainError(NcError):
    """An argument lies outside the declared domain (interval, ball radius, ...)."""


class SingularityError(NcError):
    """Evaluation too close to a pole or an atom of the measure."""


class UnitarityError(NcError):
    """A matrix that must be unitary is not, within tolerance."""


class ExtractionError(NcError):
    """Slice-coefficient extraction was too ill-conditioned to trust."""


class ResourceLimitError(NcError):
    """An operation would exceed a hard resource cap (e.g. term count)."""
