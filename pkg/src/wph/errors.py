"""Exception types shared across the package."""


class WphError(Exception):
    """Base class for all errors raised by this package."""


class WrongRing(WphError):
    """An operation was asked to run over a ring it does not support."""


class ParseError(WphError):
    """A text input file could not be parsed; carries a line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(WphError):
    """An object failed validation; carries the individual violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnknownVertex(WphError):
    """A chain mentions a vertex that is not in the digraph."""


class VertexCollision(WphError):
    """Two chains that must have disjoint support share a vertex."""


class NonDisjointVertexSets(WphError):
    """A join was requested for digraphs with overlapping vertex ids."""

    def __init__(self, collisions):
        self.collisions = sorted(collisions)
        super().__init__("vertex ids present on both sides: " + ", ".join(self.collisions))


class InvalidMorphism(WphError):
    """A digraph morphism failed validation."""


class CertificateFailure(WphError):
    """An internal consistency certificate failed; indicates an engine bug."""


class MorphismLengthMismatch(WphError):
    """Two sequences that must advance in lockstep have different lengths."""
