"""
Exception hierarchy of ontolab.

Every error raised on purpose by the package derives from :class:`OntolabError`.
Most classes also derive from the builtin that best describes them, so
``except ValueError`` keeps working for callers that do not know about ontolab.
"""


class OntolabError(Exception):
    """Root of all ontolab errors."""


class DimensionMismatch(OntolabError, ValueError):
    """Two objects that must share a Hilbert-space or ontic dimension do not."""


class InvariantViolation(OntolabError, ValueError):
    """A constructed object violates one of its invariants.

    Parameters
    ----------
    field : str
        Name (or JSON path) of the offending field.
    message : str
        Description of the violated bound.
    """

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")

    def at(self, prefix):
        """Return a copy whose field is prefixed with ``prefix``."""
        return InvariantViolation(f"{prefix}.{self.field}", self.message)


class ConstructionInvalid(OntolabError, RuntimeError):
    """A built-in construction failed its own verification."""


class UnknownPreparation(OntolabError, KeyError):
    """No preparation with the requested label exists in the model."""


class UnknownResponse(OntolabError, IndexError):
    """The requested response table index is out of range."""


class SizeOverflow(OntolabError, ValueError):
    """A product ontic space would exceed the configured size cap."""


class PsiEpistemicInput(OntolabError, ValueError):
    """The supports of two distinct-ray preparations overlap.

    Parameters
    ----------
    pair : tuple of str
        Labels of the offending preparations.
    mass : float
        Total-variation overlap Σ min(μ_i, μ_j) of the pair.
    """

    def __init__(self, pair, mass):
        self.pair = tuple(pair)
        self.mass = float(mass)
        super().__init__(
            f"preparations {self.pair[0]!r} and {self.pair[1]!r} have overlapping "
            f"supports (overlap mass {self.mass:.6g})"
        )


class InconsistentLabelMap(OntolabError, ValueError):
    """A label map does not fit the model it is applied to."""


class NotProductPreparation(OntolabError, ValueError):
    """A composite model lacks product structure in its space or preparations."""


class ScenarioMismatch(OntolabError, LookupError):
    """A composite model does not contain the preparations of a PBR scenario."""


class MissingPreparation(OntolabError, LookupError):
    """A single-system model lacks a preparation required by an experiment."""


class DomainError(OntolabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OutsideHemisphere(DomainError):
    """A state lies outside the open hemisphere R₀ around |0⟩."""


class ParseError(OntolabError, ValueError):
    """A model file is not valid JSON."""


class SchemaError(OntolabError, ValueError):
    """A model file does not follow the model-file schema."""
