"""Exception types shared across the package."""


class QesurfError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QesurfError):
    """A closed form was evaluated outside the domain of one of its factors."""


class ParseError(QesurfError):
    """A closed-form string could not be parsed."""


class DegenerateSampleError(QesurfError):
    """Rank estimation was unstable on the supplied sample set; resample."""


class SolverError(QesurfError):
    """The eigenspace solver hit an internal inconsistency."""


class PreconditionError(QesurfError):
    """Input violates a documented precondition of the routine."""


class RegistryIntegrityError(QesurfError):
    """A registry entry failed its residual self-check on load."""


class SchemaError(QesurfError):
    """A model description (JSON or dict) does not match the schema."""
