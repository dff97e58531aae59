"""Exception hierarchy shared by all subdiv modules.

Validation errors mean the input data violates a structural contract;
solver errors mean a well-formed problem could not be solved.  The CLI
maps these groups to distinct exit codes.
"""


class SubdivError(Exception):
    """Base class for all subdiv errors."""


class ValidationError(SubdivError):
    """Structurally invalid input (CLI exit code 2)."""


class MalformedComplex(ValidationError):
    """Complex data fails a basic structural check."""


class DanglingEdge(ValidationError):
    """A face references an edge id that does not exist."""


class NonManifold(ValidationError):
    """An edge is used more than twice, or twice with the same orientation."""


class Disconnected(ValidationError):
    """The complex is not connected."""


class UnknownVertex(ValidationError):
    """A vertex id does not exist in the complex."""


class HasBoundary(ValidationError):
    """Operation requires a closed surface but the complex has boundary."""


class NotAnAnnulus(ValidationError):
    """The marked sub-complex is not a combinatorial annulus."""


class NotARing(ValidationError):
    """A ring marking was required but something else was supplied."""


class NotADisk(ValidationError):
    """The complex is not a combinatorial disk."""


class UnknownTileType(ValidationError):
    """A tile type is referenced but never defined."""


class EdgeMismatch(ValidationError):
    """Edge-type subdivision data is inconsistent."""


class MissingTileType(ValidationError):
    """A face has no tile type, or a type the rule does not define."""


class GluingFailure(ValidationError):
    """Subdivided tiles cannot be glued consistently along a shared edge."""


class NotInterior(ValidationError):
    """Operation requires an interior vertex."""


class CarrierMismatch(ValidationError):
    """Weight function carrier does not match the requested mode."""


class NonPositive(ValidationError):
    """A quantity that must be positive is not."""


class NotNested(ValidationError):
    """Annuli supplied for layering are not nested around a common core."""


class Overlapping(ValidationError):
    """Annuli supplied for layering share faces."""


class NotATriangulatedDisk(ValidationError):
    """Packing requires a triangulated disk."""


class BoundaryVertex(ValidationError):
    """Operation requires an interior vertex of a packing."""


class FormatError(ValidationError):
    """A JSON document does not follow the interchange format."""


class SolverError(SubdivError):
    """Numerical solver failure (CLI exit code 3)."""


class NoPath(SolverError):
    """The marked boundaries are not connected through the carrier graph."""


class IterationLimit(SolverError):
    """An iterative solver exceeded its iteration cap."""


class TooLarge(SolverError):
    """Instance exceeds the brute-force size bound."""
