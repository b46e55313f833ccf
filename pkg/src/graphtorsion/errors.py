"""Typed error hierarchy for the whole package."""


class GraphToolError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GraphToolError):
    """A graph description failed validation."""


class DisconnectedGraph(ValidationError):
    pass


class NonPositiveLength(ValidationError):
    pass


class EmptyDirichletSet(ValidationError):
    pass


class DuplicateId(ValidationError):
    pass


class UnknownVertex(ValidationError):
    pass


class UnknownEdge(ValidationError):
    pass


class SingularSystem(GraphToolError):
    """The vertex system could not be factorized; should not happen on a valid graph."""


class CrossCheckMismatch(GraphToolError):
    """Two independent routes to the same quantity disagreed beyond tolerance."""


class ZeroEnergy(GraphToolError):
    """A test function with vanishing Dirichlet energy was passed to a quotient."""


class PreconditionViolated(GraphToolError):
    """A surgery operation was applied to a graph that violates its precondition."""


class BadParameters(GraphToolError):
    """Parameters outside the supported range (counts, lengths, mode numbers)."""


class NoConvergence(GraphToolError):
    """Eigenvalue iteration failed to converge within the iteration budget."""


class InconsistentInvariant(GraphToolError):
    """An internally re-derived invariant failed its consistency re-evaluation."""
