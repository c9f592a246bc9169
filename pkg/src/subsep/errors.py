"""Exception hierarchy shared across the package."""


class SubsepError(Exception):
    """Base class for all domain errors raised by subsep."""


class UnsupportedRankError(SubsepError):
    """Input state or subspace has rank larger than 3."""


class SolverInconsistencyError(SubsepError):
    """Numerical evidence gathered by the solver is self-contradictory."""


class NotIsolatedError(SolverInconsistencyError):
    """Isolated-root extraction hit a positive-dimensional solution locus.

    Internal control-flow signal: callers escalate to the
    positive-dimensional component detector.
    """


class InconsistentProbesError(SolverInconsistencyError):
    """Random line probes disagree beyond what a clean instance allows."""


class InconsistentPatternError(SolverInconsistencyError):
    """Multipartite factor pattern contradicts the rank of the instance."""


class DegenerateCoefficientsError(SubsepError):
    """Expansion coefficients vanish where general position forbids it."""


class SupportMismatchError(SubsepError):
    """Density matrix is not supported on the expected subspace."""


class PreconditionUnmetError(SubsepError):
    """Arguments violate a documented hypothesis of the operation."""
