"""Exception hierarchy for the solver suite.

Every failure mode a caller is expected to branch on gets its own class;
everything derives from SolwaveError so the CLI and service can map the
whole family to clean exit codes / HTTP statuses.
"""


class SolwaveError(Exception):
    """Base class for all library errors."""


class GridConfigError(SolwaveError, ValueError):
    """Invalid mesh configuration (node count, domain radius, field shape)."""


class ParameterError(SolwaveError, ValueError):
    """Physical parameters violate their admissibility conditions."""


class FieldSolveError(SolwaveError):
    """The electrostatic field solve failed (singular or non-convergent system)."""


class ProjectionError(SolwaveError):
    """Scaling projection onto the constraint manifold found no root."""


class NonConvergenceError(SolwaveError):
    """An iterative solver exhausted its iteration budget."""


class CollapseToZeroError(SolwaveError):
    """A minimization flow collapsed to the trivial solution.

    For subcubic exponents this is the expected signature of too large a
    coupling charge, and callers may record it as nonexistence evidence.
    """


class DivergenceError(SolwaveError):
    """Newton residuals grew for several consecutive steps."""


class JacobianSingularError(SolwaveError):
    """The Newton linearization is (numerically) degenerate.

    Reported as-is: degeneracy of the linearized operator is a scientific
    signal, never silently regularized.
    """


class WindowUnderflowError(SolwaveError):
    """Decay-fit window contains values too small to take logarithms of."""
