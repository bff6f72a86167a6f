"""Exception types shared across the package.

The CLI maps :class:`InputError` to exit code 2 and :class:`ComputationError`
(and subclasses) to exit code 1.
"""


class InputError(ValueError):
    """Malformed user input: config files, manifests, CLI flags."""


class ProfileTooShortError(ValueError):
    """Radial profile has too few usable samples for slope detection."""


class ComputationError(RuntimeError):
    """A numerical stage failed in a way that invalidates the result."""


class ConvergenceError(ComputationError):
    """Newton iteration failed to converge within the cutback budget."""


class PathDependenceError(ComputationError):
    """Outer J contours disagree beyond tolerance (inadequate mesh/domains)."""


class HrrDetectionError(ComputationError):
    """No HRR regime found anywhere on the load ramp."""


class MapDomainError(ComputationError):
    """Requested point lies outside the convex hull of a validity map."""
