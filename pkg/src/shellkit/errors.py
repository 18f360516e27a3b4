"""Exception types shared across the package."""


class ShellkitError(Exception):
    """Base class for all shellkit errors."""


class NotSkew(ShellkitError):
    """Matrix passed to axl() is not skew-symmetric within tolerance."""


class FrameNotOrthonormal(ShellkitError):
    """A director triad or frame fails the orthonormality check."""


class DegenerateChart(ShellkitError):
    """Surface chart is singular or ill-conditioned at the requested point."""


class InvalidDofs(ShellkitError):
    """Nodal degrees of freedom are non-finite or violate rotation invariants."""


class LineSearchFailed(ShellkitError):
    """Backtracking line search could not find a decreasing step."""


class NonFiniteEnergy(ShellkitError):
    """Energy evaluation produced NaN or infinity."""


class ConfigInvalid(ShellkitError):
    """Run configuration failed schema validation."""


class CheckFailed(ShellkitError):
    """A requested verification check exceeded its tolerance."""
