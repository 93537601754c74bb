"""Exception types shared across the package."""


class MclabError(Exception):
    """Base class for all package errors."""


class DegenerateQuotient(MclabError):
    """The symmetric-function quotient is not defined at this matrix."""


class DegenerateNormal(MclabError):
    """The operator's derivative vector vanishes; no hyperplane to project onto."""


class GridTooSmall(MclabError):
    """Grid has too few points for the requested stencil."""


class BlowUp(MclabError):
    """Flow state exceeded the configured magnitude bound."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StabilityViolation(MclabError):
    """Requested time step exceeds the explicit stability limit."""


class SelfIntersection(MclabError):
    """Polygon curve is not simple."""


class CollapseDetected(MclabError):
    """Curve enclosed area fell below the collapse floor."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class EmptyRegion(MclabError):
    """No points satisfy the requested region constraints."""


class NonConvergence(MclabError):
    """Iteration did not reach the requested tolerance."""
