"""Exception types shared across the package."""


class GStokesError(Exception):
    """Base class for all library errors."""


class CapabilityError(GStokesError):
    """Requested family/rank/feature is outside the supported range."""


class RegularityError(GStokesError):
    """A Cartan element sits on (or too close to) a root hyperplane."""


class MembershipError(GStokesError):
    """A matrix fails a Lie algebra / subgroup membership check."""


class CellError(GStokesError):
    """Group element outside the big cell (vanishing pivot)."""


class GeometryError(GStokesError):
    """A path or direction violates a geometric precondition."""


class MatchingError(GStokesError):
    """Asymptotic matching residual exceeded its tolerance."""


class ExtractionError(GStokesError):
    """A computed Stokes matrix has support outside its predicted group."""


class IntegrationError(GStokesError):
    """The adaptive stepper failed (step underflow or step budget)."""
