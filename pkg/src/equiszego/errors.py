"""Exception types shared across the package."""


class EquiSzegoError(Exception):
    """Base class for all package errors."""


class ConfigError(EquiSzegoError):
    """Invalid experiment configuration (CLI exit code 2)."""


class AssumptionViolation(EquiSzegoError):
    """A structural assumption fails, e.g. 0 lies in the convex hull of the
    torus weight columns, or a stabilizer is not finite (CLI exit code 3)."""


class TransversalityError(EquiSzegoError):
    """The evaluation map on the moment-kernel is numerically singular."""


class DomainError(EquiSzegoError):
    """Operation called outside its geometric domain (e.g. off the locus)."""


class InfeasibleLocusError(EquiSzegoError):
    """The requested concentration locus is empty."""
