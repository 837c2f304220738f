"""Exception types shared across the package."""


class SymfoldError(Exception):
    """Base class for all package errors."""


class ParseError(SymfoldError):
    """Malformed strand file, parameter file, or dot-bracket string."""


class StructureError(SymfoldError):
    """A pair set violates a structural precondition (crossing, occupancy,
    connectivity, or index range)."""


class InfeasibleError(SymfoldError):
    """No connected secondary structure exists for the requested input."""


class EnumerationCapError(SymfoldError):
    """Brute-force enumeration exceeded its configured structure budget."""
