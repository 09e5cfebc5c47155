"""Exception types shared across the package."""


class CohomkitError(Exception):
    """Base class for all package errors."""


class OrderCapExceeded(CohomkitError):
    """Group closure passed the configured order cap."""


class SizeCapExceeded(CohomkitError):
    """A cochain space or matrix would exceed the configured size cap."""


class ModulusMismatch(CohomkitError):
    """Operands live over different coefficient rings."""


class InvalidModule(CohomkitError):
    """Action matrices do not satisfy the group's multiplication table."""


class NotBaseFree(CohomkitError):
    """Module has torsion over Z where a Z-free module is required."""


class NotPrime(CohomkitError):
    """Argument expected to be a prime number is not."""


class DegreeZeroUnsupported(CohomkitError):
    """Degree-0 integral cohomology is Z, not a finite p-group."""


class NoIsomorphismFound(CohomkitError):
    """The dualising-module isomorphism search failed; for group algebras
    this contradicts theory and signals a bug."""


class NoPreimageFound(CohomkitError):
    """A lifting guaranteed to exist was not found; signals a bug."""


class SliceTooShallow(CohomkitError):
    """Requested degree bound exceeds the computed slice data."""


class InternalCheckFailed(CohomkitError):
    """A self-verification that must hold by theory failed."""
