"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A model or distribution parameter is outside its valid range."""


class ResolutionError(ValueError):
    """A finite approximation is too coarse for the requested quantity."""


class ValidationError(ValueError):
    """An input object violates a structural invariant."""


class AddressError(ValueError):
    """An Ulam address is malformed or not present where required."""


class HandleError(ValueError):
    """A point handle does not refer to a live point of a glued space."""


class CertificationError(ValueError):
    """A bound could not be certified from the available information."""


class ModeError(ValueError):
    """An operation was requested on a state built in an incompatible mode."""
