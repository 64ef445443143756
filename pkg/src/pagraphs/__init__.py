"""Preferential-attachment graphs glued along the Ulam tree: growth models,
their decoration representations, continuum limit samplers and checks."""
from .errors import (AddressError, CertificationError, HandleError, ModeError,
                     ParameterError, ResolutionError, ValidationError)

__version__ = "0.1.0"
