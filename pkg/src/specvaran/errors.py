"""Exception types shared across the package."""


class SpecvaranError(Exception):
    """Base class for all package-specific errors."""


class InputError(SpecvaranError):
    """Malformed numeric input: wrong shape, non-finite entries, bad ordering."""


class DomainError(SpecvaranError):
    """A point lies outside the domain required by the operation."""


class CapabilityError(SpecvaranError):
    """The symmetric-function instance does not support the requested hook."""


class NumericalError(SpecvaranError):
    """An in-operation numerical verification failed beyond tolerance."""


class InsufficientData(SpecvaranError):
    """Not enough usable points above the noise floor for a fit."""


class ConfigError(SpecvaranError):
    """Invalid CLI or scenario configuration."""


class SamplerWarning(UserWarning):
    """Cone sampler produced no directions; the cone may be trivial."""
