"""Exception hierarchy shared by every module."""


class RMusicError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(RMusicError, ValueError):
    """Shapes do not conform, or a size parameter is out of range."""


class DomainError(RMusicError, ValueError):
    """A scalar argument lies outside its admissible interval."""


class NumericalError(RMusicError, ArithmeticError):
    """Non-finite input, or a factorization failed to converge."""


class RankDeficiencyError(NumericalError):
    """A matrix that must be invertible is numerically singular."""


class OrthonormalityError(NumericalError):
    """A basis expected to be orthonormal has drifted too far."""


class ConfigError(RMusicError, ValueError):
    """Malformed or inconsistent experiment configuration."""
