"""Exception hierarchy shared by the numerical modules and the CLI."""


class DomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


class ConvergenceError(RuntimeError):
    """A series or iteration failed to converge."""


class BandwidthError(RuntimeError):
    """The grid cannot represent the spectral content of a field."""


class BoundarySpillError(RuntimeError):
    """Probability reached the edge of the computational grid."""


class NodeProximityError(RuntimeError):
    """A Bohmian velocity was requested too close to a wavefunction node."""


class AmbiguousUnwrapError(ValueError):
    """Consecutive orientation samples are too far apart to unwrap."""
