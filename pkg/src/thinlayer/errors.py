"""Exception types shared across the package."""


class ThinLayerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ThinLayerError):
    """Input outside the physical or mathematical domain of validity."""


class IncompressibleSingularity(ThinLayerError):
    """Quantity undefined at Poisson's ratio 1/2 (compressible-only path)."""


class NoContact(ThinLayerError):
    """Contact parameters describe bodies that do not actually touch."""


class ShapeError(ThinLayerError):
    """Grids or lattices that were expected to match do not."""


class SolverError(ThinLayerError):
    """A numerical solver failed to reach its tolerance."""


class ConfigError(ThinLayerError):
    """Malformed or inconsistent run configuration."""
