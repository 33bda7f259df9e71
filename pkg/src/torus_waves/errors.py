"""Exception hierarchy.  Every domain error derives from :class:`TorusWavesError`
so the CLI can turn it into a structured JSON error with exit code 1."""


class TorusWavesError(Exception):
    """Base class for domain errors."""


class InvalidLevel(TorusWavesError, ValueError):
    pass


class EmptyLattice(TorusWavesError, ValueError):
    pass


class Degenerate(TorusWavesError, ValueError):
    pass


class RadiusOutOfRange(TorusWavesError, ValueError):
    pass


class NotUnitSpeed(TorusWavesError, ValueError):
    pass


class DegenerateSpeed(TorusWavesError, ValueError):
    pass


class InvalidSample(TorusWavesError, ValueError):
    pass


class QuadratureUnconverged(TorusWavesError, RuntimeError):
    pass


class SingularCell(TorusWavesError, ValueError):
    pass


class VolumeCapExceeded(TorusWavesError, ValueError):
    pass


class ConfigMismatch(TorusWavesError, ValueError):
    pass


class SchemaMismatch(TorusWavesError, ValueError):
    pass


class IOFailure(TorusWavesError, OSError):
    pass
