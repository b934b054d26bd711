"""Exception hierarchy shared by every qscale module."""


class QScaleError(ValueError):
    pass


class UnsupportedError(QScaleError):
    """The request lies outside what the library evaluates (e.g. non-confluent series)."""


class UnsupportedOrderError(UnsupportedError):
    """Requested Bernoulli/McIntosh order is outside the supported table."""


class DomainError(QScaleError):
    pass


class PoleError(DomainError):
    pass


class PhaseError(QScaleError):
    """A value left the quarter-turn phase model (or mixed phase axes were added)."""


class ScaleError(QScaleError):
    """A certified truncation would need more terms than the hard cap allows."""


class RegimeError(QScaleError):
    """Direct theta summation is hopeless for this nome; use theta_auto."""


class ConfigError(QScaleError):
    pass


class PrecisionError(QScaleError):
    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell
