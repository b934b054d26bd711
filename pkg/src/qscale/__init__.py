"""High-precision q-series special functions and their scaled q -> 1 asymptotics."""
from .errors import (
    ConfigError,
    DomainError,
    PhaseError,
    PoleError,
    PrecisionError,
    QScaleError,
    RegimeError,
    ScaleError,
    UnsupportedError,
    UnsupportedOrderError,
)
from .numkernel import LogComplexValue, LogRealValue, Precision
from .qpochhammer import QParameter, TailBound

__version__ = "0.1.0"
