"""Log-domain scalars, precision policy and exact Bernoulli numbers.

Everything downstream works with magnitudes like ``exp(pi*lam*(v + 2n/lam)**2)``,
so values are carried as a sign (or quarter-turn phase) plus the natural log of
the absolute value.  The extended-precision substrate is :mod:`mpmath`; all
functions compute at the ambient ``mp.dps`` and callers choose the precision
with :meth:`Precision.workdps`.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Optional

from mpmath import mp, mpf, mpc

from .errors import PhaseError, UnsupportedOrderError

GUARD_DIGITS = 10
DEFAULT_DIGITS = 50
MAX_BERNOULLI = 64


@dataclass(frozen=True)
class Precision:
    """Requested decimal digits; computations run with ``GUARD_DIGITS`` more."""

    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 15:
            raise ValueError(f"precision must be an integer >= 15, got {self.digits!r}")

    @property
    def dps(self) -> int:
        return self.digits + GUARD_DIGITS

    def workdps(self):
        return mp.workdps(self.dps)

    def doubled(self) -> "Precision":
        return Precision(2 * self.digits)

    @classmethod
    def from_env(cls, default: int = DEFAULT_DIGITS) -> "Precision":
        raw = os.environ.get("QSCALE_PRECISION")
        return cls(int(raw)) if raw else cls(default)


def default_eps():
    """Relative tolerance matching the ambient working precision."""
    return mpf(10) ** (2 - mp.dps)


def _as_mpf(x):
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


@dataclass(frozen=True, eq=False)
class LogRealValue:
    """``sign * exp(logmag)``; ``sign == 0`` is an exact zero."""

    sign: int
    logmag: mpf = 0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        object.__setattr__(self, "logmag", mpf(0) if self.sign == 0 else mpf(self.logmag))

    @classmethod
    def zero(cls) -> "LogRealValue":
        return cls(0)

    @classmethod
    def one(cls) -> "LogRealValue":
        return cls(1, 0)

    @classmethod
    def from_number(cls, x) -> "LogRealValue":
        x = _as_mpf(x)
        if x == 0:
            return cls(0)
        return cls(1 if x > 0 else -1, mp.log(abs(x)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_mpf(self):
        if self.sign == 0:
            return mpf(0)
        return self.sign * mp.exp(self.logmag)

    def log10(self):
        if self.sign == 0:
            return mp.ninf
        return self.logmag / mp.ln10

    def __eq__(self, other):
        if not isinstance(other, LogRealValue):
            return NotImplemented
        if self.sign == 0 or other.sign == 0:
            return self.sign == other.sign
        return self.sign == other.sign and self.logmag == other.logmag

    def __hash__(self):
        return hash((self.sign, self.logmag if self.sign else 0))

    def __neg__(self):
        return LogRealValue(-self.sign, self.logmag)

    def __abs__(self):
        return LogRealValue(abs(self.sign), self.logmag)

    def __mul__(self, other):
        if not isinstance(other, LogRealValue):
            other = LogRealValue.from_number(other)
        if self.sign == 0 or other.sign == 0:
            return LogRealValue(0)
        return LogRealValue(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogRealValue):
            other = LogRealValue.from_number(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by an exact zero LogRealValue")
        if self.sign == 0:
            return LogRealValue(0)
        return LogRealValue(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other):
        return LogRealValue.from_number(other) / self

    def __pow__(self, p):
        if self.sign == 0:
            if p > 0:
                return LogRealValue(0)
            raise ZeroDivisionError("zero to a non-positive power")
        if self.sign < 0:
            if int(p) != p:
                raise PhaseError("non-integer power of a negative value")
            sign = -1 if int(p) % 2 else 1
        else:
            sign = 1
        return LogRealValue(sign, self.logmag * p)

    def __add__(self, other):
        if not isinstance(other, LogRealValue):
            other = LogRealValue.from_number(other)
        return log_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LogRealValue):
            other = LogRealValue.from_number(other)
        return log_add(self, -other)

    def __repr__(self):
        if self.sign == 0:
            return "LogRealValue(0)"
        return f"LogRealValue({self.sign:+d}, {mp.nstr(self.logmag, 20)})"


def log_add(a: LogRealValue, b: LogRealValue) -> LogRealValue:
    """Sum of two log-domain reals through the max-factored form."""
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    hi, lo = (a, b) if a.logmag >= b.logmag else (b, a)
    d = lo.logmag - hi.logmag
    if hi.sign == lo.sign:
        return LogRealValue(hi.sign, hi.logmag + mp.log1p(mp.exp(d)))
    if d == 0:
        return LogRealValue(0)
    # log(1 - e^d) for d < 0; expm1 keeps it accurate as d -> 0
    return LogRealValue(hi.sign, hi.logmag + mp.log(-mp.expm1(d)))


def log_sum(values: Iterable[LogRealValue], diagnostics: Optional[dict] = None) -> LogRealValue:
    """Signed sum of many log-domain terms, largest first.

    Positive and negative parts are accumulated separately relative to the
    largest magnitude and cancelled once at the end.  If ``diagnostics`` is a
    dict it receives ``max_log`` and ``n_terms`` so callers can judge how many
    digits the cancellation consumed.
    """
    terms = sorted((v for v in values if v.sign != 0), key=lambda v: v.logmag, reverse=True)
    if diagnostics is not None:
        diagnostics["n_terms"] = diagnostics.get("n_terms", 0) + len(terms)
        if terms:
            prev = diagnostics.get("max_log")
            diagnostics["max_log"] = terms[0].logmag if prev is None else max(prev, terms[0].logmag)
    if not terms:
        return LogRealValue(0)
    top = terms[0].logmag
    pos = mp.fsum(mp.exp(t.logmag - top) for t in terms if t.sign > 0)
    neg = mp.fsum(mp.exp(t.logmag - top) for t in terms if t.sign < 0)
    total = pos - neg
    if total == 0:
        return LogRealValue(0)
    return LogRealValue(1 if total > 0 else -1, top + mp.log(abs(total)))


@dataclass(frozen=True, eq=False)
class LogComplexValue:
    """``i**quarter_phase * value``; the phase is normalised so ``value.sign >= 0``."""

    quarter_phase: int
    value: LogRealValue

    def __post_init__(self):
        phase, value = int(self.quarter_phase), self.value
        if value.sign == 0:
            phase = 0
        elif value.sign < 0:
            phase += 2
            value = -value
        object.__setattr__(self, "quarter_phase", phase % 4)
        object.__setattr__(self, "value", value)

    @classmethod
    def from_real(cls, x) -> "LogComplexValue":
        if not isinstance(x, LogRealValue):
            x = LogRealValue.from_number(x)
        return cls(0, x)

    @classmethod
    def unit(cls, quarter_phase: int) -> "LogComplexValue":
        return cls(quarter_phase, LogRealValue.one())

    @property
    def is_zero(self) -> bool:
        return self.value.sign == 0

    @property
    def logmag(self):
        return self.value.logmag

    def log10(self):
        return self.value.log10()

    def axis_value(self) -> LogRealValue:
        """Signed coordinate along the real (phase 0/2) or imaginary (1/3) axis."""
        return self.value if self.quarter_phase < 2 else -self.value

    def real(self) -> LogRealValue:
        if self.is_zero:
            return LogRealValue(0)
        if self.quarter_phase % 2:
            raise PhaseError("value lies on the imaginary axis")
        return self.axis_value()

    def to_mpc(self):
        mag = self.value.to_mpf()
        return [mpc(mag, 0), mpc(0, mag), mpc(-mag, 0), mpc(0, -mag)][self.quarter_phase]

    def __eq__(self, other):
        if not isinstance(other, LogComplexValue):
            return NotImplemented
        return self.quarter_phase == other.quarter_phase and self.value == other.value

    def __hash__(self):
        return hash((self.quarter_phase, self.value))

    def __neg__(self):
        return LogComplexValue(self.quarter_phase + 2, self.value)

    def __mul__(self, other):
        if isinstance(other, LogComplexValue):
            return LogComplexValue(self.quarter_phase + other.quarter_phase, self.value * other.value)
        return LogComplexValue(self.quarter_phase, self.value * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogComplexValue):
            return LogComplexValue(self.quarter_phase - other.quarter_phase, self.value / other.value)
        return LogComplexValue(self.quarter_phase, self.value / other)

    def __pow__(self, p: int):
        if int(p) != p:
            raise PhaseError("only integer powers stay on the quarter-phase axes")
        return LogComplexValue(self.quarter_phase * int(p), self.value ** int(p))

    def __add__(self, other):
        if not isinstance(other, LogComplexValue):
            other = LogComplexValue.from_real(other)
        return complex_log_sum([self, other])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return f"LogComplexValue(i**{self.quarter_phase} * {self.value!r})"


def complex_log_sum(values: Iterable[LogComplexValue], diagnostics: Optional[dict] = None) -> LogComplexValue:
    """Sum of quarter-phase values that all lie on one axis."""
    values = [v for v in values if not v.is_zero]
    if not values:
        return LogComplexValue(0, LogRealValue(0))
    axis = values[0].quarter_phase % 2
    if any(v.quarter_phase % 2 != axis for v in values):
        raise PhaseError("cannot add values on different phase axes")
    total = log_sum((v.axis_value() for v in values), diagnostics)
    return LogComplexValue(axis, total)


@lru_cache(maxsize=None)
def _bernoulli_table() -> tuple:
    # Akiyama-Tanigawa; it produces B_1 = +1/2, flipped below.
    top = MAX_BERNOULLI + 1
    a = [Fraction(0)] * (top + 1)
    table = []
    for m in range(top + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        table.append(a[0])
    table[1] = -table[1]
    return tuple(table)


def bernoulli_number(k: int) -> Fraction:
    """Exact ``B_k`` with ``B_1 = -1/2``, for ``0 <= k <= 64``."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k > MAX_BERNOULLI:
        raise UnsupportedOrderError(f"B_{k} is beyond the supported order {MAX_BERNOULLI}")
    return _bernoulli_table()[k]


def bernoulli_polynomial(k: int, x):
    """``B_k(x) = sum_j C(k, j) B_j x**(k-j)`` for ``k <= 65``.

    Exact (a Fraction) when ``x`` is an int or Fraction, otherwise an mpf.
    """
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k > MAX_BERNOULLI + 1:
        raise UnsupportedOrderError(f"B_{k}(x) is beyond the supported order {MAX_BERNOULLI + 1}")
    table = _bernoulli_table()
    exact = isinstance(x, (int, Fraction))
    if not exact:
        x = _as_mpf(x)
    acc = Fraction(0) if exact else mpf(0)
    # Horner in powers of x: coefficient of x**m is C(k, m) * B_{k-m}
    for m in range(k, -1, -1):
        c = comb(k, m) * table[k - m]
        acc = acc * x + (c if exact else _as_mpf(c))
    return acc
