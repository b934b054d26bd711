"""q-shifted factorials with certified truncation, q-Gamma and the McIntosh expansion."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from mpmath import mp, mpf

from .errors import DomainError, PoleError, ScaleError, UnsupportedOrderError
from .numkernel import LogRealValue, _as_mpf, bernoulli_number, bernoulli_polynomial, default_eps

MAX_FACTORS = 10**7
MCINTOSH_DEFAULT_ORDER = 8
MCINTOSH_MAX_ORDER = 20
_RESYNC = 32


@dataclass(frozen=True)
class QParameter:
    """The nome ``q = exp(-pi*t)`` stored through ``t > 0``.

    Scaled runs use ``t = 1/lambda_n``; nothing ever forms ``1 - q`` by
    subtraction.
    """

    t: mpf

    def __post_init__(self):
        t = mpf(self.t)
        if not t > 0:
            raise DomainError(f"q = exp(-pi*t) needs t > 0, got t={self.t!r}")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_q(cls, q) -> "QParameter":
        q = _as_mpf(q)
        if not 0 < q < 1:
            raise DomainError(f"need 0 < q < 1, got {q}")
        return cls(-mp.log(q) / mp.pi)

    @classmethod
    def from_lambda(cls, lam) -> "QParameter":
        return cls(1 / _as_mpf(lam))

    @property
    def log_q(self):
        return -mp.pi * self.t

    @property
    def q(self):
        return mp.exp(self.log_q)

    @property
    def one_minus_q(self):
        return -mp.expm1(self.log_q)

    @property
    def log_one_minus_q(self):
        return mp.log(-mp.expm1(self.log_q))

    def power(self, x) -> LogRealValue:
        """``q**x`` in log form."""
        return LogRealValue(1, mpf(x) * self.log_q)

    def nome_power(self, k) -> "QParameter":
        """``q**k`` as a nome in its own right (e.g. ``q**2`` for triple products)."""
        return QParameter(self.t * k)


@dataclass(frozen=True)
class TailBound:
    """Certified relative bound on the neglected tail of an infinite product."""

    value: LogRealValue
    n_terms: int


def _as_log(a) -> LogRealValue:
    return a if isinstance(a, LogRealValue) else LogRealValue.from_number(a)


def _product(a: LogRealValue, q: QParameter, start: int, count: int) -> LogRealValue:
    """``prod_{k=start}^{start+count-1} (1 - a q**k)``.

    The running product lives in an mpf, whose binary exponent is unbounded,
    so it is a log-domain accumulator in base 2.  ``a q**k`` is stepped by
    multiplication and resynchronised from the exact exponent every few steps;
    factors close to zero are formed with expm1.
    """
    if count <= 0 or a.sign == 0:
        return LogRealValue.one()
    log_q = q.log_q
    qv = mp.exp(log_q)
    prod = mpf(1)
    x = None
    for i in range(count):
        L = a.logmag + (start + i) * log_q
        if x is None or i % _RESYNC == 0:
            x = mp.exp(L)
        else:
            x *= qv
        if a.sign > 0:
            if L > -0.75:
                x = mp.exp(L)
                f = -mp.expm1(L)
            else:
                f = 1 - x
        else:
            f = 1 + x
        if f == 0:
            return LogRealValue.zero()
        prod *= f
    return LogRealValue.from_number(prod)


def qpoch_finite(a, q: QParameter, n: int) -> LogRealValue:
    """``(a; q)_n`` for ``n >= 0``."""
    if n < 0:
        raise DomainError("negative n is not supported")
    return _product(_as_log(a), q, 0, int(n))


def certified_length(a: LogRealValue, q: QParameter, eps) -> int:
    """Smallest N with ``2|a| q**N / (1 - q) < min(eps, 1/2)``."""
    if a.sign == 0:
        return 0
    target = mp.log(min(mpf(eps), mpf(0.5)))
    excess = mp.log(2) + a.logmag - q.log_one_minus_q - target
    if excess < 0:
        return 0
    n = int(mp.floor(excess / (mp.pi * q.t))) + 1
    if n > MAX_FACTORS:
        raise ScaleError(f"certified truncation needs {n} factors (cap {MAX_FACTORS})")
    return n


def _tail(a: LogRealValue, q: QParameter, n: int) -> TailBound:
    if a.sign == 0:
        return TailBound(LogRealValue.zero(), 0)
    return TailBound(LogRealValue(1, mp.log(2) + a.logmag + n * q.log_q - q.log_one_minus_q), n)


def qpoch_infinite(a, q: QParameter, eps=None) -> tuple[LogRealValue, TailBound]:
    """``(a; q)_inf`` truncated where the tail lemma certifies relative error ``eps``.

    Returns the partial product ``P_N`` and the bound ``2|a| q**N / (1 - q)``
    on ``|(a;q)_inf / P_N - 1|``.
    """
    a = _as_log(a)
    eps = default_eps() if eps is None else mpf(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    n = certified_length(a, q, eps)
    return _product(a, q, 0, n), _tail(a, q, n)


def log_qpoch_ladder(x, q: QParameter, k_lo: int, k_hi: int, eps=None) -> list:
    """``[log (q**(x+k); q)_inf for k in k_lo..k_hi]`` for real ``x`` with ``x + k_lo > 0``.

    One certified product at the top index, then exact finite factors walking
    down: ``(q**(x+k); q)_inf = (1 - q**(x+k)) (q**(x+k+1); q)_inf``.
    """
    x = mpf(x)
    if x + k_lo <= 0:
        raise DomainError("ladder needs q**(x+k) < 1 throughout")
    top, _ = qpoch_infinite(q.power(x + k_hi), q, eps)
    out = [None] * (k_hi - k_lo + 1)
    acc = top.logmag
    out[-1] = acc
    log_q = q.log_q
    for k in range(k_hi - 1, k_lo - 1, -1):
        L = (x + k) * log_q
        acc += mp.log(-mp.expm1(L)) if L > -0.75 else mp.log1p(-mp.exp(L))
        out[k - k_lo] = acc
    return out


def qgamma(z, q: QParameter, eps=None) -> LogRealValue:
    """``Gamma_q(z) = (q;q)_inf / (q**z;q)_inf * (1-q)**(1-z)``."""
    z = mpf(z)
    if z <= 0 and z == mp.floor(z):
        raise PoleError(f"Gamma_q has a pole at z={z}")
    num, _ = qpoch_infinite(q.power(1), q, eps)
    den, _ = qpoch_infinite(q.power(z), q, eps)
    return num / den * LogRealValue(1, (1 - z) * q.log_one_minus_q)


def mcintosh_coefficient(k: int, x):
    """Coefficient of ``t**k`` in the expansion of ``log (q**x; q)_inf``, ``q = e**-t``.

    Exact when ``x`` is rational.  The sign is fixed by direct comparison with
    the certified product: with ``B_1 = -1/2`` the correction terms enter with
    a minus sign (the k=1 term is ``+B_2(x) t / 4``, giving ``+t/24`` at x=1).
    """
    if isinstance(x, (int, Fraction)):
        return -bernoulli_number(k) * bernoulli_polynomial(k + 1, x) / (k * factorial(k + 1))
    bk = bernoulli_number(k)
    return -(mpf(bk.numerator) / bk.denominator) * bernoulli_polynomial(k + 1, x) / (k * factorial(k + 1))


def mcintosh_log_qpoch(x, q: QParameter, p: int = MCINTOSH_DEFAULT_ORDER):
    """Truncated small-t expansion of ``log (q**x; q)_inf`` with ``t = -log q``.

    The caller owns the ``O(t**(p+1))`` remainder.
    """
    x_num = x
    x = mpf(x) if not isinstance(x, Fraction) else mpf(x.numerator) / x.denominator
    if not x > 0:
        raise DomainError("McIntosh expansion is used for x > 0 only")
    if not 1 <= p <= MCINTOSH_MAX_ORDER:
        raise UnsupportedOrderError(f"order p={p} outside 1..{MCINTOSH_MAX_ORDER}")
    t = mp.pi * q.t
    value = -mp.pi**2 / (6 * t) + (mpf(1) / 2 - x) * mp.log(t) + mp.log(2 * mp.pi) / 2 - mp.loggamma(x)
    coeff_x = x_num if isinstance(x_num, (int, Fraction)) else x
    for k in range(1, p + 1):
        c = mcintosh_coefficient(k, coeff_x)
        if isinstance(c, Fraction):
            c = mpf(c.numerator) / c.denominator
        value += c * t**k
    return value


def log_qpoch_simplified(x, q: QParameter) -> LogRealValue:
    """Leading behaviour ``sqrt(2) pi**(1-x) lam**(x-1/2) / (Gamma(x) exp(pi lam/6))``, ``lam = 1/t``."""
    x = mpf(x)
    if not x > 0:
        raise DomainError("x must be positive")
    lam = 1 / q.t
    logmag = (mp.log(2) / 2 + (1 - x) * mp.log(mp.pi) + (x - mpf(1) / 2) * mp.log(lam)
              - mp.loggamma(x) - mp.pi * lam / 6)
    return LogRealValue(1, logmag)
