"""Jacobi theta functions for purely imaginary tau = i*s.

Arguments are either real ``v`` or purely imaginary ``v = i*vh``; the
multiplicative form ``theta(z; q)`` with real ``z > 0`` maps onto the
imaginary case through ``z = exp(2*pi*i*v)``.  Three evaluators are
provided: the bilateral series, the Jacobi triple product, and the modular
transformation ``tau -> -1/tau`` (used by :func:`theta_auto` when ``s < 1``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from .errors import DomainError, RegimeError
from .numkernel import LogComplexValue, LogRealValue, _as_mpf, default_eps, log_sum
from .qpochhammer import QParameter, certified_length, qpoch_infinite

MAX_TERMS = 10**7
REGIME_SWITCH = 1


@dataclass(frozen=True)
class ThetaPoint:
    """``theta_index(v | i*tau_im)``; with ``imaginary=True`` the argument is ``i*v``."""

    v: mpf
    tau_im: mpf
    index: int
    imaginary: bool = False

    def __post_init__(self):
        if self.index not in (1, 2, 3, 4):
            raise DomainError(f"theta index must be 1..4, got {self.index!r}")
        tau = _as_mpf(self.tau_im)
        if not tau > 0:
            raise DomainError("tau must lie in the upper half plane (tau_im > 0)")
        object.__setattr__(self, "tau_im", tau)
        object.__setattr__(self, "v", _as_mpf(self.v))

    @property
    def nome(self) -> QParameter:
        return QParameter(self.tau_im)


@dataclass(frozen=True)
class NomeForm:
    """``theta(z; q)`` with real ``z > 0``, i.e. ``v = i*vh`` and ``vh = -log(z)/(2*pi)``."""

    z: LogRealValue
    q: QParameter

    def __post_init__(self):
        if self.z.sign != 1:
            raise DomainError("multiplicative theta argument must be a positive real z")

    def point(self, index: int) -> ThetaPoint:
        return ThetaPoint(-self.z.logmag / (2 * mp.pi), self.q.t, index, imaginary=True)


def _half_width(s, eps, slack=0):
    """Smallest W >= 0 with ``2 exp(-pi s W^2) / (1 - exp(-pi s)) < eps * exp(-slack)``."""
    budget = mp.log(2) - mp.log(-mp.expm1(-mp.pi * s)) - mp.log(eps) + slack
    if budget <= 0:
        return 0
    w = int(mp.ceil(mp.sqrt(budget / (mp.pi * s))))
    if w > MAX_TERMS:
        raise RegimeError(f"direct theta summation needs {w} terms at tau_im={s}; use theta_auto")
    return w


def _series_real_v(p: ThetaPoint, eps, diagnostics):
    s, v, idx = p.tau_im, p.v, p.index
    c = mpf(1) / 2 if idx in (1, 2) else mpf(0)
    # one-sided after pairing k with -k (or -k-1); largest envelope term is q**(c**2)
    k_top = _half_width(s, eps, -mp.pi * s * c * c) + 1
    log2 = mp.log(2)
    terms = [LogRealValue.one()] if idx in (3, 4) else []
    for k in range(0 if idx in (1, 2) else 1, k_top + 1):
        if idx == 1:
            trig = mp.sinpi((2 * k + 1) * v)
        elif idx == 2:
            trig = mp.cospi((2 * k + 1) * v)
        else:
            trig = mp.cospi(2 * k * v)
        if trig == 0:
            continue
        sign = 1 if trig > 0 else -1
        if idx in (1, 4) and k % 2:
            sign = -sign
        terms.append(LogRealValue(sign, log2 - mp.pi * s * (k + c) ** 2 + mp.log(abs(trig))))
    return LogComplexValue(0, log_sum(terms, diagnostics))


def _series_imag_v(p: ThetaPoint, eps, diagnostics):
    s, vh, idx = p.tau_im, p.v, p.index
    c = mpf(1) / 2 if idx in (1, 2) else mpf(0)
    # term = exp(-pi s (k+c)^2 - 2 pi vh (k+c)), peaked at k + c = -vh/s
    peak = -vh / s
    w = _half_width(s, eps, mp.pi * s / 4)
    lo = int(mp.floor(peak - c)) - w
    hi = int(mp.ceil(peak - c)) + w
    terms = []
    for k in range(lo, hi + 1):
        x = k + c
        sign = -1 if idx in (1, 4) and k % 2 else 1
        terms.append(LogRealValue(sign, -mp.pi * s * x * x - 2 * mp.pi * vh * x))
    total = log_sum(terms, diagnostics)
    # theta_1 carries -i in front of the bilateral sum
    return LogComplexValue(3 if idx == 1 else 0, total)


def theta_series(p: ThetaPoint, eps=None, diagnostics: Optional[dict] = None) -> LogComplexValue:
    """Direct summation, truncated by a Gaussian tail bound relative to the largest term."""
    eps = default_eps() if eps is None else mpf(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if p.imaginary:
        return _series_imag_v(p, eps, diagnostics)
    return _series_real_v(p, eps, diagnostics)


def _conjugate_pairs(offset, q2: QParameter, sin2, plus: bool, eps):
    """``prod_k |1 -/+ x_k e^{2 pi i v}|^2`` with ``x_k = q**offset * q2**k``.

    Each factor is written as ``(1 - x)^2 + 4x sin^2(pi v)`` (minus) or
    ``(1 - x)^2 + 4x cos^2(pi v)`` (plus): a sum of nonnegative parts.
    """
    a = LogRealValue(1, offset)
    n = certified_length(a, q2, eps / 8)
    trig2 = (1 - sin2) if plus else sin2
    qv2 = mp.exp(q2.log_q)
    prod = mpf(1)
    x = None
    for k in range(n):
        if x is None or k % 32 == 0:
            x = mp.exp(offset + k * q2.log_q)
        else:
            x *= qv2
        one_minus = -mp.expm1(offset + k * q2.log_q) if x > 0.5 else 1 - x
        prod *= one_minus * one_minus + 4 * x * trig2
    return LogRealValue.from_number(prod)


def theta_product(p: ThetaPoint, eps=None) -> LogComplexValue:
    """Jacobi triple product: three certified infinite products plus prefactor."""
    eps = default_eps() if eps is None else mpf(eps)
    s, idx = p.tau_im, p.index
    q = QParameter(s)
    q2 = q.nome_power(2)
    base, _ = qpoch_infinite(q2.power(1), q2, eps / 4)
    quarter = mp.pi * s / 4  # -log q**(1/4)
    if not p.imaginary:
        v = p.v
        sin2 = mp.sinpi(v) ** 2
        if idx == 1:
            pre = LogRealValue.from_number(2 * mp.sinpi(v)) * LogRealValue(1, -quarter)
            return LogComplexValue(0, pre * base * _conjugate_pairs(2 * q.log_q, q2, sin2, False, eps))
        if idx == 2:
            pre = LogRealValue.from_number(2 * mp.cospi(v)) * LogRealValue(1, -quarter)
            return LogComplexValue(0, pre * base * _conjugate_pairs(2 * q.log_q, q2, sin2, True, eps))
        return LogComplexValue(0, base * _conjugate_pairs(q.log_q, q2, sin2, idx == 3, eps))

    # imaginary argument: every Pochhammer argument is real
    lw = -2 * mp.pi * p.v  # log of e^{2 pi i v} at v = i*vh
    if idx in (3, 4):
        sign = -1 if idx == 3 else 1
        f1, _ = qpoch_infinite(LogRealValue(sign, q.log_q + lw), q2, eps / 4)
        f2, _ = qpoch_infinite(LogRealValue(sign, q.log_q - lw), q2, eps / 4)
        return LogComplexValue(0, base * f1 * f2)
    sign = -1 if idx == 2 else 1
    f1, _ = qpoch_infinite(LogRealValue(sign, q2.log_q + lw), q2, eps / 4)
    f2, _ = qpoch_infinite(LogRealValue(sign, q2.log_q - lw), q2, eps / 4)
    if idx == 2:
        pre = LogRealValue.from_number(2 * mp.cosh(mp.pi * p.v)) * LogRealValue(1, -quarter)
        return LogComplexValue(0, pre * base * f1 * f2)
    # 2 q^{1/4} sin(pi i vh) = 2 i q^{1/4} sinh(pi vh)
    pre = LogRealValue.from_number(2 * mp.sinh(mp.pi * p.v)) * LogRealValue(1, -quarter)
    return LogComplexValue(1, pre * base * f1 * f2)


_IMAGE_INDEX = {1: 1, 2: 4, 3: 3, 4: 2}


def theta_transform(p: ThetaPoint) -> tuple[ThetaPoint, LogComplexValue]:
    """Image of ``p`` under ``tau -> -1/tau`` and the multiplier ``M`` with
    ``theta_image(v/tau | -1/tau) = M * theta_p(v | tau)``.

    For ``tau = i*s``: ``M = sqrt(s) * exp(pi*i*v**2/tau)``, times ``-i`` for theta_1.
    A real ``v`` maps to the imaginary argument ``-i*v/s`` and vice versa.
    """
    s = p.tau_im
    if p.imaginary:
        # v = i*vh: v/tau = vh/s (real), pi*i*v^2/tau = -pi*vh^2/s
        image = ThetaPoint(p.v / s, 1 / s, _IMAGE_INDEX[p.index], imaginary=p.v == 0)
        log_m = mp.log(s) / 2 - mp.pi * p.v ** 2 / s
    else:
        image = ThetaPoint(-p.v / s, 1 / s, _IMAGE_INDEX[p.index], imaginary=p.v != 0)
        log_m = mp.log(s) / 2 + mp.pi * p.v ** 2 / s
    return image, LogComplexValue(3 if p.index == 1 else 0, LogRealValue(1, log_m))


def theta_auto(p: ThetaPoint, eps=None, diagnostics: Optional[dict] = None) -> LogComplexValue:
    """Series when ``tau_im >= 1``; otherwise the series of the transformed point, mapped back."""
    if p.tau_im >= REGIME_SWITCH:
        return theta_series(p, eps, diagnostics)
    image, mult = theta_transform(p)
    return theta_series(image, eps, diagnostics) / mult


def theta_nome(index: int, z: LogRealValue, q: QParameter, eps=None) -> LogComplexValue:
    """``theta_index(z; q)`` for real ``z > 0`` with automatic regime selection."""
    return theta_auto(NomeForm(z, q).point(index), eps)
