"""Exact evaluation of the g- and h-functions and their named specialisations.

All values are returned in log form.  Infinite sums are truncated where a
Gaussian-geometric envelope certifies that the neglected terms are below
``eps`` relative to the largest computed term; finite sums are evaluated in
full.  Terms are always accumulated largest-first.

The g/h evaluators obtain every ``(q^{x+k}; q)_inf`` from one certified
product plus a downward ladder of exact factors.  The named families (A_q,
J_nu^(2), Ismail-Masson, Stieltjes-Wigert, q-Laguerre, r-phi-s) instead build
their finite Pochhammer symbols upward from their definitions, so checking the
identities between the two groups compares independent computations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from mpmath import mp, mpf

from .errors import DomainError, PhaseError, ScaleError, UnsupportedError
from .numkernel import LogComplexValue, LogRealValue, _as_mpf, default_eps, log_add, log_sum
from .qpochhammer import MAX_FACTORS, QParameter, log_qpoch_ladder, qpoch_finite, qpoch_infinite


def _positive_tuple(values, name):
    out = tuple(_as_mpf(x) for x in values)
    if any(not x > 0 for x in out):
        raise DomainError(f"all {name} must be positive, got {values!r}")
    return out


@dataclass(frozen=True)
class SeriesSpec:
    """Exponents of ``a_j = q**alpha_j``, ``b_k = q**beta_k``, ``c_i = q**gamma_i`` and the weight ``ell``."""

    alphas: tuple = ()
    betas: tuple = ()
    gammas: tuple = ()
    ell: mpf = 1

    def __post_init__(self):
        object.__setattr__(self, "alphas", _positive_tuple(self.alphas, "alphas"))
        object.__setattr__(self, "betas", _positive_tuple(self.betas, "betas"))
        object.__setattr__(self, "gammas", _positive_tuple(self.gammas, "gammas"))
        ell = _as_mpf(self.ell)
        if not ell > 0:
            raise DomainError("ell must be positive")
        object.__setattr__(self, "ell", ell)


@dataclass(frozen=True)
class ConfluentParams:
    """r-phi-s with ``a_j = q**alpha_j``, ``b_k = q**beta_k``; requires ``s + 1 - r > 0``."""

    alphas: tuple = ()
    betas: tuple = ()
    spec: SeriesSpec = field(init=False)
    rho: mpf = field(init=False)

    def __post_init__(self):
        r, s = len(self.alphas), len(self.betas)
        if s + 1 - r <= 0:
            raise UnsupportedError(f"r={r}, s={s} is not confluent (needs s + 1 - r > 0)")
        spec = SeriesSpec(self.alphas, self.betas, (), mpf(s + 1 - r) / 2)
        object.__setattr__(self, "alphas", spec.alphas)
        object.__setattr__(self, "betas", spec.betas)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "rho", sum(spec.alphas, mpf(0)) - sum(spec.betas, mpf(0)) - 1)

    @property
    def r(self) -> int:
        return len(self.alphas)

    @property
    def s(self) -> int:
        return len(self.betas)

    @property
    def ell(self):
        return self.spec.ell


def char_chi(n: int) -> int:
    """Principal character modulo 2: 1 for odd n, 0 for even n."""
    return n - 2 * (n // 2)


def _log_one_minus(L):
    """``log(1 - e**L)`` for ``L < 0``."""
    return mp.log(-mp.expm1(L)) if L > -0.75 else mp.log1p(-mp.exp(L))


def _finite_logs(x, q: QParameter, k_lo: int, k_hi: int) -> list:
    """``[log (q**x; q)_k for k in k_lo..k_hi]``, built upward from the definition."""
    acc = qpoch_finite(q.power(x), q, k_lo).logmag
    out = [acc]
    log_q = q.log_q
    for k in range(k_lo, k_hi):
        acc += _log_one_minus((x + k) * log_q)
        out.append(acc)
    return out


def _envelope_tail(log_env, quad, lin, k):
    return log_env - quad * k * k + lin * k


def _windowed_sum(quad, lin, log_env, eps, build: Callable, diagnostics=None, start: int = 0):
    """``sum_{k >= start} T_k`` given ``log|T_k| <= log_env - quad k^2 + lin k``.

    ``build(k_lo, k_hi)`` returns the terms on an index window.  The window
    starts at the envelope peak and is widened until both geometric tails of
    the envelope fall below ``eps/4`` times the largest computed term.
    """
    center = lin / (2 * quad)
    width = int(mp.ceil(mp.sqrt((-mp.log(eps) + 10) / quad))) + 2
    while True:
        k_lo = max(start, int(mp.floor(center)) - width)
        k_hi = max(k_lo, int(mp.ceil(center)) + width)
        if k_hi > MAX_FACTORS:
            raise ScaleError(f"series window reaches k={k_hi} (cap {MAX_FACTORS})")
        terms = build(k_lo, k_hi)
        live = [t.logmag for t in terms if not t.is_zero]
        if not live:
            top = mp.ninf
        else:
            top = max(live)
        # upper tail: the envelope decreases geometrically beyond k_hi
        k = k_hi + 1
        drop = quad * (2 * k + 1) - lin
        tail = LogRealValue(1, _envelope_tail(log_env, quad, lin, k) - mp.log(-mp.expm1(-drop)))
        if k_lo > start:
            k = k_lo - 1
            rise = lin - quad * (2 * k - 1)
            lower = _envelope_tail(log_env, quad, lin, k)
            lower -= mp.log(-mp.expm1(-rise)) if k - 1 >= start else 0
            tail = log_add(tail, LogRealValue(1, lower))
        if top != mp.ninf and tail.logmag <= top + mp.log(eps) - mp.log(4):
            return log_sum(terms, diagnostics)
        if top == mp.ninf and tail.logmag < mp.log(eps) - mp.log(4) - 10**6:
            return LogRealValue.zero()
        width *= 2


def _spec_eps(eps, spec: SeriesSpec):
    return (default_eps() if eps is None else mpf(eps)) / (4 * (1 + len(spec.alphas) + len(spec.betas) + len(spec.gammas)))


def g_eval(spec: SeriesSpec, q: QParameter, z: LogRealValue, eps=None,
           diagnostics: Optional[dict] = None) -> LogRealValue:
    """``g(a; b; q; ell; z) = sum_k (q^{k+1}, b q^k; q)_inf q^{ell k^2} (-z)^k / (a q^k; q)_inf``."""
    eps = default_eps() if eps is None else mpf(eps)
    peps = _spec_eps(eps, spec)
    quad = spec.ell * mp.pi * q.t

    def build(k_lo, k_hi):
        base = list(log_qpoch_ladder(1, q, k_lo, k_hi, peps))
        for b in spec.betas:
            for i, x in enumerate(log_qpoch_ladder(b, q, k_lo, k_hi, peps)):
                base[i] += x
        for a in spec.alphas:
            for i, x in enumerate(log_qpoch_ladder(a, q, k_lo, k_hi, peps)):
                base[i] -= x
        terms = []
        for i, k in enumerate(range(k_lo, k_hi + 1)):
            if z.is_zero and k > 0:
                break
            sign = 1 if (k % 2 == 0 or z.sign < 0) else -1
            terms.append(LogRealValue(sign, base[i] - quad * k * k + (k * z.logmag if k else 0)))
        return terms

    if z.is_zero:
        return log_sum(build(0, 0), diagnostics)
    log_env = -sum((qpoch_infinite(q.power(a), q, peps)[0].logmag for a in spec.alphas), mpf(0))
    return _windowed_sum(quad, z.logmag, log_env, eps, build, diagnostics)


def h_eval(spec: SeriesSpec, q: QParameter, n: int, z: LogRealValue, eps=None,
           diagnostics: Optional[dict] = None) -> LogRealValue:
    """The finite h-sum ``k = 0..n``; ``(q, c; q)_n / (q, c; q)_{n-k}`` enter as ladder ratios."""
    n = int(n)
    if n < 0:
        raise DomainError("h needs n >= 0")
    eps = default_eps() if eps is None else mpf(eps)
    peps = _spec_eps(eps, spec) / (n + 1)
    quad = spec.ell * mp.pi * q.t
    base = list(log_qpoch_ladder(1, q, 0, n, peps))
    finite = list(base)  # log (q^{1+j}; q)_inf, shared by the (q;q)_n/(q;q)_{n-k} ratio
    for b in spec.betas:
        for i, x in enumerate(log_qpoch_ladder(b, q, 0, n, peps)):
            base[i] += x
    for a in spec.alphas:
        for i, x in enumerate(log_qpoch_ladder(a, q, 0, n, peps)):
            base[i] -= x
    ratio = [finite[n - k] - finite[n] for k in range(n + 1)]
    for c in spec.gammas:
        lad = log_qpoch_ladder(c, q, 0, n, peps)
        for k in range(n + 1):
            ratio[k] += lad[n - k] - lad[n]
    terms = []
    for k in range(n + 1):
        if z.is_zero and k > 0:
            break
        sign = 1 if (k % 2 == 0 or z.sign < 0) else -1
        terms.append(LogRealValue(sign, base[k] + ratio[k] - quad * k * k + (k * z.logmag if k else 0)))
    if diagnostics is not None:
        diagnostics["h_terms"] = len(terms)
    return log_sum(terms, diagnostics)


def ramanujan_aq(z: LogRealValue, q: QParameter, eps=None, diagnostics: Optional[dict] = None) -> LogRealValue:
    """``A_q(z) = sum_k q^{k^2} (-z)^k / (q; q)_k``."""
    if z.is_zero:
        return LogRealValue.one()
    eps = default_eps() if eps is None else mpf(eps)
    quad = mp.pi * q.t

    def build(k_lo, k_hi):
        lq = _finite_logs(1, q, k_lo, k_hi)
        terms = []
        for i, k in enumerate(range(k_lo, k_hi + 1)):
            sign = 1 if (k % 2 == 0 or z.sign < 0) else -1
            terms.append(LogRealValue(sign, -quad * k * k + k * z.logmag - lq[i]))
        return terms

    log_env = -qpoch_infinite(q.power(1), q, eps / 4)[0].logmag
    return _windowed_sum(quad, z.logmag, log_env, eps, build, diagnostics)


def jackson_j2(z: LogComplexValue, nu, q: QParameter, eps=None,
               diagnostics: Optional[dict] = None) -> LogComplexValue:
    """``J_nu^(2)(z; q)`` for ``z`` on a quarter-phase axis."""
    nu = _as_mpf(nu)
    if not nu > -1:
        raise DomainError("Jackson q-Bessel needs nu > -1")
    if not isinstance(z, LogComplexValue):
        z = LogComplexValue.from_real(z)
    eps = default_eps() if eps is None else mpf(eps)
    nu_int = nu == mp.floor(nu)
    if z.is_zero:
        if nu > 0:
            return LogComplexValue.from_real(0)
        # nu = 0: the k = 0 term (z/2)^0 = 1 alone survives
        pre = qpoch_infinite(q.power(1 + nu), q, eps / 4)[0] / qpoch_infinite(q.power(1), q, eps / 4)[0]
        return LogComplexValue(0, pre)
    p = z.quarter_phase
    if p and not nu_int:
        raise PhaseError("non-integer nu needs a positive real argument to stay on the quarter-phase axes")
    half = z.logmag - mp.log(2)
    quad = mp.pi * q.t
    lin = 2 * half - quad * nu
    # (z/2)^{2k} = (-1)^{p k} |z/2|^{2k}; with the (-1)^k of the series
    flip = (1 + p) % 2 == 1

    def build(k_lo, k_hi):
        lq = _finite_logs(1, q, k_lo, k_hi)
        lb = _finite_logs(1 + nu, q, k_lo, k_hi)
        terms = []
        for i, k in enumerate(range(k_lo, k_hi + 1)):
            sign = -1 if (flip and k % 2) else 1
            terms.append(LogRealValue(sign, -quad * k * k + lin * k - lq[i] - lb[i]))
        return terms

    inf_q = qpoch_infinite(q.power(1), q, eps / 4)[0]
    inf_b = qpoch_infinite(q.power(1 + nu), q, eps / 4)[0]
    log_env = -(inf_q.logmag + inf_b.logmag)
    total = _windowed_sum(quad, lin, log_env, eps, build, diagnostics)
    pre = inf_b / inf_q * LogRealValue(1, nu * half)
    phase = (p * int(nu)) % 4 if p else 0
    return LogComplexValue(phase, pre * total)


def ismail_masson_h(n: int, xi: LogComplexValue, q: QParameter,
                    diagnostics: Optional[dict] = None) -> LogComplexValue:
    """``h_n(sinh xi | q)`` with ``e**xi`` given on a quarter-phase axis."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be nonnegative")
    if not isinstance(xi, LogComplexValue):
        xi = LogComplexValue.from_real(xi)
    if xi.is_zero:
        raise DomainError("e**xi must be nonzero")
    p, lw = xi.quarter_phase, xi.logmag
    lq = _finite_logs(1, q, 0, n)
    log_q = q.log_q
    terms = []
    for k in range(n + 1):
        # e^{(n-2k) xi} = i^{p n} (-1)^{p k} |e^xi|^{n-2k}
        sign = -1 if ((1 + p) * k) % 2 else 1
        logmag = lq[n] + k * (k - n) * log_q + (n - 2 * k) * lw - lq[k] - lq[n - k]
        terms.append(LogRealValue(sign, logmag))
    return LogComplexValue(p * n, log_sum(terms, diagnostics))


def stieltjes_wigert_eval(n: int, x: LogRealValue, q: QParameter, eps=None,
                          diagnostics: Optional[dict] = None) -> LogRealValue:
    """``S_n(x; q) = sum_k q^{k^2} (-x)^k / ((q;q)_k (q;q)_{n-k})``."""
    n = int(n)
    if n < 0:
        raise DomainError("n must be nonnegative")
    lq = _finite_logs(1, q, 0, n)
    log_q = q.log_q
    terms = []
    for k in range(n + 1):
        if x.is_zero and k > 0:
            break
        sign = 1 if (k % 2 == 0 or x.sign < 0) else -1
        terms.append(LogRealValue(sign, k * k * log_q + (k * x.logmag if k else 0) - lq[k] - lq[n - k]))
    return log_sum(terms, diagnostics)


def q_laguerre_eval(n: int, alpha, x: LogRealValue, q: QParameter, eps=None,
                    diagnostics: Optional[dict] = None) -> LogRealValue:
    """``L_n^(alpha)(x; q) = sum_k q^{k^2 + alpha k} (-x)^k (q^{alpha+1};q)_n / ((q;q)_k (q, q^{alpha+1}; q)_{n-k})``."""
    n = int(n)
    alpha = _as_mpf(alpha)
    if not alpha > -1:
        raise DomainError("q-Laguerre needs alpha > -1")
    if n < 0:
        raise DomainError("n must be nonnegative")
    lq = _finite_logs(1, q, 0, n)
    la = _finite_logs(alpha + 1, q, 0, n)
    log_q = q.log_q
    terms = []
    for k in range(n + 1):
        if x.is_zero and k > 0:
            break
        sign = 1 if (k % 2 == 0 or x.sign < 0) else -1
        logmag = (k * k + alpha * k) * log_q + (k * x.logmag if k else 0) + la[n] - lq[k] - lq[n - k] - la[n - k]
        terms.append(LogRealValue(sign, logmag))
    return log_sum(terms, diagnostics)


def rphis_eval(params: ConfluentParams, q: QParameter, z: LogRealValue, eps=None,
               diagnostics: Optional[dict] = None) -> LogRealValue:
    """Confluent ``r-phi-s``: ``sum_k (a;q)_k (z q^{-ell})^k q^{ell k^2} / ((q, b; q)_k (-1)^{k(s+1-r)})``."""
    if z.is_zero:
        return LogRealValue.one()
    eps = default_eps() if eps is None else mpf(eps)
    ell = params.ell
    quad = ell * mp.pi * q.t
    lin = z.logmag + quad
    parity = (params.s + 1 - params.r) % 2

    def build(k_lo, k_hi):
        logs = [mpf(0)] * (k_hi - k_lo + 1)
        for a in params.alphas:
            for i, x in enumerate(_finite_logs(a, q, k_lo, k_hi)):
                logs[i] += x
        for b in (1,) + params.betas:
            for i, x in enumerate(_finite_logs(b, q, k_lo, k_hi)):
                logs[i] -= x
        terms = []
        for i, k in enumerate(range(k_lo, k_hi + 1)):
            odd = k % 2 and ((z.sign < 0) != bool(parity))
            terms.append(LogRealValue(-1 if odd else 1, logs[i] - quad * k * k + lin * k))
        return terms

    peps = eps / (4 * (1 + params.s))
    log_env = -sum((qpoch_infinite(q.power(b), q, peps)[0].logmag for b in (1,) + params.betas), mpf(0))
    return _windowed_sum(quad, lin, log_env, eps, build, diagnostics)
