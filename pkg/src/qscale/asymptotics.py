"""Main terms of the scaled q -> 1 asymptotics and the finite-n theta representations.

Every asymptotic function returns the main term only.  Oscillating (``plus``)
formulas have the shape ``prefactor * cos(angle)``; :class:`MainTerm` keeps
the two parts apart so that callers can measure the bracket residual
``exact/prefactor - cos(angle)``, which stays meaningful at cosine zeros.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from mpmath import mp, mpf

from .errors import ConfigError, DomainError, PhaseError
from .numkernel import LogComplexValue, LogRealValue, _as_mpf
from .qpochhammer import QParameter, qpoch_infinite
from .qseries import ConfluentParams, SeriesSpec, char_chi, g_eval, h_eval, rphis_eval
from .theta import theta_nome

PROBES = tuple(mpf(10) ** (3 * k) for k in range(1, 101))
PROBE_INDEX = mpf(10) ** 30


def _exact(x) -> Fraction:
    # scale parameters are kept exact so lambda_n does not depend on the precision at parse time
    if isinstance(x, (Fraction, int, str, float)):
        return Fraction(x)
    man, exp = mpf(x).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _decimal(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    with mp.workdps(30):
        return mp.nstr(_as_mpf(x), 20)


@dataclass(frozen=True)
class AdmissibleScale:
    """A rule ``n -> lambda_n``: ``n^beta log^gamma n``, ``log^gamma n`` or an explicit table."""

    kind: str
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)
    table: tuple = ()

    @classmethod
    def power(cls, beta, gamma=0) -> "AdmissibleScale":
        return cls("power", _exact(beta), _exact(gamma))

    @classmethod
    def log(cls, gamma) -> "AdmissibleScale":
        return cls("log", Fraction(0), _exact(gamma))

    @classmethod
    def from_table(cls, mapping) -> "AdmissibleScale":
        items = tuple(sorted((int(n), _exact(lam)) for n, lam in dict(mapping).items()))
        return cls("table", table=items)

    @classmethod
    def parse(cls, text: str) -> "AdmissibleScale":
        """``n^0.4``, ``n^0.3*log(n)``, ``n^0.3*log^2(n)``, ``log^2(n)`` or ``table:64=5.2;128=6.9``."""
        s = text.replace(" ", "")
        if s.startswith("table:"):
            try:
                pairs = (item.split("=") for item in s[6:].split(";") if item)
                return cls.from_table({int(n): Fraction(lam) for n, lam in pairs})
            except ValueError as exc:
                raise ConfigError(f"bad scale table {text!r}") from exc
        m = re.fullmatch(r"n\^([0-9.eE+-]+)(?:\*log(?:\^([0-9.eE+-]+))?\(n\))?", s)
        if m:
            return cls.power(m.group(1), m.group(2) or (1 if "log" in s else 0))
        m = re.fullmatch(r"log(?:\^([0-9.eE+-]+))?\(n\)", s)
        if m:
            return cls.log(m.group(1) or 1)
        raise ConfigError(f"unrecognised scale {text!r}")

    def label(self) -> str:
        if self.kind == "power":
            out = f"n^{_decimal(self.beta)}"
            if self.gamma:
                out += "*log(n)" if self.gamma == 1 else f"*log^{_decimal(self.gamma)}(n)"
            return out
        if self.kind == "log":
            return f"log^{_decimal(self.gamma)}(n)"
        return "table:" + ";".join(f"{n}={_decimal(lam)}" for n, lam in self.table)

    def __call__(self, n: int):
        if self.kind == "table":
            for k, lam in self.table:
                if k == n:
                    return _as_mpf(lam)
            raise ConfigError(f"scale table has no entry for n={n}")
        n, beta, gamma = mpf(n), _as_mpf(self.beta), _as_mpf(self.gamma)
        if self.kind == "power":
            return n ** beta * mp.log(n) ** gamma
        return mp.log(n) ** gamma

    def validate(self, probe_index=PROBE_INDEX) -> None:
        """Family constraints, then a finite proxy for ``lambda_n/log n -> inf`` and
        ``n/lambda_n^2 -> inf``: both must increase strictly over the probes beyond
        ``probe_index`` (over every entry for a table).
        """
        if self.kind == "power" and not (0 < self.beta < Fraction(1, 2) and self.gamma >= 0):
            raise ConfigError(f"power scale needs 0 < beta < 1/2 and gamma >= 0 ({self.label()})")
        if self.kind == "log" and not self.gamma > 1:
            raise ConfigError(f"log scale needs gamma > 1 ({self.label()})")
        if self.kind == "table":
            probes = tuple(n for n, _ in self.table if n >= 3)
            if len(probes) < 2:
                raise ConfigError("a scale table needs at least two entries with n >= 3")
        else:
            probes = tuple(n for n in PROBES if n >= probe_index)
        with mp.workdps(30):
            first = [self(n) / mp.log(n) for n in probes]
            second = [mpf(n) / self(n) ** 2 for n in probes]
        for name, seq in (("lambda_n/log n", first), ("n/lambda_n^2", second)):
            if any(not b > a for a, b in zip(seq, seq[1:])):
                raise ConfigError(f"scale {self.label()} is not admissible: {name} does not increase")


@dataclass(frozen=True)
class ScaledPoint:
    """``q = exp(-pi/lambda_n)`` and ``z = exp(2 pi v)`` for index ``n``."""

    n: int
    v: mpf
    lambda_n: mpf

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("scaled points need an integer n >= 1")
        lam = _as_mpf(self.lambda_n)
        if not lam > 0:
            raise DomainError("lambda_n must be positive")
        object.__setattr__(self, "lambda_n", lam)
        object.__setattr__(self, "v", _as_mpf(self.v))

    @classmethod
    def from_scale(cls, scale: AdmissibleScale, n: int, v) -> "ScaledPoint":
        return cls(n, v, scale(n))

    @property
    def q(self) -> QParameter:
        return QParameter(1 / self.lambda_n)

    @property
    def log_z(self):
        return 2 * mp.pi * self.v


@dataclass(frozen=True)
class RemainderCertificate:
    """A lemma bound paired with the residual actually observed."""

    bound: LogRealValue
    observed: LogRealValue
    n_threshold: int = 0

    @property
    def holds(self) -> bool:
        if self.observed.is_zero:
            return True
        return not self.bound.is_zero and self.observed.logmag <= self.bound.logmag


@dataclass(frozen=True)
class MainTerm:
    """``prefactor * cos(angle)``; ``angle is None`` means no cosine factor."""

    prefactor: LogComplexValue
    angle: Optional[mpf] = None

    def value(self) -> LogComplexValue:
        if self.angle is None:
            return self.prefactor
        c = mp.cos(self.angle)
        # a cosine zero hit up to rounding of the angle is an exact zero
        if abs(c) <= 8 * mp.eps * max(1, abs(self.angle)):
            c = 0
        return self.prefactor * LogRealValue.from_number(c)


PARITY_FORMS = ("printed", "uniform")


def _parity(n: int, parity: str) -> int:
    """chi(n) as the printed formulas use it, or 0 for the parity-free form valid at every n."""
    if parity not in PARITY_FORMS:
        raise DomainError(f"parity must be one of {PARITY_FORMS}, got {parity!r}")
    return char_chi(n) if parity == "printed" else 0


def _branch(branch):
    if branch not in ("minus", "plus"):
        raise DomainError(f"branch must be 'minus' or 'plus', got {branch!r}")
    return branch == "plus"


def _real(log, angle=None, phase=0):
    return MainTerm(LogComplexValue(phase, LogRealValue(1, log)), angle)


def g_main(spec: SeriesSpec, p: ScaledPoint, branch: str) -> MainTerm:
    lam, ell, v = p.lambda_n, spec.ell, p.v
    log = mp.pi * lam / ell * (v + 2 * p.n * ell / lam) ** 2 + mp.log(lam / ell) / 2
    if not _branch(branch):
        return _real(log)
    return _real(log - mp.pi * lam / (4 * ell) + mp.log(2), mp.pi * lam * v / ell)


def g_asym_minus(spec: SeriesSpec, p: ScaledPoint) -> LogRealValue:
    """``sqrt(lam/ell) exp{(pi lam/ell)(v + 2 n ell/lam)^2}``, the main term of ``g(-q^{-4 n ell} z)``."""
    return g_main(spec, p, "minus").value().real()


def g_asym_plus(spec: SeriesSpec, p: ScaledPoint) -> LogRealValue:
    """Main term of ``g(q^{-4 n ell} z)``: the minus term times ``2 e^{-pi lam/(4 ell)} cos(pi lam v/ell)``."""
    return g_main(spec, p, "plus").value().real()


def h_main(spec: SeriesSpec, p: ScaledPoint, branch: str, parity: str = "printed") -> MainTerm:
    lam, ell, v, n = p.lambda_n, spec.ell, p.v, p.n
    chi = _parity(n, parity)
    shifted = v + ell * (n - chi) / (2 * lam)
    log = mp.pi * lam / ell * shifted ** 2 + ell * mp.pi * (n - 1) * chi / (2 * lam) + mp.log(lam / ell) / 2
    if not _branch(branch):
        return _real(log)
    return _real(log - mp.pi * lam / (4 * ell) + mp.log(2), mp.pi * lam / ell * shifted)


def h_asym_minus(spec: SeriesSpec, p: ScaledPoint) -> LogRealValue:
    """Main term of ``h(-z q^{-n ell})`` with the parity corrections carried by chi(n)."""
    return h_main(spec, p, "minus").value().real()


def h_asym_plus(spec: SeriesSpec, p: ScaledPoint) -> LogRealValue:
    return h_main(spec, p, "plus").value().real()


def aq_main(p: ScaledPoint, branch: str) -> MainTerm:
    lam, v = p.lambda_n, p.v
    gauss = mp.pi * lam * (v + 2 * p.n / lam) ** 2 - mp.pi / (24 * lam)
    if not _branch(branch):
        return _real(gauss + mp.pi * lam / 6 - mp.log(2) / 2)
    return _real(gauss - mp.pi * lam / 12 + mp.log(2) / 2, mp.pi * lam * v)


def cor_aq(p: ScaledPoint, branch: str) -> LogRealValue:
    """Main term of ``A_q(-q^{-4n} z)`` (minus) or ``A_q(q^{-4n} z)`` (plus)."""
    return aq_main(p, branch).value().real()


def jackson_main(p: ScaledPoint, nu, branch: str) -> MainTerm:
    lam, v, nu = p.lambda_n, p.v, _as_mpf(nu)
    if not nu > -1:
        raise DomainError("nu must exceed -1")
    gauss = mp.pi * lam * (v + (4 * p.n + nu) / (2 * lam)) ** 2 - mp.pi / (12 * lam) + nu ** 2 * mp.pi / (4 * lam)
    if not _branch(branch):
        if nu != mp.floor(nu):
            raise PhaseError("e^{i pi nu/2} leaves the quarter-phase axes for non-integer nu")
        return _real(gauss + mp.pi * lam / 3 - mp.log(2) - mp.log(lam) / 2, phase=int(nu) % 4)
    return _real(gauss + mp.pi * lam / 12 - mp.log(lam) / 2, mp.pi * lam * v)


def cor_jackson(p: ScaledPoint, nu, branch: str) -> LogComplexValue:
    """Main term of ``J_nu^(2)(2i sqrt(z q^-nu) q^{-2n})`` (minus) or the real-argument form (plus)."""
    return jackson_main(p, nu, branch).value()


def confluent_main(params: ConfluentParams, p: ScaledPoint, branch: str) -> MainTerm:
    lam, v, ell, rho = p.lambda_n, p.v, params.ell, params.rho
    log = (sum((mp.loggamma(b) for b in params.betas), mpf(0)) - sum((mp.loggamma(a) for a in params.alphas), mpf(0))
           + (rho + ell + mpf(1) / 2) * mp.log(lam) - mp.log(ell) / 2 - ell * mp.log(2) - (rho + 2 * ell) * mp.log(mp.pi)
           + mp.pi * lam / ell * (v + 2 * p.n * ell / lam) ** 2 + ell * mp.pi * lam / 3)
    if not _branch(branch):
        return _real(log)
    return _real(log + mp.log(2) - mp.pi * lam / (4 * ell), mp.pi * lam * v / ell)


def cor_confluent(params: ConfluentParams, p: ScaledPoint, branch: str) -> LogRealValue:
    """Main term of r-phi-s at ``(-1)^{s+1-r} z q^{-ell(4n-1)}`` (minus) or ``(-1)^{s-r} z q^{-ell(4n-1)}`` (plus)."""
    return confluent_main(params, p, branch).value().real()


def ismail_masson_main(p: ScaledPoint, n: int, branch: str, parity: str = "printed") -> MainTerm:
    lam, v = p.lambda_n, p.v
    chi = _parity(n, parity)
    common = mp.pi * n * n / (4 * lam) - mp.pi * (1 + 12 * chi) / (24 * lam) + mp.pi * lam * (v - chi / (2 * lam)) ** 2
    if not _branch(branch):
        # 1/(-i)^n = i^n
        return _real(common + mp.pi * lam / 6 - mp.log(2) / 2, phase=n % 4)
    return _real(common - mp.pi * lam / 12 + mp.log(2) / 2, mp.pi * lam * (v + (n - chi) / (2 * lam)), phase=2 * (n % 2))


def cor_ismail_masson(p: ScaledPoint, n: int, branch: str) -> LogComplexValue:
    """Main term of ``h_n(sinh pi(v + i/2) | q)`` (minus) or ``h_n(sinh pi v | q)`` (plus)."""
    return ismail_masson_main(p, n, branch).value()


def sw_main(p: ScaledPoint, n: int, branch: str, parity: str = "printed") -> MainTerm:
    lam, v = p.lambda_n, p.v
    chi = _parity(n, parity)
    shifted = v + (n - chi) / (2 * lam)
    common = mp.pi * (n - 1) * chi / (2 * lam) - mp.pi / (12 * lam) + mp.pi * lam * shifted ** 2 - mp.log(lam) / 2
    if not _branch(branch):
        return _real(common + mp.pi * lam / 3 - mp.log(2))
    return _real(common + mp.pi * lam / 12, mp.pi * lam * shifted)


def cor_stieltjes_wigert(p: ScaledPoint, n: int, branch: str) -> LogRealValue:
    """Main term of ``S_n(-z q^{-n})`` (minus) or ``S_n(z q^{-n})`` (plus)."""
    return sw_main(p, n, branch).value().real()


def cor_q_laguerre(p: ScaledPoint, n: int, alpha, branch: str) -> LogRealValue:
    """Main term of ``L_n^(alpha)(-/+ z q^{-alpha-n})``; identical in form to the Stieltjes-Wigert one."""
    if not _as_mpf(alpha) > -1:
        raise DomainError("q-Laguerre needs alpha > -1")
    return sw_main(p, n, branch).value().real()


def _theta_signed(index_pos, w: LogRealValue, q: QParameter):
    """``theta_4(w; q)`` for real ``w != 0`` (``theta_4(-w) = theta_3(w)``), as a LogRealValue."""
    if w.is_zero:
        raise DomainError("theta argument must be nonzero")
    index = index_pos if w.sign > 0 else 7 - index_pos
    return theta_nome(index, abs(w), q).real()


def _inverse_a(spec: SeriesSpec, q: QParameter):
    return -sum((qpoch_infinite(q.power(a), q)[0].logmag for a in spec.alphas), mpf(0))


def _residual(exact: LogRealValue, scale: LogRealValue, main: LogRealValue) -> LogRealValue:
    return abs(exact / scale - main)


def lemma_g_theta_rep(spec: SeriesSpec, q: QParameter, z: LogRealValue, n: int, eps=None,
                      n_threshold: int = 0) -> tuple[LogRealValue, RemainderCertificate]:
    """``g(q^{-4 n ell} z) ~ z^{2n} q^{-4 n^2 ell} theta_4(1/z; q^ell)`` with its remainder certificate."""
    if z.is_zero:
        raise DomainError("z must be nonzero")
    ell = spec.ell
    q_ell = q.nome_power(ell)
    scale = z ** (2 * n) * q.power(-4 * n * n * ell)
    theta = _theta_signed(4, 1 / z, q_ell)
    exact = g_eval(spec, q, z * q.power(-4 * n * ell), eps)
    r, s = len(spec.alphas), len(spec.betas)
    bracket = (LogRealValue(1, (n + 1) * q.log_q - q.log_one_minus_q)
               + LogRealValue(1, ell * n * n * q.log_q - n * z.logmag))
    bound = (LogRealValue(1, (s + r + 3) * mp.log(2) + _inverse_a(spec, q))
             * theta_nome(3, 1 / abs(z), q_ell).real() * bracket)
    return scale * theta, RemainderCertificate(bound, _residual(exact, scale, theta), n_threshold)


def lemma_phi_theta_rep(params: ConfluentParams, q: QParameter, z: LogRealValue, n: int, eps=None,
                        n_threshold: int = 0) -> tuple[LogRealValue, RemainderCertificate]:
    """r-phi-s at ``(-1)^{s-r} z q^{-4 n ell}`` against ``theta_4(q^ell/z; q^ell)``."""
    if z.is_zero:
        raise DomainError("z must be nonzero")
    spec, ell = params.spec, params.ell
    q_ell = q.nome_power(ell)
    inf_a = LogRealValue(1, -_inverse_a(spec, q))
    inf_qb = qpoch_infinite(q.power(1), q)[0]
    for b in spec.betas:
        inf_qb = inf_qb * qpoch_infinite(q.power(b), q)[0]
    scale = inf_a * z ** (2 * n) / (inf_qb * q.power(2 * ell * n * (2 * n + 1)))
    theta = _theta_signed(4, q.power(ell) / z, q_ell)
    arg = z * q.power(-4 * n * ell) * ((-1) ** ((params.s - params.r) % 2))
    exact = rphis_eval(params, q, arg, eps)
    bracket = (LogRealValue(1, (n + 1) * q.log_q - q.log_one_minus_q)
               + LogRealValue(1, ell * (n * n + n) * q.log_q - n * z.logmag))
    bound = (LogRealValue(1, (params.s + params.r + 3) * mp.log(2) + _inverse_a(spec, q))
             * theta_nome(3, q.power(ell) / abs(z), q_ell).real() * bracket)
    return scale * theta, RemainderCertificate(bound, _residual(exact, scale, theta), n_threshold)


def lemma_h_theta_rep(spec: SeriesSpec, q: QParameter, z: LogRealValue, n: int, eps=None,
                      n_threshold: int = 0) -> tuple[LogRealValue, RemainderCertificate]:
    """``h_n(z q^{-n ell}) ~ (-z)^{floor(n/2)} q^{-ell (n^2 - chi(n))/4} theta_4(1/z; q^ell)``."""
    if z.is_zero:
        raise DomainError("z must be nonzero")
    ell = spec.ell
    q_ell = q.nome_power(ell)
    chi = char_chi(n)
    scale = (-z) ** (n // 2) * q.power(-ell * (n * n - chi) / mpf(4))
    theta = _theta_signed(4, 1 / z, q_ell)
    exact = h_eval(spec, q, n, z * q.power(-n * ell), eps)
    m = n // 4
    r, s, t = len(spec.alphas), len(spec.betas), len(spec.gammas)
    bracket = (LogRealValue(1, (m + 1) * q.log_q - q.log_one_minus_q)
               + LogRealValue(1, m * z.logmag + ell * m * m * q.log_q)
               + LogRealValue(1, ell * m * m * q.log_q - m * z.logmag))
    bound = (LogRealValue(1, (s + r + 2 * t + 5) * mp.log(2) + _inverse_a(spec, q))
             * theta_nome(3, 1 / abs(z), q_ell).real() * bracket)
    return scale * theta, RemainderCertificate(bound, _residual(exact, scale, theta), n_threshold)
