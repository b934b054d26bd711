"""Exact-versus-asymptotic comparison over an ``(n, v)`` grid."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from ..asymptotics import (MainTerm, ScaledPoint, aq_main, confluent_main, g_main, h_main, ismail_masson_main,
                           jackson_main, sw_main)
from ..errors import PrecisionError
from ..numkernel import LogComplexValue, LogRealValue, Precision
from ..qseries import (g_eval, h_eval, ismail_masson_h, jackson_j2, q_laguerre_eval, ramanujan_aq, rphis_eval,
                       stieltjes_wigert_eval)
from .config import COS_ZERO, SweepConfig

# a measured error must clear the numerical noise floor by this factor
NOISE_MARGIN = 10


@dataclass(frozen=True)
class ComparisonRecord:
    """One sweep cell.  ``rel_err`` is the bracket residual on plus branches."""

    n: int
    lambda_n: mpf
    v: mpf
    exact: LogComplexValue
    asym: LogComplexValue
    rel_err: mpf
    predicted_rate: mpf
    normalized_err: mpf
    v_label: str = ""
    digits: int = 0


def _signed(value: LogRealValue, plus: bool) -> LogRealValue:
    return value if plus else -value


def _exact_and_main(cfg: SweepConfig, p: ScaledPoint, eps, diag: dict) -> tuple[LogComplexValue, MainTerm]:
    """Exact value at the argument each formula is stated for, and the matching main term.

    Arguments are assembled in log form from ``log q = -pi/lambda_n``.
    """
    plus = cfg.branch == "plus"
    q, n, v, t = p.q, p.n, p.v, p.q.t
    z = LogRealValue(1, p.log_z)
    fn = cfg.function
    if fn == "g":
        spec = cfg.series_spec()
        exact = g_eval(spec, q, _signed(z * q.power(-4 * n * spec.ell), plus), eps, diag)
        return LogComplexValue.from_real(exact), g_main(spec, p, cfg.branch)
    if fn == "h":
        spec = cfg.series_spec()
        exact = h_eval(spec, q, n, _signed(z * q.power(-n * spec.ell), plus), eps, diag)
        return LogComplexValue.from_real(exact), h_main(spec, p, cfg.branch, cfg.parity)
    if fn == "aq":
        exact = ramanujan_aq(_signed(z * q.power(-4 * n), plus), q, eps, diag)
        return LogComplexValue.from_real(exact), aq_main(p, cfg.branch)
    if fn == "jackson":
        nu = mpf(cfg.nu)
        # 2 sqrt(z q^-nu) q^-2n, times i on the minus branch
        log_arg = mp.log(2) + (p.log_z + mp.pi * t * nu) / 2 + 2 * mp.pi * t * n
        arg = LogComplexValue(0 if plus else 1, LogRealValue(1, log_arg))
        return jackson_j2(arg, nu, q, eps, diag), jackson_main(p, nu, cfg.branch)
    if fn == "confluent":
        params = cfg.confluent_params()
        flips = params.s - params.r + (0 if plus else 1)
        arg = z * q.power(-params.ell * (4 * n - 1))
        exact = rphis_eval(params, q, arg if flips % 2 == 0 else -arg, eps, diag)
        return LogComplexValue.from_real(exact), confluent_main(params, p, cfg.branch)
    if fn == "ismail_masson":
        # e^xi with xi = pi v (plus) or pi (v + i/2) (minus)
        e_xi = LogComplexValue(0 if plus else 1, LogRealValue(1, mp.pi * v))
        return ismail_masson_h(n, e_xi, q, diag), ismail_masson_main(p, n, cfg.branch, cfg.parity)
    if fn == "stieltjes_wigert":
        exact = stieltjes_wigert_eval(n, _signed(z * q.power(-n), plus), q, eps, diag)
        return LogComplexValue.from_real(exact), sw_main(p, n, cfg.branch, cfg.parity)
    alpha = mpf(cfg.alpha)
    z_lag = z if cfg.laguerre_z == "plus" else LogRealValue(1, -p.log_z)
    exact = q_laguerre_eval(n, alpha, _signed(z_lag * q.power(-alpha - n), plus), q, eps, diag)
    return LogComplexValue.from_real(exact), sw_main(p, n, cfg.branch, cfg.parity)


def predicted_rate(cfg: SweepConfig, lam):
    if cfg.function == "confluent":
        return 1 / lam
    k = 2 if cfg.branch == "plus" else 1
    return mp.exp(-k * mp.pi * lam / cfg.ell_value)


def cos_zero_v(cfg: SweepConfig, n: int, lam):
    """Smallest ``v >= 0`` at which the plus-branch cosine vanishes."""
    angle = lambda v: _exact_free_main(cfg, ScaledPoint(n, v, lam)).angle
    b = angle(mpf(0))
    a = angle(mpf(1)) - b
    k = mp.ceil((b - mp.pi / 2) / mp.pi)
    return (mp.pi / 2 + k * mp.pi - b) / a


def _exact_free_main(cfg: SweepConfig, p: ScaledPoint) -> MainTerm:
    fn = cfg.function
    if fn == "g":
        return g_main(cfg.series_spec(), p, cfg.branch)
    if fn == "h":
        return h_main(cfg.series_spec(), p, cfg.branch, cfg.parity)
    if fn == "aq":
        return aq_main(p, cfg.branch)
    if fn == "jackson":
        return jackson_main(p, mpf(cfg.nu), cfg.branch)
    if fn == "confluent":
        return confluent_main(cfg.confluent_params(), p, cfg.branch)
    if fn == "ismail_masson":
        return ismail_masson_main(p, p.n, cfg.branch, cfg.parity)
    return sw_main(p, p.n, cfg.branch, cfg.parity)


def _measure(cfg: SweepConfig, n: int, v_label: str, precision: Precision, eps) -> tuple[ComparisonRecord, mpf]:
    lam = cfg.scale(n)
    v = cos_zero_v(cfg, n, lam) if v_label == COS_ZERO else mpf(v_label)
    p = ScaledPoint(n, v, lam)
    diag: dict = {}
    exact, main = _exact_and_main(cfg, p, eps, diag)
    asym = main.value()
    if main.angle is None:
        ratio = (exact / asym).to_mpc()
        err = abs(ratio - 1)
        ref = asym.logmag
    else:
        err = abs((exact / main.prefactor).to_mpc() - mp.cos(main.angle))
        ref = main.prefactor.logmag
    # digits lost to cancellation in the exact sum, measured against the main term
    noise = max(mpf(eps), mpf(10) ** (-mp.dps) * mp.exp(diag.get("max_log", ref) - ref))
    rate = predicted_rate(cfg, lam)
    record = ComparisonRecord(n, lam, v, exact, asym, err, rate, err / rate, v_label, precision.digits)
    return record, noise


def evaluate_cell(cfg: SweepConfig, n: int, v_label: str) -> ComparisonRecord:
    """Evaluate one cell; retry once at doubled precision if the result sits near the noise floor."""
    precision = cfg.precision
    for attempt in range(2):
        with precision.workdps():
            eps = cfg.working_eps() if attempt == 0 else mpf(10) ** (2 - mp.dps)
            record, noise = _measure(cfg, n, v_label, precision, eps)
            if record.rel_err > NOISE_MARGIN * noise:
                return record
        precision = precision.doubled()
    raise PrecisionError(
        f"{cfg.label}: cell n={n}, v={v_label} is within {NOISE_MARGIN}x of the noise floor even at "
        f"{precision.digits // 2} digits", cell=(cfg.label, n, v_label))


def _cell_job(args):
    cfg, n, v_label = args
    return evaluate_cell(cfg, n, v_label)


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> list:
    """One record per cell, n-major and v-minor, independent of scheduling."""
    cells = [(cfg, n, v) for n in cfg.n_list for v in cfg.v_list]
    if not cells:
        return []
    if workers is None:
        workers = min(len(cells), os.cpu_count() or 1)
    if workers <= 1 or len(cells) == 1:
        return [_cell_job(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell_job, cells))
