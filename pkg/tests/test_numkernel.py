from fractions import Fraction
from math import comb

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from qscale.errors import PhaseError, UnsupportedOrderError
from qscale.numkernel import (
    LogComplexValue,
    LogRealValue,
    Precision,
    bernoulli_number,
    bernoulli_polynomial,
    complex_log_sum,
    log_add,
    log_sum,
)


def test_bernoulli_examples():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(1) == Fraction(-1, 2)
    assert bernoulli_number(3) == 0


def test_bernoulli_polynomial_examples():
    assert bernoulli_polynomial(0, 0.7) == 1
    assert bernoulli_polynomial(1, 0) == Fraction(-1, 2)
    assert bernoulli_polynomial(2, 1) == Fraction(1, 6)


def test_bernoulli_order_limits():
    with pytest.raises(UnsupportedOrderError):
        bernoulli_number(65)
    with pytest.raises(UnsupportedOrderError):
        bernoulli_polynomial(66, 0)
    bernoulli_polynomial(65, Fraction(1, 3))


def test_odd_bernoulli_vanish():
    assert all(bernoulli_number(2 * k + 1) == 0 for k in range(1, 32))


def test_polynomial_at_zero_is_number():
    for k in range(65):
        assert bernoulli_polynomial(k, 0) == bernoulli_number(k)


def test_bernoulli_recurrence_exact():
    for k in range(1, 64):
        assert sum(comb(k + 1, j) * bernoulli_number(j) for j in range(k + 1)) == 0


def test_bernoulli_against_mpmath():
    for k in (2, 10, 30, 64):
        b = bernoulli_number(k)
        assert abs(mpf(b.numerator) / b.denominator - mpmath.bernoulli(k)) <= mpf(10) ** -50 * abs(mpmath.bernoulli(k))


def test_polynomial_float_matches_exact():
    x = Fraction(7, 10)
    for k in (3, 12, 40):
        exact = bernoulli_polynomial(k, x)
        approx = bernoulli_polynomial(k, mpf(7) / 10)
        ref = mpf(exact.numerator) / exact.denominator
        assert abs(approx - ref) <= mpf(10) ** -45 * abs(ref)
        assert abs(approx - mpmath.bernpoly(k, mpf(7) / 10)) <= mpf(10) ** -45 * abs(ref)


def test_log_add_examples():
    two = LogRealValue(1, mp.log(2))
    assert log_add(two, LogRealValue.zero()) == two
    s = log_add(LogRealValue(1, mp.log(3)), LogRealValue(1, mp.log(5)))
    assert s.sign == 1 and abs(s.logmag - mp.log(8)) < mpf(10) ** -55
    assert log_add(LogRealValue(1, mp.log(7)), LogRealValue(-1, mp.log(7))).is_zero


def test_zero_ignores_logmag():
    assert LogRealValue(0, 5) == LogRealValue(0, -3)
    assert LogComplexValue(3, LogRealValue(0)) == LogComplexValue(0, LogRealValue(0))


def test_huge_magnitudes_do_not_overflow():
    a = LogRealValue(1, mpf(10) ** 9)
    b = LogRealValue(-1, mpf(10) ** 9 - 1)
    s = a + b
    assert s.sign == 1
    assert abs(s.logmag - (mpf(10) ** 9 + mp.log(1 - mp.exp(-1)))) < mpf(10) ** -40
    assert (a * a).logmag == 2 * mpf(10) ** 9


def test_log_sum_cancellation_and_diagnostics():
    diag = {}
    vals = [LogRealValue.from_number(x) for x in (5, -3, 1e-30, -2)]
    s = log_sum(vals, diag)
    assert abs(s.to_mpf() - mpf("1e-30")) < mpf(10) ** -45
    assert diag["n_terms"] == 4
    assert abs(diag["max_log"] - mp.log(5)) < mpf(10) ** -50


def test_negative_power_phase_error():
    with pytest.raises(PhaseError):
        LogRealValue(-1, 1) ** mpf(0.5)
    assert (LogRealValue(-1, 1) ** 3).sign == -1


def test_complex_quarter_phase():
    i = LogComplexValue.unit(1)
    assert i * i == LogComplexValue.from_real(-1)
    assert (i ** 4).quarter_phase == 0
    assert LogComplexValue(1, LogRealValue(-1, 0)).quarter_phase == 3
    with pytest.raises(PhaseError):
        complex_log_sum([i, LogComplexValue.unit(0)])
    with pytest.raises(PhaseError):
        i.real()
    s = LogComplexValue.unit(1) + LogComplexValue.unit(3) * 3
    assert s.quarter_phase == 3 and abs(s.value.to_mpf() - 2) < mpf(10) ** -50


def test_precision_policy(monkeypatch):
    assert Precision(50).dps == 60
    assert Precision(30).doubled().digits == 60
    with pytest.raises(ValueError):
        Precision(10)
    monkeypatch.setenv("QSCALE_PRECISION", "40")
    assert Precision.from_env().digits == 40


logmags = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
signs = st.sampled_from([-1, 0, 1])


def _close(x, y, scale):
    """|x - y| relative to the largest operand magnitude, in log form."""
    d = x - y
    if d.is_zero:
        return True
    return d.logmag - scale <= -(50 - 12) * mp.log(10)


@settings(max_examples=200, deadline=None)
@given(signs, logmags, signs, logmags)
def test_log_add_commutes(sa, la, sb, lb):
    a, b = LogRealValue(sa, la), LogRealValue(sb, lb)
    assert log_add(a, b) == log_add(b, a)


@settings(max_examples=200, deadline=None)
@given(signs, logmags, signs, logmags, signs, logmags)
def test_log_add_associates(sa, la, sb, lb, sc, lc):
    a, b, c = LogRealValue(sa, la), LogRealValue(sb, lb), LogRealValue(sc, lc)
    scale = max(v.logmag for v in (a, b, c) if not v.is_zero) if any(not v.is_zero for v in (a, b, c)) else 0
    assert _close((a + b) + c, a + (b + c), scale)
