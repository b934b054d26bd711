import random

import pytest
from mpmath import mp, mpf

from qscale.errors import DomainError, RegimeError
from qscale.numkernel import LogRealValue
from qscale.qpochhammer import QParameter, qpoch_infinite
from qscale.theta import (
    NomeForm,
    ThetaPoint,
    theta_auto,
    theta_nome,
    theta_product,
    theta_series,
    theta_transform,
)

TOL = mpf(10) ** -(50 - 12)


def close(a, b, tol=TOL, scale=None):
    """Relative agreement; ``scale`` (a log magnitude) widens the reference when both sides cancel."""
    d = a - b
    if d.is_zero:
        return True
    refs = [x.logmag for x in (a, b) if not x.is_zero]
    if scale is not None:
        refs.append(scale)
    return d.logmag - max(refs) <= mp.log(tol)


def test_series_examples():
    assert theta_series(ThetaPoint(0, mpf("0.7"), 1)).is_zero
    assert theta_series(ThetaPoint(mpf(1) / 2, mpf("0.7"), 2)).is_zero
    v = theta_series(ThetaPoint(0, 1, 3), mpf("1e-45"))
    assert mp.nstr(v.to_mpc().real, 30).startswith("1.08643481121330801457")
    oracle = 1 + 2 * mp.fsum(mp.exp(-mp.pi * k * k) for k in range(1, 40))
    assert abs(v.to_mpc().real - oracle) < mpf(10) ** -55


def test_product_examples():
    assert theta_product(ThetaPoint(0, mpf("0.4"), 1)).is_zero
    q = QParameter.from_q(mpf("0.3"))
    q2 = q.nome_power(2)
    expected = qpoch_infinite(q2.power(1), q2)[0] * qpoch_infinite(q.power(1), q2)[0] ** 2
    got = theta_product(NomeForm(LogRealValue.one(), q).point(4))
    assert close(got.value, expected)
    pt = NomeForm(LogRealValue.from_number(mpf("1.5")), QParameter.from_q(mpf("0.25"))).point(3)
    assert close(theta_product(pt).value, theta_series(pt).value, mpf("1e-40"))


def test_transform_examples():
    p = ThetaPoint(0, 1, 3)
    image, m = theta_transform(p)
    assert image == p and m.quarter_phase == 0 and abs(m.logmag) < mpf(10) ** -55
    image, m = theta_transform(ThetaPoint(0, 4, 4))
    assert image.index == 2 and image.tau_im == mpf(1) / 4 and image.v == 0
    assert abs(m.value.to_mpf() - 2) < mpf(10) ** -55
    s, v = mpf("0.6"), mpf("0.3")
    image, m = theta_transform(ThetaPoint(v, s, 2))
    assert image.index == 4 and image.imaginary
    assert abs(m.logmag - (mp.log(s) / 2 + mp.pi * v * v / s)) < mpf(10) ** -55
    _, m1 = theta_transform(ThetaPoint(v, s, 1))
    assert m1.quarter_phase == 3


def test_theta_auto_chain_example():
    # theta_3(i/4 | i/100) = 10 e^{100 pi/16} theta_3(25 | 100 i)
    got = theta_auto(ThetaPoint(mpf("0.25"), mpf("0.01"), 3, imaginary=True))
    image = theta_series(ThetaPoint(25, 100, 3))
    expected = image.value * LogRealValue(1, mp.log(10) + mp.pi * 100 * mpf("0.0625"))
    assert got.quarter_phase == 0 and close(got.value, expected)


def test_theta_auto_fixed_point_same_path():
    p = ThetaPoint(mpf("0.3"), 1, 4, imaginary=True)
    assert theta_auto(p) == theta_series(p)


def test_theta4_cosine_zero_display():
    lam = 25
    q = QParameter.from_lambda(lam)
    z = LogRealValue(1, -2 * mp.pi * mpf("0.3"))  # theta_4(e^{-0.6 pi}; e^{-pi/25})
    got = theta_nome(4, z, q)
    envelope = mp.log(2 * 5) + mp.pi * lam * mpf("0.09") - mp.pi * lam / 4
    bound = envelope + mp.log(3) - 2 * mp.pi * lam
    # cos(25 pi 0.3) = 0, so only the remainder survives
    assert got.is_zero or got.logmag <= bound


def test_regime_error_for_tiny_tau():
    with pytest.raises(RegimeError):
        theta_series(ThetaPoint(0, mpf("1e-16"), 3))
    assert not theta_auto(ThetaPoint(0, mpf("1e-16"), 3)).is_zero


def test_point_validation():
    with pytest.raises(DomainError):
        ThetaPoint(0, 1, 5)
    with pytest.raises(DomainError):
        ThetaPoint(0, 0, 3)
    with pytest.raises(DomainError):
        NomeForm(LogRealValue(-1, 0), QParameter(1))


def test_nome_form_matches_direct_products():
    q = QParameter.from_q(mpf("0.6"))
    z = LogRealValue.from_number(mpf("2.5"))
    q2 = q.nome_power(2)
    direct = (qpoch_infinite(q2.power(1), q2)[0] * qpoch_infinite(z * q.power(1), q2)[0]
              * qpoch_infinite(q.power(1) / z, q2)[0])
    got = theta_nome(4, z, q)
    assert got.real().sign == direct.sign == -1
    assert close(got.real(), direct, mpf("1e-45"))


def _random_points(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        yield ThetaPoint(mpf(rng.uniform(-1.5, 1.5)), mpf(rng.uniform(0.2, 5)), rng.randint(1, 4),
                         imaginary=rng.random() < 0.5)


def test_series_product_agreement_random():
    for p in _random_points(200, 2024):
        diag = {}
        a = theta_series(p, diagnostics=diag)
        b = theta_product(p)
        assert a.quarter_phase == b.quarter_phase or a.is_zero
        assert close(a, b, scale=diag["max_log"] - 12 * mp.log(10)), p


def transformed_pair(index, s, vh):
    """Both sides of a transformation row, with digits added until cancellation is paid for."""
    extra = 0
    while True:
        with mp.workdps(mp.dps + extra):
            p = ThetaPoint(mpf(vh), mpf(s), index, imaginary=True)
            image, m = theta_transform(p)
            dl, dr = {}, {}
            left = theta_series(image, diagnostics=dl)
            right = m * theta_series(p, diagnostics=dr)
            scale = max(dl.get("max_log", mp.ninf), dr.get("max_log", mp.ninf) + m.logmag)
            values = [x.logmag for x in (left, right) if not x.is_zero]
            lost = (scale - min(values)) / mp.ln10 if values else 0
            if lost < extra + 5 or extra >= 240:
                return left, right, scale
        extra = int(lost) + 10


def is_zero_cell(left, right, scale):
    return all(x.is_zero or x.logmag - scale <= mp.log(TOL) for x in (left, right))


@pytest.mark.parametrize("index", [1, 2, 3, 4])
def test_transformation_rows(index):
    for s in ("0.05", "0.3", "1", "3", "20"):
        for vh in ("-1", "-0.4", "0", "0.7", "1.3"):
            left, right, scale = transformed_pair(index, s, vh)
            if is_zero_cell(left, right, scale):
                # theta_1 vanishes on the lattice vh/s in Z; nothing else may cancel to noise
                ratio = mpf(vh) / mpf(s)
                assert index == 1 and abs(ratio - mp.nint(ratio)) < mpf(10) ** -40, (s, vh)
                continue
            assert left.quarter_phase == right.quarter_phase, (s, vh)
            assert close(left, right), (s, vh)


def test_transformation_real_argument():
    for index in (1, 2, 3, 4):
        for s in ("0.3", "3"):
            p = ThetaPoint(mpf("0.37"), mpf(s), index)
            image, m = theta_transform(p)
            assert close(theta_series(image), m * theta_series(p))


def test_theta_auto_against_brute_force():
    rng = random.Random(7)
    eps = mpf("1e-40")
    for _ in range(30):
        p = ThetaPoint(mpf(rng.uniform(-1, 1)), mpf(rng.uniform(0.05, 0.999)), rng.randint(1, 4),
                       imaginary=rng.random() < 0.5)
        got = theta_auto(p, eps)
        with mp.workdps(120):
            brute = theta_series(p, mpf(10) ** -100)
        assert got.quarter_phase == brute.quarter_phase
        assert close(got.value, brute.value, eps)


def test_quasi_periodicity():
    for v in ("0.13", "-0.71"):
        a = theta_series(ThetaPoint(mpf(v), mpf("0.8"), 3))
        b = theta_series(ThetaPoint(mpf(v) + 1, mpf("0.8"), 3))
        assert close(a, b)
