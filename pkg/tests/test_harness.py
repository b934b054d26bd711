import json
from decimal import Decimal

import pytest
from mpmath import mp, mpf

from qscale import ConfigError, PrecisionError
from qscale.harness import emit, evaluate_cell, parse_config, regression_check, run_sweep
from qscale.harness import cli, sweep
from qscale.harness.report import COLUMNS, ceilings_from, n2_drift, save_ceilings

AQ = """
# Ramanujan minus branch
function=aq
branch=minus
scale=n^0.4
n_list=64,128,256
v_list=0.25
precision=40
"""


def cfg_from(text, **override):
    lines = [ln for ln in text.strip().splitlines() if ln.split("=", 1)[0] not in override]
    lines += [f"{k}={v}" for k, v in override.items()]
    return parse_config("\n".join(lines), "test")


# ---------------------------------------------------------------- config

def test_parse_config_fields():
    cfg = cfg_from(AQ)
    assert cfg.n_list == (64, 128, 256)
    assert cfg.v_list == ("0.25",)
    assert cfg.precision.digits == 40
    assert parse_config(cfg.to_text()) == cfg


@pytest.mark.parametrize("bad", [
    "function=aq\nbranch=minus\ncolour=blue",
    "function=aq\nbranch=minus\nn_list=128,64",
    "function=aq\nbranch=minus\nv_list=cos0",
    "function=aq\nbranch=minus\nn_list=64,512\nprecision=20",
    "function=aq\nbranch=minus\nscale=n^0.6",
    "function=aq\nbranch=minus\nscale=log(n)",
    "function=zeta\nbranch=minus",
    "function=aq\nbranch=minus\nbranch=plus",
    "function=jackson\nbranch=minus\nnu=0.5",
    "function=confluent\nbranch=minus\nalphas=1,1\nbetas=1",
    "function=q_laguerre\nbranch=minus\nalpha=-1",
    "branch=minus",
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_inadmissible_scale_is_rejected_before_evaluation(monkeypatch):
    calls = []
    monkeypatch.setattr(sweep, "evaluate_cell", lambda *a: calls.append(a))
    with pytest.raises(ConfigError):
        run_sweep(cfg_from(AQ, scale="n^0.6"))
    assert calls == []


# ---------------------------------------------------------------- sweeps

def test_empty_sweep():
    assert run_sweep(cfg_from(AQ, n_list="")) == []
    assert emit([], "csv") == ",".join(COLUMNS) + "\n"
    assert json.loads(emit([], "json")) == []


def test_reference_sweep():
    records = run_sweep(cfg_from(AQ), workers=1)
    assert [r.n for r in records] == [64, 128, 256]
    assert all(r.normalized_err <= 4 for r in records)
    assert records[0].rel_err > records[1].rel_err > records[2].rel_err


def test_parallel_and_serial_agree():
    cfg = cfg_from(AQ, v_list="-0.5,0.1,0.25")
    assert emit(run_sweep(cfg, workers=1)) == emit(run_sweep(cfg, workers=3))


def test_ordering_is_n_major():
    records = run_sweep(cfg_from(AQ, n_list="64,128", v_list="0.25,-0.5"), workers=1)
    assert [(r.n, r.v_label) for r in records] == [(64, "0.25"), (64, "-0.5"), (128, "0.25"), (128, "-0.5")]


def test_cosine_zero_cell():
    cfg = cfg_from(AQ, branch="plus", v_list="cos0", n_list="64,128")
    for rec in run_sweep(cfg, workers=1):
        assert rec.asym.is_zero
        assert abs(mp.cos(mp.pi * rec.lambda_n * rec.v)) < mpf(10) ** -30
        assert rec.normalized_err < 10
    text = emit(run_sweep(cfg, workers=1), "json")
    assert json.loads(text)[0]["asym_log10"] is None
    assert "-inf" in emit(run_sweep(cfg, workers=1), "csv")


def test_eps_tightening_leaves_normalized_error():
    base = cfg_from(AQ, eps="1e-45")
    tight = cfg_from(AQ, eps="1e-46")
    for a, b in zip(run_sweep(base, workers=1), run_sweep(tight, workers=1)):
        assert abs(a.normalized_err / b.normalized_err - 1) < mpf("0.01")


def test_loose_eps_triggers_a_precision_retry():
    rec = evaluate_cell(cfg_from(AQ, eps="1e-3"), 64, "0.25")
    assert rec.digits == 80


def test_precision_error_names_the_cell(monkeypatch):
    monkeypatch.setattr(sweep, "NOISE_MARGIN", mpf(10) ** 100)
    with pytest.raises(PrecisionError) as info:
        evaluate_cell(cfg_from(AQ), 64, "0.25")
    assert info.value.cell == ("test", 64, "0.25")


def test_laguerre_printed_convention_misses():
    ok = cfg_from(AQ, function="q_laguerre", n_list="64,128")
    printed = cfg_from(AQ, function="q_laguerre", n_list="64,128", laguerre_z="minus")
    assert all(r.normalized_err < 100 for r in run_sweep(ok, workers=1))
    assert all(r.rel_err >= mpf("0.5") for r in run_sweep(printed, workers=1))


def test_odd_n_uniform_parity():
    base = dict(function="stieltjes_wigert", n_list="65,129", v_list="0.25")
    printed = run_sweep(cfg_from(AQ, **base), workers=1)
    uniform = run_sweep(cfg_from(AQ, parity="uniform", **base), workers=1)
    assert all(r.rel_err > mpf("0.1") for r in printed)
    assert all(r.normalized_err < 100 for r in uniform)


# ---------------------------------------------------------------- emission and regression

def test_json_round_trip_keeps_twenty_digits():
    rec = run_sweep(cfg_from(AQ, n_list="64"), workers=1)[0]
    row = json.loads(emit([rec], "json"), parse_float=Decimal)[0]
    assert list(row) == list(COLUMNS)
    assert row["n"] == 64
    digits = row["lambda_n"].as_tuple().digits
    assert len(digits) == 20
    assert abs(mpf(str(row["lambda_n"])) - rec.lambda_n) < mpf(10) ** -18


def test_csv_is_byte_identical(tmp_path):
    cfg = cfg_from(AQ)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(run_sweep(cfg, workers=1), "csv", a)
    emit(run_sweep(cfg, workers=2), "csv", b)
    assert a.read_bytes() == b.read_bytes()


def test_unwritable_path():
    with pytest.raises(OSError):
        emit([], "csv", "/nonexistent-dir/out.csv")


def test_regression_check(tmp_path):
    records = run_sweep(cfg_from(AQ), workers=1)
    path = tmp_path / "ceilings.json"
    save_ceilings({"sweeps": {"aq": ceilings_from(records)}, "certificates": {}}, path)
    assert regression_check(records, path, "aq").passed

    save_ceilings({"sweeps": {"aq": {k: "0.0e+0" for k in ceilings_from(records)}}, "certificates": {}}, path)
    report = regression_check(records, path, "aq")
    assert not report.passed
    assert any("n=64,v=0.25" in line for line in report.lines())

    save_ceilings({"sweeps": {}, "certificates": {}}, path)
    report = regression_check(records, path, "aq")
    assert report.passed and len(report.new_cells) == 3


def test_n2_drift_flag():
    cfg = cfg_from(AQ, function="ismail_masson", branch="plus", n_list="64,128,256", v_list="0.1")
    records = run_sweep(cfg, workers=1)
    assert n2_drift(records) is None
    skewed = [sweep.ComparisonRecord(r.n, r.lambda_n, r.v, r.exact, r.asym * mp.exp(r.n ** 2 / r.lambda_n / 1000),
                                     r.rel_err, r.predicted_rate, r.normalized_err) for r in records]
    assert "n^2" in n2_drift(skewed)


# ---------------------------------------------------------------- command line

def test_cli_eval(capsys):
    assert cli.main(["eval", "aq", "--n", "4", "--v", "0", "--lambda", "20", "--asym"]) == 0
    out = json.loads(capsys.readouterr().out)
    expect = (mp.pi * 20 * (mpf(8) / 20) ** 2 + 20 * mp.pi / 6 - mp.pi / 480 - mp.log(2) / 2) / mp.ln10
    assert abs(out["log10_magnitude"] - float(expect)) < 1e-12
    assert out["quarter_phase"] == 0
    assert cli.main(["eval", "jackson", "--n", "8", "--v", "0.1", "--nu", "1", "--q-log-t", "0.2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["quarter_phase"] == 1 and out["decimal_value"] > 0


def test_cli_sweep(tmp_path, capsys):
    path = tmp_path / "aq.cfg"
    path.write_text(AQ)
    out = tmp_path / "aq.json"
    assert cli.main(["sweep", "--config", str(path), "--out", str(out), "--format", "json"]) == 0
    assert len(json.loads(out.read_text())) == 3
    path.write_text(AQ + "\ncolour=blue\n")
    assert cli.main(["sweep", "--config", str(path)]) == 2


def test_cli_verify_codes(tmp_path, capsys, monkeypatch):
    ceilings = tmp_path / "c.json"
    assert cli.main(["verify", "--preset", "g_minus", "--ceilings", str(ceilings), "--bootstrap"]) == 0
    assert cli.main(["verify", "--preset", "g_minus", "--ceilings", str(ceilings)]) == 0
    data = json.loads(ceilings.read_text())
    data["sweeps"]["g_minus"] = {k: "0.0e+0" for k in data["sweeps"]["g_minus"]}
    ceilings.write_text(json.dumps(data))
    assert cli.main(["verify", "--preset", "g_minus", "--ceilings", str(ceilings)]) == 1
    assert "FAIL n=" in capsys.readouterr().out
    assert cli.main(["verify", "--preset", "nope", "--ceilings", str(ceilings)]) == 2
    assert cli.main(["verify", "--preset", "g_minus", "--ceilings", str(tmp_path / "missing.json")]) == 2
    monkeypatch.setattr(sweep, "NOISE_MARGIN", mpf(10) ** 100)
    assert cli.main(["verify", "--preset", "g_minus", "--ceilings", str(ceilings), "--workers", "1"]) == 3


def test_every_corollary_has_presets():
    names = cli.preset_names()
    for fn in ("g", "h", "aq", "jackson", "confluent", "ismail_masson", "stieltjes_wigert", "q_laguerre"):
        assert f"{fn}_minus" in names and f"{fn}_plus" in names
    assert {"r_g", "r_phi", "r_h"} <= set(names)


def test_bundled_ceilings_cover_every_preset():
    data = json.loads(cli.default_ceilings().read_text())
    for name in cli.preset_names():
        assert name in data["sweeps"] or name in data["certificates"]


def test_cli_eval_huge_value_has_no_decimal(capsys):
    assert cli.main(["eval", "g", "--n", "4096", "--v", "0", "--lambda", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["log10_magnitude"] > 300 and out["decimal_value"] is None


@pytest.mark.parametrize("ambient", [15, 200])
def test_records_do_not_depend_on_ambient_precision(ambient):
    reference = emit(run_sweep(cfg_from(AQ, branch="plus", v_list="0.1,cos0"), workers=1))
    with mp.workdps(ambient):
        again = emit(run_sweep(cfg_from(AQ, branch="plus", v_list="0.1,cos0"), workers=1))
    assert again == reference
