"""CSV/JSON emission and ceiling-based regression checks."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from mpmath import mp, mpf

from ..errors import ConfigError

COLUMNS = ("n", "lambda_n", "v", "exact_log10", "exact_phase_quarter", "asym_log10", "asym_phase_quarter",
           "rel_err", "predicted_rate", "normalized_err")
DIGITS = 20
SLACK = 2


def fmt(x) -> Optional[str]:
    """20 significant digits; ``None`` for an infinite value (the log of an exact zero)."""
    with mp.workdps(DIGITS + 10):
        x = mpf(x)
        if mp.isinf(x):
            return None
        return mp.nstr(x, DIGITS, strip_zeros=False, min_fixed=0, max_fixed=0,
                       show_zero_exponent=True)


def record_row(rec) -> dict:
    # values carry their own precision; the logs must not be taken at the caller's precision
    with mp.workdps(DIGITS + 20):
        return _row(rec)


def _row(rec) -> dict:
    return {
        "n": str(rec.n),
        "lambda_n": fmt(rec.lambda_n),
        "v": fmt(rec.v),
        "exact_log10": fmt(rec.exact.log10()),
        "exact_phase_quarter": str(rec.exact.quarter_phase),
        "asym_log10": fmt(rec.asym.log10()),
        "asym_phase_quarter": str(rec.asym.quarter_phase),
        "rel_err": fmt(rec.rel_err),
        "predicted_rate": fmt(rec.predicted_rate),
        "normalized_err": fmt(rec.normalized_err),
    }


def render(records, format: str = "csv") -> str:
    rows = [record_row(r) for r in records]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow(["-inf" if row[c] is None else row[c] for c in COLUMNS])
        return buf.getvalue()
    if format == "json":
        # numbers are written as raw tokens so no digit is lost to a float round trip
        objs = ["{" + ", ".join(f'"{c}": {"null" if row[c] is None else row[c]}' for c in COLUMNS) + "}"
                for row in rows]
        return "[\n" + ",\n".join("  " + o for o in objs) + ("\n" if objs else "") + "]\n"
    raise ConfigError(f"format must be csv or json, got {format!r}")


def emit(records, format: str = "csv", path=None) -> str:
    """Write records to ``path`` (or return the text when ``path`` is None)."""
    text = render(records, format)
    if path is not None:
        Path(path).write_text(text)
    return text


def cell_key(rec) -> str:
    return f"n={rec.n},v={rec.v_label or fmt(rec.v)}"


@dataclass
class RegressionReport:
    preset: str
    failures: list = field(default_factory=list)
    new_cells: list = field(default_factory=list)
    worst: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list:
        out = [f"[{self.preset}] {'PASS' if self.passed else 'FAIL'}"]
        for key, value, ceiling in self.worst:
            out.append(f"  worst {key}: normalized_err={value} ceiling={ceiling}")
        for key, value, ceiling in self.failures:
            out.append(f"  FAIL {key}: normalized_err={value} exceeds {SLACK}x ceiling {ceiling}")
        for key in self.new_cells:
            out.append(f"  new-cell {key}: no stored ceiling")
        for flag in self.flags:
            out.append(f"  flag {flag}")
        return out


def load_ceilings(path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read ceilings file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"ceilings file {path} is not valid JSON: {exc}") from exc
    data.setdefault("sweeps", {})
    data.setdefault("certificates", {})
    return data


def save_ceilings(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def ceilings_from(records) -> dict:
    return {cell_key(r): fmt(r.normalized_err) for r in records}


def regression_check(records, expected_ceilings_path, preset: str, n_worst: int = 3) -> RegressionReport:
    """Fail any cell whose normalized error exceeds twice its stored ceiling; unseen cells only get reported."""
    stored = load_ceilings(expected_ceilings_path)["sweeps"].get(preset, {})
    report = RegressionReport(preset)
    ranked = []
    for rec in records:
        key = cell_key(rec)
        value = fmt(rec.normalized_err)
        if key not in stored:
            report.new_cells.append(key)
            continue
        ceiling = stored[key]
        ranked.append((rec.normalized_err, key, value, ceiling))
        if rec.normalized_err > SLACK * mpf(ceiling):
            report.failures.append((key, value, ceiling))
    # two stable sorts: negating an mpf would round it at the caller's precision
    ranked.sort(key=lambda item: item[1])
    ranked.sort(key=lambda item: item[0], reverse=True)
    report.worst = [(key, value, ceiling) for _, key, value, ceiling in ranked[:n_worst]]
    return report


def n2_drift(records) -> Optional[str]:
    """Flag a log-ratio ``log|exact/asym|`` that tracks ``n^2/lambda_n`` across the sweep.

    Cells with an exact zero on either side are skipped.
    Returns a message when the drift is systematic, else None.
    """
    pts = []
    for r in records:
        if r.asym.is_zero or r.exact.is_zero:
            continue
        d = r.exact.logmag - r.asym.logmag
        pts.append((mpf(r.n) ** 2 / r.lambda_n, d))
    if len(pts) < 3:
        return None
    xs, ds = zip(*pts)
    mx, md = sum(xs) / len(xs), sum(ds) / len(ds)
    sxx = sum((x - mx) ** 2 for x in xs)
    sdd = sum((d - md) ** 2 for d in ds)
    if sxx == 0 or sdd == 0:
        return None
    slope = sum((x - mx) * (d - md) for x, d in zip(xs, ds)) / sxx
    corr = slope * mp.sqrt(sxx / sdd)
    if max(abs(d) for d in ds) > mpf("0.1") and abs(corr) > mpf("0.9"):
        return f"systematic n^2/lambda_n drift in log|exact/asym| (slope {mp.nstr(slope, 6)}, corr {mp.nstr(corr, 4)})"
    return None
