"""``qscale`` command line: ``eval``, ``sweep`` and ``verify``."""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from mpmath import mpf

from ..asymptotics import ScaledPoint
from ..errors import ConfigError, PrecisionError, QScaleError
from ..numkernel import Precision
from .certify import LEMMAS, certificate_rows, threshold
from .config import FUNCTIONS, SweepConfig, load_config
from .report import (ceilings_from, emit, fmt, load_ceilings, n2_drift, regression_check, save_ceilings)
from .sweep import _exact_and_main, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_PRECISION = 0, 1, 2, 3


def preset_dir():
    return resources.files("qscale.harness") / "presets"


def default_ceilings() -> Path:
    return Path(str(resources.files("qscale") / "data" / "ceilings.json"))


def preset_names() -> list:
    sweeps = sorted(p.name[:-4] for p in preset_dir().iterdir() if p.name.endswith(".cfg"))
    return sweeps + sorted(LEMMAS)


def _json_number(x) -> str:
    text = fmt(x)
    return "null" if text is None else text


def cmd_eval(args) -> int:
    precision = Precision(args.precision) if args.precision else Precision.from_env()
    cfg = SweepConfig(args.function, args.branch, precision=precision, eps=args.eps or "",
                      nu=args.nu, alpha=args.alpha, parity=args.parity, laguerre_z=args.laguerre_z)
    with precision.workdps():
        if args.lam is not None:
            lam = mpf(args.lam)
        elif args.q_log_t is not None:
            lam = 1 / mpf(args.q_log_t)
        else:
            lam = cfg.scale(args.n)
        p = ScaledPoint(args.n, mpf(args.v), lam)
        exact, main = _exact_and_main(cfg, p, cfg.working_eps(), {})
        value = main.value() if args.asym else exact
        log10 = value.log10()
        decimal = "null"
        if not value.is_zero and abs(log10) < 300:
            decimal = _json_number(value.axis_value().to_mpf())
        elif value.is_zero:
            decimal = _json_number(0)
        print("{" + f'"log10_magnitude": {_json_number(log10)}, "quarter_phase": {value.quarter_phase}, '
              f'"decimal_value": {decimal}' + "}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    records = run_sweep(cfg, args.workers)
    text = emit(records, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def _verify_lemma(name, data, bootstrap):
    found = threshold(certificate_rows(name))
    if bootstrap:
        data["certificates"][name] = found
        return True, [f"[{name}] bootstrap threshold={found}"]
    stored = data["certificates"].get(name)
    if stored is None:
        return True, [f"[{name}] PASS", f"  new-cell threshold={found}: no stored threshold"]
    ok = found <= stored
    return ok, [f"[{name}] {'PASS' if ok else 'FAIL'}", f"  threshold={found} stored={stored}"]


def cmd_verify(args) -> int:
    names = preset_names() if args.all else [args.preset]
    if not args.all and args.preset is None:
        raise ConfigError("verify needs --preset NAME or --all")
    path = Path(args.ceilings) if args.ceilings else default_ceilings()
    data = {"sweeps": {}, "certificates": {}}
    if path.exists() or not args.bootstrap:
        data = load_ceilings(path)
    lines, passed = [], True
    for name in names:
        if name in LEMMAS:
            ok, out = _verify_lemma(name, data, args.bootstrap)
        else:
            cfg_path = preset_dir() / f"{name}.cfg"
            if not cfg_path.is_file():
                raise ConfigError(f"unknown preset {name!r}")
            cfg = load_config(cfg_path)
            records = run_sweep(cfg, args.workers)
            if args.bootstrap:
                data["sweeps"][name] = ceilings_from(records)
                ok, out = True, [f"[{name}] bootstrap {len(records)} cells"]
            else:
                report = regression_check(records, path, name)
                if cfg.function == "ismail_masson" and cfg.branch == "plus":
                    flag = n2_drift(records)
                    if flag:
                        report.flags.append(flag)
                ok, out = report.passed, report.lines()
        passed = passed and ok
        lines.extend(out)
    if args.bootstrap:
        save_ceilings(data, path)
    lines.append(f"verify: {'PASS' if passed else 'FAIL'}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qscale", description="Scaled q -> 1 asymptotics: evaluation and sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="exact value (or main term) at one scaled point")
    ev.add_argument("function", choices=FUNCTIONS)
    ev.add_argument("--branch", choices=("minus", "plus"), default="minus")
    ev.add_argument("--n", type=int, default=64)
    ev.add_argument("--v", default="0")
    ev.add_argument("--nu", default="0")
    ev.add_argument("--alpha", default="0")
    scale = ev.add_mutually_exclusive_group()
    scale.add_argument("--q-log-t", dest="q_log_t", help="t with q = exp(-pi t)")
    scale.add_argument("--lambda", dest="lam", help="lambda_n, so q = exp(-pi/lambda_n)")
    ev.add_argument("--precision", type=int)
    ev.add_argument("--eps")
    ev.add_argument("--asym", action="store_true", help="print the asymptotic main term instead")
    ev.add_argument("--parity", choices=("printed", "uniform"), default="printed")
    ev.add_argument("--laguerre-z", dest="laguerre_z", choices=("plus", "minus"), default="plus")
    ev.set_defaults(run=cmd_eval)

    sw = sub.add_parser("sweep", help="run a sweep config and emit records")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int)
    sw.set_defaults(run=cmd_sweep)

    ve = sub.add_parser("verify", help="regression check of bundled presets against stored ceilings")
    which = ve.add_mutually_exclusive_group()
    which.add_argument("--preset")
    which.add_argument("--all", action="store_true")
    ve.add_argument("--ceilings")
    ve.add_argument("--bootstrap", action="store_true", help="record current results as the ceilings")
    ve.add_argument("--workers", type=int)
    ve.set_defaults(run=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QScaleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
