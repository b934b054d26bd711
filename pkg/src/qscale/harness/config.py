"""Sweep configuration: flat ``key=value`` files mapped onto :class:`SweepConfig`."""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from mpmath import mpf

from ..asymptotics import PARITY_FORMS, AdmissibleScale
from ..errors import ConfigError, QScaleError
from ..numkernel import Precision
from ..qseries import ConfluentParams, SeriesSpec

FUNCTIONS = ("g", "h", "aq", "jackson", "confluent", "ismail_masson", "stieltjes_wigert", "q_laguerre")
BRANCHES = ("minus", "plus")
COS_ZERO = "cos0"
# precision must keep this many digits once n reaches 256 (bracket cancellation)
MIN_DIGITS_LARGE_N = 30

_LIST_KEYS = ("n_list", "v_list", "alphas", "betas", "gammas")


def _number(text: str, key: str) -> str:
    try:
        mpf(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{key}: {text!r} is not a number") from exc
    return text


@dataclass(frozen=True)
class SweepConfig:
    """One experiment: a function/branch pair swept over ``n_list x v_list``.

    Numbers are kept as decimal strings so that a config means the same thing
    at every working precision.  Function-specific parameters (``nu``,
    ``alpha``, the series exponents) sit directly on the config.
    """

    function: str
    branch: str
    scale: AdmissibleScale = field(default_factory=lambda: AdmissibleScale.power("0.4"))
    n_list: tuple = ()
    v_list: tuple = ("0.25",)
    precision: Precision = field(default_factory=Precision.from_env)
    eps: str = ""
    nu: str = "0"
    alpha: str = "0"
    alphas: tuple = ()
    betas: tuple = ()
    gammas: tuple = ()
    ell: str = "1"
    parity: str = "printed"
    laguerre_z: str = "plus"
    name: str = ""

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ConfigError(f"function must be one of {FUNCTIONS}, got {self.function!r}")
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        ns = tuple(int(n) for n in self.n_list)
        if any(n < 1 for n in ns):
            raise ConfigError("n_list entries must be >= 1")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("n_list must be strictly increasing")
        object.__setattr__(self, "n_list", ns)
        vs = tuple(str(v) for v in self.v_list)
        for v in vs:
            if v == COS_ZERO:
                if self.branch != "plus":
                    raise ConfigError("the cos0 grid point only exists on plus branches")
            else:
                _number(v, "v_list")
        object.__setattr__(self, "v_list", vs)
        if ns and ns[-1] >= 256 and self.precision.digits < MIN_DIGITS_LARGE_N:
            raise ConfigError(f"precision below {MIN_DIGITS_LARGE_N} digits is unsafe for n >= 256")
        if self.eps:
            _number(self.eps, "eps")
            if not mpf(self.eps) > 0:
                raise ConfigError("eps must be positive")
        for key in ("nu", "alpha", "ell"):
            _number(getattr(self, key), key)
        for key in ("alphas", "betas", "gammas"):
            object.__setattr__(self, key, tuple(_number(str(x), key) for x in getattr(self, key)))
        if not mpf(self.nu) > -1:
            raise ConfigError("nu must exceed -1")
        if not mpf(self.alpha) > -1:
            raise ConfigError("alpha must exceed -1")
        if self.function == "jackson" and self.branch == "minus" and mpf(self.nu) != int(mpf(self.nu)):
            raise ConfigError("the imaginary-argument Jackson branch needs an integer nu")
        if self.parity not in PARITY_FORMS:
            raise ConfigError(f"parity must be one of {PARITY_FORMS}")
        if self.laguerre_z not in ("plus", "minus"):
            raise ConfigError("laguerre_z must be 'plus' (z = e^{2 pi v}) or 'minus' (z = e^{-2 pi v})")
        try:
            if self.function in ("g", "h"):
                self.series_spec()
            if self.function == "confluent":
                self.confluent_params()
        except QScaleError as exc:
            raise ConfigError(str(exc)) from exc
        self.scale.validate()

    @property
    def label(self) -> str:
        return self.name or f"{self.function}_{self.branch}"

    @property
    def ell_value(self):
        if self.function in ("g", "h"):
            return self.series_spec().ell
        if self.function == "confluent":
            return self.confluent_params().ell
        return mpf(1)

    def series_spec(self) -> SeriesSpec:
        return SeriesSpec(tuple(mpf(a) for a in self.alphas), tuple(mpf(b) for b in self.betas),
                          tuple(mpf(c) for c in self.gammas), mpf(self.ell))

    def confluent_params(self) -> ConfluentParams:
        return ConfluentParams(tuple(mpf(a) for a in self.alphas), tuple(mpf(b) for b in self.betas))

    def working_eps(self):
        return mpf(self.eps) if self.eps else mpf(10) ** (-self.precision.dps + 2)

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "scale":
                value = value.label()
            elif f.name == "precision":
                value = value.digits
            elif isinstance(value, tuple):
                value = ",".join(str(x) for x in value)
            out.append(f"{f.name}={value}")
        return "\n".join(out) + "\n"


def parse_config(text: str, name: str = "") -> SweepConfig:
    """Parse ``key=value`` lines; ``#`` starts a comment, lists are comma-separated."""
    known = {f.name for f in fields(SweepConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    for key in ("function", "branch"):
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    for key in _LIST_KEYS:
        if key in values:
            values[key] = tuple(x.strip() for x in values[key].split(",") if x.strip())
    if "n_list" in values:
        try:
            values["n_list"] = tuple(int(x) for x in values["n_list"])
        except ValueError as exc:
            raise ConfigError("n_list must hold integers") from exc
    if "scale" in values:
        values["scale"] = AdmissibleScale.parse(values["scale"])
    if "precision" in values:
        try:
            values["precision"] = Precision(int(values["precision"]))
        except (ValueError, QScaleError) as exc:
            raise ConfigError(f"bad precision {values['precision']!r}") from exc
    values.setdefault("name", name)
    try:
        return SweepConfig(**values)
    except ConfigError:
        raise
    except QScaleError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.stem)

