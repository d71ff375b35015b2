"""Run configuration: flat ``key = value`` files plus command-line overrides."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

__all__ = ["ConfigError", "RunConfig", "parse_number", "parse_list", "parse_sweep", "load_config"]


class ConfigError(ValueError):
    pass


_EXP = re.compile(r"^(?:e\^|exp\()\s*([^)]*?)\s*\)?$")


def parse_number(text):
    """Parse ``0.5``, ``1/137``, ``e^10``, ``exp(10)`` or ``2*e^3``."""
    s = str(text).strip().lower()
    if not s:
        raise ConfigError("empty numeric value")
    if "*" in s:
        out = 1.0
        for part in s.split("*"):
            out *= parse_number(part)
        return out
    m = _EXP.match(s)
    if m:
        return math.exp(parse_number(m.group(1)))
    if "/" in s:
        num, _, den = s.partition("/")
        d = parse_number(den)
        if d == 0:
            raise ConfigError(f"division by zero in {text!r}")
        return parse_number(num) / d
    if s == "e":
        return math.e
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse number {text!r}") from None


def parse_list(text):
    """Comma-separated numbers; ``a:b:step`` expands to an inclusive range."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item and not item.startswith(("e^", "exp(")):
            parts = [parse_number(p) for p in item.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ConfigError(f"bad range {item!r}, expected start:stop:step")
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(start + k * step for k in range(n))
        else:
            out.append(parse_number(item))
    return out


def parse_sweep(values):
    """Build the list of (alpha, lambda_over_m0) points from config keys.

    ``sweep = a1:L1; a2:L2`` gives explicit pairs; otherwise the cartesian
    product of ``sweep_alpha`` with ``sweep_lambda_over_m0`` or
    ``sweep_log_lambda`` (natural log of Lambda/m0) is taken.
    """
    points = []
    if values.get("sweep"):
        for pair in str(values["sweep"]).split(";"):
            pair = pair.strip()
            if not pair:
                continue
            a, sep, lam = pair.partition(":")
            if not sep:
                raise ConfigError(f"sweep pair {pair!r} must be alpha:lambda_over_m0")
            points.append((parse_number(a), parse_number(lam)))
    alphas = parse_list(values["sweep_alpha"]) if values.get("sweep_alpha") else None
    lams = None
    if values.get("sweep_lambda_over_m0"):
        lams = parse_list(values["sweep_lambda_over_m0"])
    elif values.get("sweep_log_lambda"):
        lams = [math.exp(x) for x in parse_list(values["sweep_log_lambda"])]
    if alphas is not None or lams is not None:
        alphas = alphas if alphas is not None else [values["alpha"]]
        lams = lams if lams is not None else [values["lambda_over_m0"]]
        points.extend((a, lam) for a in alphas for lam in lams)
    return points


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1 / 137
    lambda_over_m0: float = math.exp(10)
    m0: float = 1.0
    grid_n: int = 512
    u_min_ratio: float = 1e-8
    tol: float = 1e-10
    max_iter: int = 200
    output_dir: Path = Path("out")
    workers: int = 1
    sweep: tuple = field(default_factory=tuple)

    def validate(self):
        if not self.alpha >= 0:
            raise ConfigError("alpha must be >= 0")
        if not self.lambda_over_m0 > 0:
            raise ConfigError("lambda_over_m0 must be > 0")
        if not self.m0 > 0:
            raise ConfigError("m0 must be > 0")
        if self.grid_n < 2:
            raise ConfigError("grid_n must be >= 2")
        if not 0 < self.u_min_ratio < 1:
            raise ConfigError("u_min_ratio must lie in (0, 1)")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for a, lam in self.sweep:
            if a < 0 or lam <= 0:
                raise ConfigError(f"invalid sweep point ({a}, {lam})")
        return self

    def with_point(self, alpha, lambda_over_m0):
        return replace(self, alpha=alpha, lambda_over_m0=lambda_over_m0, sweep=())


_INT_KEYS = {"grid_n", "max_iter", "workers"}
_FLOAT_KEYS = {"alpha", "lambda_over_m0", "m0", "u_min_ratio", "tol"}
_SWEEP_KEYS = {"sweep", "sweep_alpha", "sweep_lambda_over_m0", "sweep_log_lambda"}
_ALIASES = {"out": "output_dir", "lambda": "lambda_over_m0"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _SWEEP_KEYS | {"output_dir"}


def read_config_file(path):
    """Raw ``key = value`` pairs; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        raw[key.strip()] = value.strip()
    return raw


def load_config(path=None, overrides=None):
    """Merge defaults, an optional config file and overrides into a RunConfig."""
    raw = read_config_file(path) if path else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values = {}
    for key, value in raw.items():
        key = _ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value

    kwargs = {}
    for f in fields(RunConfig):
        if f.name not in values:
            continue
        v = values[f.name]
        if f.name in _INT_KEYS:
            num = parse_number(v)
            if num != int(num):
                raise ConfigError(f"{f.name} must be an integer")
            kwargs[f.name] = int(num)
        elif f.name in _FLOAT_KEYS:
            kwargs[f.name] = parse_number(v)
        elif f.name == "output_dir":
            kwargs[f.name] = Path(v)
    cfg = RunConfig(**kwargs)
    sweep_vals = {k: values[k] for k in _SWEEP_KEYS if k in values}
    if sweep_vals:
        sweep_vals.setdefault("alpha", cfg.alpha)
        sweep_vals.setdefault("lambda_over_m0", cfg.lambda_over_m0)
        cfg = replace(cfg, sweep=tuple(parse_sweep(sweep_vals)))
    return cfg.validate()
