"""Run configuration: a flat key=value file with command-line overrides.

Every experiment is fully determined by a RunConfig; emitted CSV files embed
the configuration so runs can be reproduced byte for byte.
"""

import os
from dataclasses import dataclass, fields, replace
from typing import Optional

from .pod import METHODS

OUTPUT_DIR_ENV = "PODWAVE_OUTPUT_DIR"


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    n_elements: int = 400
    dt: float = 1.0 / 800.0
    T: float = 10.0
    T_train: Optional[float] = None   # None means the full interval
    c: float = 1.0
    D: float = 0.0
    G: float = 0.0
    pod_method: str = "standard"
    r_list: tuple = (10, 20, 40, 60)
    seed: int = 0
    output_dir: Optional[str] = None  # None: $PODWAVE_OUTPUT_DIR, else "."
    u0: str = "default"
    u00: str = "zero"
    rank_tol: float = 0.0
    k_max: int = 200
    stride: int = 1

    def validated(self) -> "RunConfig":
        cfg = self if self.T_train is not None else replace(self, T_train=self.T)
        if cfg.n_elements < 2:
            raise ConfigError("n_elements must be at least 2")
        if cfg.dt <= 0 or cfg.T <= 0:
            raise ConfigError("dt and T must be positive")
        if cfg.T_train > cfg.T + 1e-12:
            raise ConfigError("T_train must not exceed T")
        _check_divides(cfg.dt, cfg.T, "T")
        _check_divides(cfg.dt, cfg.T_train, "T_train")
        if cfg.c <= 0:
            raise ConfigError("c must be positive")
        if cfg.D < 0 or cfg.G < 0:
            raise ConfigError("damping coefficients must be nonnegative")
        if cfg.pod_method not in METHODS:
            raise ConfigError(f"pod_method must be one of {METHODS}")
        if not cfg.r_list or any(int(r) < 1 for r in cfg.r_list):
            raise ConfigError("r_list must be nonempty positive integers")
        if cfg.stride < 1:
            raise ConfigError("stride must be at least 1")
        if cfg.rank_tol < 0:
            raise ConfigError("rank_tol must be nonnegative")
        if cfg.k_max < 1:
            raise ConfigError("k_max must be at least 1")
        return cfg

    def resolve_output_dir(self) -> str:
        if self.output_dir is not None:
            return self.output_dir
        return os.environ.get(OUTPUT_DIR_ENV, ".")

    def as_items(self):
        """Sorted (key, value) pairs for reproducibility headers."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "r_list":
                v = ",".join(str(int(r)) for r in v)
            out.append((f.name, v))
        return sorted(out)


def _check_divides(dt: float, span: float, name: str):
    steps = span / dt
    if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0) or round(steps) < 1:
        raise ConfigError(f"dt={dt} does not divide {name}={span} into integer steps")


def _parse_value(name: str, text: str):
    text = text.strip()
    for f in fields(RunConfig):
        if f.name != name:
            continue
        if name == "r_list":
            try:
                return tuple(int(p) for p in text.replace(" ", "").split(",") if p)
            except ValueError as exc:
                raise ConfigError(f"bad r_list value {text!r}") from exc
        if name in ("n_elements", "seed", "stride", "k_max"):
            try:
                return int(text)
            except ValueError as exc:
                raise ConfigError(f"bad integer for {name}: {text!r}") from exc
        if name in ("dt", "T", "T_train", "c", "D", "G", "rank_tol"):
            try:
                return _parse_float(text)
            except ValueError as exc:
                raise ConfigError(f"bad number for {name}: {text!r}") from exc
        return text  # string-valued fields
    raise ConfigError(f"unknown config key {name!r}")


def _parse_float(text: str) -> float:
    # accept fractions like 1/800 for convenience in config files
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def load_config(path: str) -> dict:
    """Read a flat key=value file into a dict of parsed values."""
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, value = line.split("=", 1)
                key = key.strip()
                out[key] = _parse_value(key, value)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def make_config(file_path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Config file values first, then explicit overrides, then validation."""
    values = {}
    if file_path:
        values.update(load_config(file_path))
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        values[key] = _parse_value(key, str(val)) if isinstance(val, str) else val
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validated()
