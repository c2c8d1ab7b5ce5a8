"""Scenario-file parsing, validation, and the run manifest.

Config files are plain ``key = value`` lines with ``#`` comments; every
parameter is a scalar. Unknown keys, out-of-range values and duplicate
keys are reported together, each with its line number. An empty file
yields the default calibration (prior 0.587, honesty weight 1, rating
weight 10, true/receiver bias 0.114, sender belief 0.30, full
punishment).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

from .game_core import GameParams, OffPathPolicy

MODES = ("block1", "block2", "expt2")
MAX_SEED = 2**64


class ConfigError(Exception):
    """Validation failure; carries one (line, message) pair per problem."""

    def __init__(self, errors: list[tuple[int | None, str]]):
        self.errors = errors
        lines = [
            (f"line {ln}: {msg}" if ln is not None else msg) for ln, msg in errors
        ]
        super().__init__("invalid config:\n" + "\n".join(lines))


@dataclass(frozen=True)
class ScenarioConfig:
    """Every knob of a run: game parameters, population, mode, seed."""

    pi: float = 0.587
    tau: float = 1.0
    gamma: float = 10.0
    lambda_true: float = 0.114
    lambda_hat_r: float = 0.114
    lambda_hat_s: float = 0.30
    off_path: str = "full_punishment"
    off_path_rating_high: float = 0.0
    off_path_rating_low: float = 0.0
    prior_mean: float = 0.587
    prior_sd: float = 0.20
    noise_rate: float = 0.05
    expressive_weight: float = 0.0
    bias_sd: float = 0.0
    lambda_hat_s_sd: float = 0.0
    info_price_premium: float = 5.0
    n_senders: int = 200
    n_receivers: int = 200
    mode: str = "block1"
    topics_file: str = ""
    swap_parties: bool = False
    seed: int | None = None

    def off_path_policy(self) -> OffPathPolicy:
        if self.off_path == "full_punishment":
            return OffPathPolicy.full_punishment()
        return OffPathPolicy.custom(self.off_path_rating_high, self.off_path_rating_low)

    def game_params(self, **overrides: float) -> GameParams:
        base = {
            "prior": self.pi,
            "honesty_weight": self.tau,
            "rating_weight": self.gamma,
            "bias_true": self.lambda_true,
            "bias_hat_receiver": self.lambda_hat_r,
            "bias_hat_sender": self.lambda_hat_s,
        }
        base.update(overrides)
        return GameParams(off_path=self.off_path_policy(), **base)


# key -> (attribute, parser, validator, constraint description)
def _float_in(lo, hi, lo_open=False, hi_open=False):
    def check(v: float) -> bool:
        ok_lo = v > lo if lo_open else v >= lo
        ok_hi = v < hi if hi_open else v <= hi
        return ok_lo and ok_hi

    return check


_INF = float("inf")

_KEY_SPECS: dict[str, tuple[str, type, object, str]] = {
    "pi": ("pi", float, _float_in(0.0, 1.0), "pi must be in [0,1]"),
    "tau": ("tau", float, _float_in(0.0, _INF, lo_open=True), "tau must be > 0"),
    "gamma": ("gamma", float, _float_in(0.0, _INF), "gamma must be >= 0"),
    "lambda": ("lambda_true", float, _float_in(-2.0, 2.0, True, True), "lambda must be in (-2,2)"),
    "lambda_hat_r": ("lambda_hat_r", float, _float_in(0.0, 2.0, hi_open=True), "lambda_hat_r must be in [0,2)"),
    "lambda_hat_s": ("lambda_hat_s", float, _float_in(0.0, 2.0, hi_open=True), "lambda_hat_s must be in [0,2)"),
    "off_path": ("off_path", str, lambda v: v in ("full_punishment", "custom"), "off_path must be full_punishment or custom"),
    "off_path_rating_high": ("off_path_rating_high", float, _float_in(0.0, 1.0), "off_path_rating_high must be in [0,1]"),
    "off_path_rating_low": ("off_path_rating_low", float, _float_in(0.0, 1.0), "off_path_rating_low must be in [0,1]"),
    "prior_mean": ("prior_mean", float, _float_in(0.0, 1.0), "prior_mean must be in [0,1]"),
    "prior_sd": ("prior_sd", float, _float_in(0.0, _INF), "prior_sd must be >= 0"),
    "noise_rate": ("noise_rate", float, _float_in(0.0, 1.0), "noise_rate must be in [0,1]"),
    "expressive_weight": ("expressive_weight", float, _float_in(0.0, _INF), "expressive_weight must be >= 0"),
    "bias_sd": ("bias_sd", float, _float_in(0.0, _INF), "bias_sd must be >= 0"),
    "lambda_hat_s_sd": ("lambda_hat_s_sd", float, _float_in(0.0, _INF), "lambda_hat_s_sd must be >= 0"),
    "info_price_premium": ("info_price_premium", float, _float_in(0.0, _INF), "info_price_premium must be >= 0"),
    "n_senders": ("n_senders", int, lambda v: v >= 0, "n_senders must be >= 0"),
    "n_receivers": ("n_receivers", int, lambda v: v >= 0, "n_receivers must be >= 0"),
    "mode": ("mode", str, lambda v: v in MODES, f"mode must be one of {MODES}"),
    "topics_file": ("topics_file", str, lambda v: True, ""),
    "swap_parties": ("swap_parties", bool, lambda v: True, "swap_parties must be true or false"),
    "seed": ("seed", int, lambda v: 0 <= v < MAX_SEED, "seed must be an unsigned 64-bit integer"),
}


def _parse_value(raw: str, typ: type):
    if typ is float:
        return float(raw)
    if typ is int:
        v = int(raw)
        return v
    if typ is bool:
        low = raw.lower()
        if low in ("true", "false"):
            return low == "true"
        raise ValueError(f"expected true/false, got {raw!r}")
    return raw


def parse_config(text: str) -> ScenarioConfig:
    """Parse and fully validate; raises :class:`ConfigError` listing every bad line.

    Cross-field constraints (e.g. the sender's believed bias must not be
    below the receiver's) are checked after all lines are read, so key
    order never matters.
    """
    errors: list[tuple[int | None, str]] = []
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((lineno, f"expected 'key = value', got {raw_line.strip()!r}"))
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEY_SPECS:
            errors.append((lineno, f"unknown key {key!r}"))
            continue
        if key in seen:
            errors.append((lineno, f"duplicate key {key!r} (first set on line {seen[key]})"))
            continue
        seen[key] = lineno
        attr, typ, check, constraint = _KEY_SPECS[key]
        try:
            value = _parse_value(raw, typ)
        except ValueError:
            errors.append((lineno, f"cannot parse {raw!r} as {typ.__name__} for {key!r}"))
            continue
        if not check(value):
            errors.append((lineno, constraint))
            continue
        values[attr] = value

    if not errors:
        cfg = ScenarioConfig(**values)
        if cfg.lambda_hat_s < cfg.lambda_hat_r:
            errors.append((None, "lambda_hat_s must be >= lambda_hat_r"))
        if cfg.n_senders > 0 and cfg.n_receivers == 0:
            errors.append((None, "n_receivers must be positive when n_senders is"))
    if errors:
        raise ConfigError(errors)
    return cfg


_SERIALIZE_ORDER = [
    "pi", "tau", "gamma", "lambda", "lambda_hat_r", "lambda_hat_s",
    "off_path", "off_path_rating_high", "off_path_rating_low",
    "prior_mean", "prior_sd", "noise_rate", "expressive_weight",
    "bias_sd", "lambda_hat_s_sd", "info_price_premium",
    "n_senders", "n_receivers", "mode", "topics_file", "swap_parties", "seed",
]


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical text form; ``parse_config(serialize_config(c)) == c``."""
    lines = []
    for key in _SERIALIZE_ORDER:
        attr = _KEY_SPECS[key][0]
        value = getattr(cfg, attr)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility sidecar emitted next to every run's outputs."""

    tool_version: str
    config_hash: str
    seed: int | None
    outputs: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"
