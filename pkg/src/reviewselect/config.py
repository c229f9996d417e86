"""Selection parameters and the ``key=value`` config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .similarity import MergeWeights


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SelectionConfig:
    alpha: float = 0.3
    beta: float = 0.5
    tip_budget: int = 5
    match_count_threshold: int = 1
    match_threshold: float = 0.5
    review_budget: int = 10
    w_syn: float = 1.0
    w_sem: float = 1.0
    w_sent: float = 1.0
    smoothing: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "match_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        for name in ("tip_budget", "match_count_threshold", "review_budget"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v!r}")
        ws = (self.w_syn, self.w_sem, self.w_sent)
        if min(ws) < 0 or sum(ws) <= 0:
            raise ConfigError("merge weights must be nonnegative with a positive sum")
        if self.smoothing <= 0:
            raise ConfigError(f"smoothing must be positive, got {self.smoothing}")

    @property
    def weights(self) -> MergeWeights:
        return MergeWeights(self.w_syn, self.w_sem, self.w_sent)

    def replace(self, **changes: Any) -> SelectionConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any], base: SelectionConfig | None = None) -> SelectionConfig:
        """Overlay string or typed values on ``base``; unknown keys are an error."""
        base = base or cls()
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        changes = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            typ = int if types[key] in (int, "int") else float
            try:
                changes[key] = typ(raw) if typ is float else _parse_int(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        return dataclasses.replace(base, **changes)


def _parse_int(raw: Any) -> int:
    if isinstance(raw, int):
        return raw
    f = float(raw)
    if f != int(f):
        raise ValueError(raw)
    return int(f)


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment, blank lines are ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> SelectionConfig:
    """Defaults, then the config file, then ``overrides`` (typically CLI flags)."""
    cfg = SelectionConfig()
    if path is not None:
        cfg = SelectionConfig.from_mapping(parse_config_text(Path(path).read_text("utf-8")), cfg)
    if overrides:
        cfg = SelectionConfig.from_mapping({k: v for k, v in overrides.items() if v is not None}, cfg)
    return cfg
