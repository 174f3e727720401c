"""Run configuration: JSON file, then environment, then command-line flags."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from .edge_pencil import PencilSettings

ENV_VAR = "POLYREG_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Numerical settings shared by every subcommand; echoed into reports."""

    default_box: tuple[float, float, float, float] = (0.0, 5.0, -20.0, 20.0)
    re_cap: float = 10.0
    im_cap: float = 50.0
    strip_im_cap: float = 20.0
    tol: float = 1e-13
    literal: bool = False
    collocation_n: int = 48
    match_tol: float = 1e-6
    membership_margin: float = 0.05
    membership_cases: int = 100
    seed: int = 20240

    def pencil_settings(self) -> PencilSettings:
        return PencilSettings(default_box=tuple(self.default_box), re_cap=self.re_cap,
                              im_cap=self.im_cap, strip_im_cap=self.strip_im_cap,
                              tol=self.tol, literal=self.literal)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["default_box"] = list(self.default_box)
        return out

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """New config with every non-None entry of ``overrides`` applied."""
        known = {f.name: f for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            if key == "default_box":
                if len(value) != 4:
                    raise ConfigError("default_box needs four numbers")
                value = tuple(float(v) for v in value)
            elif isinstance(getattr(self, key), bool):
                if not isinstance(value, bool):
                    raise ConfigError(f"{key} must be true or false")
            elif isinstance(getattr(self, key), int):
                value = int(value)
            else:
                value = float(value)
            changes[key] = value
        return replace(self, **changes)


def load_config(path: str | None = None, flags: Mapping[str, Any] | None = None) -> RunConfig:
    """Defaults, then the file at ``path`` (or $POLYREG_CONFIG), then ``flags``."""
    config = RunConfig()
    path = path or os.environ.get(ENV_VAR) or None
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        config = config.merged(doc)
    return config.merged(flags or {})
