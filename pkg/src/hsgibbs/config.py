"""Run configuration: a flat key=value file whose values command-line flags override."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import InvalidParameter
from .model import GlobalPrior, PriorConfig
from .samplers import SAMPLERS


@dataclass(frozen=True)
class RunConfig:
    sampler: str = "horseshoe"
    n: int = 50
    p: int = 100
    iters: int = 2500
    thin: int = 1
    burnin: int = 500  # harness default; counts toward iters
    seed: int = 0
    chains: int = 1
    step_size: float = 1.0
    # prior
    a: float = 1.0
    b: float = 1.0
    c: float = math.inf
    tau_family: str = "half-cauchy"
    tau_T: float = 0.0
    tau_scale: float = 1.0
    tau_shape: float = 1.0
    tau_rate: float = 1.0
    delta0: float = 0.1
    delta1: float = 0.1
    delta: float = 0.1
    # paths
    data: Optional[str] = None
    out: str = "out"

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise InvalidParameter(f"unknown sampler {self.sampler!r}")
        if self.iters < 1 or self.chains < 1 or self.thin < 1:
            raise InvalidParameter("iters, chains and thin must be >= 1")
        if not 0 <= self.burnin < self.iters:
            raise InvalidParameter("burnin must lie in [0, iters)")
        self.prior  # validates the prior fields

    @property
    def prior(self) -> PriorConfig:
        tp = GlobalPrior(self.tau_family, T=self.tau_T, scale=self.tau_scale,
                         shape=self.tau_shape, rate=self.tau_rate)
        return PriorConfig(a=self.a, b=self.b, c=self.c, tau_prior=tp, delta0=self.delta0,
                           delta1=self.delta1, delta=self.delta)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    if key not in _TYPES:
        raise InvalidParameter(f"unknown config key {key!r}")
    t = _TYPES[key]
    raw = raw.strip()
    if t == "int":
        return int(raw)
    if t == "float":
        return float(raw)  # accepts "inf"
    if raw.lower() in ("", "none"):
        return None
    return raw


def parse_config_text(text: str) -> dict:
    """key=value per line; '#' starts a comment; blank lines ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"line {lineno}: expected key=value")
        k, v = line.split("=", 1)
        k = k.strip().replace("-", "_")
        out[k] = _coerce(k, v)
    return out


def load_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    vals = parse_config_text(Path(path).read_text()) if path else {}
    for k, v in (overrides or {}).items():
        if v is not None:
            vals[k] = v
    return replace(RunConfig(), **vals) if vals else RunConfig()


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{k}={v}\n" for k, v in cfg.as_dict().items() if v is not None)
