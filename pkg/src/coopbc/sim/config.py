"""Simulation parameters and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from ..channel import (
    AuxScheme,
    BinarySymmetricBC,
    ChannelSpec,
    channel_from_json,
    channel_to_json,
    to_channel_spec,
)
from ..errors import DomainError, InvalidSchemeError
from ..regions import binary_noncausal_aux

SCHEMES = ("triple-binning", "rate-splitting", "rate-limited-state")
DEFAULT_BUDGET = 2 ** 24  # stored codeword symbols
RATE_FIELDS = ("r_z", "r_y", "rt_z", "rt_y", "c12", "rt_12", "rz2")


def word_count(n: int, rate: float) -> int:
    """ceil(2^(n rate)), never below one."""
    v = 2.0 ** (n * rate)
    r = round(v)
    return max(1, r if abs(v - r) < 1e-9 else math.ceil(v))


@dataclass(frozen=True)
class SimConfig:
    scheme: str
    n: int
    ch: ChannelSpec
    aux: AuxScheme
    r_z: float = 0.0
    r_y: float = 0.0
    rt_z: float = 0.0
    rt_y: float = 0.0
    c12: float = 0.0
    rt_12: float = 0.0
    rz2: float = 0.0
    eps_prime: float = 0.1
    eps: float = 0.2
    trials: int = 200
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    resample_codebook: bool = False
    extra: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.n < 1:
            raise DomainError("blocklength n must be at least 1")
        if not 0 < self.eps_prime < self.eps:
            raise DomainError(f"need 0 < eps_prime < eps, got {self.eps_prime}, {self.eps}")
        for f in RATE_FIELDS:
            if getattr(self, f) < 0:
                raise DomainError(f"rate {f} must be nonnegative")
        if self.trials < 0:
            raise DomainError("trials must be nonnegative")
        want = "rate-limited" if self.scheme == "rate-limited-state" else "noncausal"
        if self.aux.form != want:
            raise InvalidSchemeError(f"scheme {self.scheme} needs a {want} auxiliary scheme")
        if self.scheme == "rate-splitting" and self.rz2 > self.r_z:
            raise DomainError("the split part rz2 cannot exceed r_z")

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)

    # rounded sizes
    @property
    def m_z(self) -> int:
        if self.scheme == "rate-splitting":
            return self.m_z1 * self.m_z2
        return word_count(self.n, self.r_z)

    @property
    def m_z1(self) -> int:
        return word_count(self.n, self.r_z - self.rz2)

    @property
    def m_z2(self) -> int:
        return word_count(self.n, self.rz2) if self.scheme == "rate-splitting" else 1

    @property
    def m_y(self) -> int:
        return word_count(self.n, self.r_y)

    @property
    def link_size(self) -> int:
        return word_count(self.n, self.c12)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme, "n": self.n,
            "rates": {f: getattr(self, f) for f in RATE_FIELDS},
            "eps_prime": self.eps_prime, "eps": self.eps, "trials": self.trials,
            "seed": self.seed, "budget": self.budget, "resample_codebook": self.resample_codebook,
            "channel": channel_to_json(self.ch, self.aux),
        }


def config_from_json(d: Mapping) -> SimConfig:
    """Parse a config; the channel is either a full channel block or ``binary``."""
    if "channel" in d:
        ch, aux = channel_from_json(d["channel"])
        if aux is None:
            raise DomainError("config channel block needs an 'aux' entry")
    elif "binary" in d:
        b = d["binary"]
        ch = to_channel_spec(BinarySymmetricBC(float(b["p1"]), float(b["p2"])))
        aux = binary_noncausal_aux(float(b.get("alpha", 0.0)))
    else:
        raise DomainError("config needs a 'channel' or 'binary' block")
    rates = d.get("rates", {})
    unknown = set(rates) - set(RATE_FIELDS)
    if unknown:
        raise DomainError(f"unknown rate fields {sorted(unknown)}")
    kw = {k: d[k] for k in ("eps_prime", "eps", "trials", "seed", "budget", "resample_codebook") if k in d}
    return SimConfig(scheme=d["scheme"], n=int(d["n"]), ch=ch, aux=aux,
                     **{k: float(v) for k, v in rates.items()}, **kw)


def load_config(path) -> SimConfig:
    with open(Path(path), encoding="utf-8") as fh:
        return config_from_json(json.load(fh))
