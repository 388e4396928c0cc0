"""Packet-size and inter-arrival laws with exact sampling, CDFs and raw moments.

Parameter conventions (important, the literature is ambiguous):

* ``Gamma(shape, scale)`` -- shape/scale, so mean = shape * scale.
* ``InverseGaussian(mean, shape)`` -- mean/shape, so variance = mean**3 / shape.

Both are spelled out as keyword arguments on the constructors so experiment
configs are unambiguous.

All laws have non-negative support and finite first three raw moments.
Specs are immutable; random streams (``numpy.random.Generator``) are passed
in by the caller and never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

__all__ = [
    "Exponential",
    "Gamma",
    "InverseGaussian",
    "Uniform",
    "Deterministic",
    "DistributionSpec",
    "WptPacket",
    "PacketSpec",
    "parse_distribution",
]


def _as_array(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Exponential:
    """Exponential law with given rate (mean = 1/rate)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"exponential rate must be > 0, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate**2

    @property
    def third_raw_moment(self) -> float:
        return 6.0 / self.rate**3

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(scale=1.0 / self.rate, size=size)

    def cdf(self, x):
        x = _as_array(x)
        return np.where(x < 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))[()]

    def ppf(self, q):
        return -np.log1p(-_as_array(q))[()] / self.rate

    def partial_expectation(self, t):
        # E[A ; A <= t]
        t = _as_array(t)
        lt = self.rate * np.maximum(t, 0.0)
        return (self.mean * (-np.expm1(-lt)) - np.maximum(t, 0.0) * np.exp(-lt))[()]

    def config_str(self) -> str:
        return f"exponential rate={self.rate:g}"


@dataclass(frozen=True)
class Gamma:
    """Gamma law in the shape/scale convention (mean = shape * scale)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError(f"gamma needs shape > 0 and scale > 0, got {self}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale**2

    @property
    def third_raw_moment(self) -> float:
        k = self.shape
        return self.scale**3 * k * (k + 1.0) * (k + 2.0)

    def sample(self, rng: np.random.Generator, size=None):
        # numpy's gamma generator is valid for shape < 1 as well as >= 1
        return rng.gamma(self.shape, self.scale, size=size)

    def cdf(self, x):
        x = _as_array(x)
        return np.where(x < 0, 0.0, special.gammainc(self.shape, np.maximum(x, 0.0) / self.scale))[()]

    def ppf(self, q):
        return self.scale * special.gammaincinv(self.shape, _as_array(q))[()]

    def partial_expectation(self, t):
        t = _as_array(t)
        return (self.mean * special.gammainc(self.shape + 1.0, np.maximum(t, 0.0) / self.scale))[()]

    def config_str(self) -> str:
        return f"gamma shape={self.shape:g} scale={self.scale:g}"


@dataclass(frozen=True)
class InverseGaussian:
    """Inverse Gaussian law in the mean/shape convention (variance = mean^3/shape)."""

    mean_: float
    shape: float

    def __post_init__(self):
        if not (self.mean_ > 0 and self.shape > 0):
            raise ValueError(f"inverse gaussian needs mean > 0 and shape > 0, got {self}")

    @property
    def mean(self) -> float:
        return self.mean_

    @property
    def variance(self) -> float:
        return self.mean_**3 / self.shape

    @property
    def third_raw_moment(self) -> float:
        # E[A^3] = mu^3 (1 + 3 mu/shape + 3 mu^2/shape^2)
        r = self.mean_ / self.shape
        return self.mean_**3 * (1.0 + 3.0 * r + 3.0 * r**2)

    def sample(self, rng: np.random.Generator, size=None):
        # Michael-Schucany-Haas transform with rejection
        return rng.wald(self.mean_, self.shape, size=size)

    def _phi_args(self, x):
        s = np.sqrt(self.shape / x)
        return s * (x / self.mean_ - 1.0), -s * (x / self.mean_ + 1.0)

    def cdf(self, x):
        x = _as_array(x)
        pos = np.maximum(x, 1e-300)
        a, b = self._phi_args(pos)
        val = special.ndtr(a) + np.exp(2.0 * self.shape / self.mean_ + special.log_ndtr(b))
        return np.where(x <= 0, 0.0, val)[()]

    def ppf(self, q):
        from scipy import stats

        mu = self.mean_ / self.shape
        return (stats.invgauss.ppf(_as_array(q), mu, scale=self.shape))[()]

    def partial_expectation(self, t):
        t = _as_array(t)
        pos = np.maximum(t, 1e-300)
        a, b = self._phi_args(pos)
        val = self.mean_ * (special.ndtr(a) - np.exp(2.0 * self.shape / self.mean_ + special.log_ndtr(b)))
        return np.where(t <= 0, 0.0, val)[()]

    def config_str(self) -> str:
        return f"invgauss mean={self.mean_:g} shape={self.shape:g}"


@dataclass(frozen=True)
class Uniform:
    """Uniform law on [lo, hi] with lo >= 0."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo >= 0 and self.hi > self.lo):
            raise ValueError(f"uniform needs 0 <= lo < hi, got {self}")

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    @property
    def third_raw_moment(self) -> float:
        return (self.hi**4 - self.lo**4) / (4.0 * (self.hi - self.lo))

    def sample(self, rng: np.random.Generator, size=None):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def cdf(self, x):
        x = _as_array(x)
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)[()]

    def ppf(self, q):
        return (self.lo + (self.hi - self.lo) * _as_array(q))[()]

    def partial_expectation(self, t):
        t = np.clip(_as_array(t), self.lo, self.hi)
        return ((t**2 - self.lo**2) / (2.0 * (self.hi - self.lo)))[()]

    def config_str(self) -> str:
        return f"uniform lo={self.lo:g} hi={self.hi:g}"


@dataclass(frozen=True)
class Deterministic:
    """Point mass at a strictly positive value (slotted-time / fixed packets)."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"deterministic value must be > 0, got {self.value}")

    @property
    def mean(self) -> float:
        return self.value

    @property
    def variance(self) -> float:
        return 0.0

    @property
    def third_raw_moment(self) -> float:
        return self.value**3

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def cdf(self, x):
        x = _as_array(x)
        return np.where(x >= self.value, 1.0, 0.0)[()]

    def ppf(self, q):
        return np.full_like(_as_array(q), self.value)[()]

    def partial_expectation(self, t):
        t = _as_array(t)
        return np.where(t >= self.value, self.value, 0.0)[()]

    def config_str(self) -> str:
        return f"deterministic value={self.value:g}"


DistributionSpec = Union[Exponential, Gamma, InverseGaussian, Uniform, Deterministic]


@dataclass(frozen=True)
class WptPacket:
    """Energy packet from a wireless power transfer impulse.

    The packet equals channel_gain * distance**(-pathloss) * tx_power * duration;
    only the channel gain is random.
    """

    channel_gain: DistributionSpec
    distance: float
    pathloss: float
    tx_power: float
    duration: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("distance must be > 0")
        if not self.pathloss >= 0:
            raise ValueError("pathloss exponent must be >= 0")
        if not (self.tx_power > 0 and self.duration > 0):
            raise ValueError("tx_power and duration must be > 0")
        if not self.scale_factor * self.channel_gain.mean > 0:
            raise ValueError("packet mean must be > 0 (degenerate channel gain)")

    @property
    def scale_factor(self) -> float:
        return self.distance ** (-self.pathloss) * self.tx_power * self.duration

    @property
    def mean(self) -> float:
        return self.scale_factor * self.channel_gain.mean

    @property
    def variance(self) -> float:
        return self.scale_factor**2 * self.channel_gain.variance

    @property
    def third_raw_moment(self) -> float:
        return self.scale_factor**3 * self.channel_gain.third_raw_moment

    def sample(self, rng: np.random.Generator, size=None):
        return self.scale_factor * self.channel_gain.sample(rng, size)

    def cdf(self, x):
        return self.channel_gain.cdf(_as_array(x) / self.scale_factor)

    def config_str(self) -> str:
        return (
            f"wpt gain=({self.channel_gain.config_str()}) d={self.distance:g} "
            f"alpha={self.pathloss:g} power={self.tx_power:g} duration={self.duration:g}"
        )


PacketSpec = Union[Exponential, Gamma, InverseGaussian, Uniform, Deterministic, WptPacket]


def parse_distribution(text: str) -> DistributionSpec:
    """Parse a config fragment like ``exponential rate=1.0`` into a spec."""
    parts = text.split()
    if not parts:
        raise ValueError("empty distribution spec")
    name = parts[0].lower()
    kwargs = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ValueError(f"malformed parameter {tok!r} in {text!r}")
        key, _, val = tok.partition("=")
        kwargs[key.strip()] = float(val)
    required = {
        "exponential": (Exponential, {"rate": "rate"}),
        "exp": (Exponential, {"rate": "rate"}),
        "gamma": (Gamma, {"shape": "shape", "scale": "scale"}),
        "invgauss": (InverseGaussian, {"mean": "mean_", "shape": "shape"}),
        "inverse_gaussian": (InverseGaussian, {"mean": "mean_", "shape": "shape"}),
        "ig": (InverseGaussian, {"mean": "mean_", "shape": "shape"}),
        "uniform": (Uniform, {"lo": "lo", "hi": "hi"}),
        "deterministic": (Deterministic, {"value": "value"}),
        "constant": (Deterministic, {"value": "value"}),
    }
    if name not in required:
        raise ValueError(f"unknown distribution {name!r}")
    cls, params = required[name]
    missing = sorted(set(params) - set(kwargs))
    extra = sorted(set(kwargs) - set(params))
    if missing:
        raise ValueError(f"missing parameters {missing} for {name!r}")
    if extra:
        raise ValueError(f"unknown parameters {extra} for {name!r}")
    return cls(**{field: kwargs[key] for key, field in params.items()})
