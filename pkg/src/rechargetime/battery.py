"""Linear and non-linear energy storage models.

The non-linear model has a state-dependent conversion efficiency
eta(U) = 1 - ((U - a)/b)^2 with a = umax/2 and b = beta*umax/2, beta > 1.
Integrating dU/dX = eta(U) from an empty battery yields the logistic-type
law U = a + b*tanh((X - C)/b) with C = b*artanh(1/beta), which converts a
cumulative raw-input total into a stored level and back. The per-packet
discrete rule U <- U + eta(U)*X is what simulations use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = ["LinearBattery", "NonLinearBattery", "BatteryModel", "parse_battery"]


@dataclass(frozen=True)
class LinearBattery:
    """Unit-efficiency storage; optionally capped at a capacity."""

    umax: Optional[float] = None  # None = unbounded

    def __post_init__(self):
        if self.umax is not None and not self.umax > 0:
            raise ValueError("umax must be > 0")

    @property
    def capacity(self) -> float:
        return math.inf if self.umax is None else self.umax

    def efficiency(self, U: float) -> float:
        if not 0.0 <= U <= self.capacity:
            raise ValueError(f"state {U} outside [0, {self.capacity}]")
        return 1.0

    def stored_from_input(self, x_total: float) -> float:
        if x_total < 0:
            raise ValueError("cumulative input must be >= 0")
        return min(x_total, self.capacity)

    def input_for_level(self, u: float) -> float:
        if not 0.0 < u <= self.capacity:
            raise ValueError(f"level {u} outside (0, {self.capacity}]")
        return u

    def step_update(self, U: float, x_packet: float) -> float:
        if x_packet < 0:
            raise ValueError("packet energy must be >= 0")
        return min(U + x_packet, self.capacity)

    def config_str(self) -> str:
        return "linear" if self.umax is None else f"linear umax={self.umax:g}"


@dataclass(frozen=True)
class NonLinearBattery:
    umax: float
    beta: float

    def __post_init__(self):
        if not self.umax > 0:
            raise ValueError("umax must be > 0")
        if not self.beta > 1.0:
            raise ValueError(f"beta must be > 1, got {self.beta}")

    @property
    def a(self) -> float:
        return 0.5 * self.umax

    @property
    def b(self) -> float:
        return self.beta * 0.5 * self.umax

    @property
    def input_offset(self) -> float:
        # C = b * artanh(1/beta); makes stored_from_input(0) = 0
        return self.b * math.atanh(1.0 / self.beta)

    @property
    def capacity(self) -> float:
        return self.umax

    def efficiency(self, U: float) -> float:
        if not 0.0 <= U <= self.umax:
            raise ValueError(f"state {U} outside [0, {self.umax}]")
        return 1.0 - ((U - self.a) / self.b) ** 2

    def stored_from_input(self, x_total: float) -> float:
        if x_total < 0:
            raise ValueError("cumulative input must be >= 0")
        u = self.a + self.b * math.tanh((x_total - self.input_offset) / self.b)
        return min(max(u, 0.0), self.umax)

    def input_for_level(self, u: float) -> float:
        """Raw input total needed to reach stored level u (the shifted threshold)."""
        if not 0.0 < u <= self.umax:
            raise ValueError(f"level {u} outside (0, {self.umax}]")
        if u >= self.a + self.b:
            raise ValueError(f"level {u} unreachable: saturation at {self.a + self.b}")
        return self.input_offset + self.b * math.atanh((u - self.a) / self.b)

    def step_update(self, U: float, x_packet: float) -> float:
        if x_packet < 0:
            raise ValueError("packet energy must be >= 0")
        return min(U + self.efficiency(U) * x_packet, self.umax)

    def config_str(self) -> str:
        return f"nonlinear umax={self.umax:g} beta={self.beta:g}"


BatteryModel = LinearBattery | NonLinearBattery


def parse_battery(text: str) -> BatteryModel:
    """Parse ``linear`` / ``linear umax=25`` / ``nonlinear umax=25 beta=1.1``."""
    parts = text.split()
    if not parts:
        raise ValueError("empty battery spec")
    name = parts[0].lower()
    kwargs = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise ValueError(f"malformed parameter {tok!r} in {text!r}")
        key, _, val = tok.partition("=")
        kwargs[key.strip()] = float(val)
    if name == "linear":
        extra = set(kwargs) - {"umax"}
        if extra:
            raise ValueError(f"unknown parameters {sorted(extra)} for linear battery")
        return LinearBattery(umax=kwargs.get("umax"))
    if name == "nonlinear":
        if set(kwargs) != {"umax", "beta"}:
            raise ValueError("nonlinear battery needs exactly umax=<v> beta=<v>")
        return NonLinearBattery(umax=kwargs["umax"], beta=kwargs["beta"])
    raise ValueError(f"unknown battery kind {name!r}")
