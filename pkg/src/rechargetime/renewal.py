"""Equilibrium (stationary) delayed renewal arrival streams.

An arrival stream is a residual first wait followed by i.i.d. inter-arrivals.
In equilibrium mode the first wait follows the residual density
(1 - F_A(t)) / mu_A, modeling observation long after the process started;
in pure mode an arrival sits at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Tuple

import numpy as np

from .distributions import Deterministic, DistributionSpec, Exponential, Uniform

__all__ = ["Mode", "ArrivalProcess"]

_BISECT_TOL = 1e-10  # on the probability scale
_BRACKET_Q = 1.0 - 1e-12


class Mode(Enum):
    EQUILIBRIUM = "equilibrium"
    PURE = "pure"


@dataclass(frozen=True)
class ArrivalProcess:
    interarrival: DistributionSpec
    mode: Mode = Mode.EQUILIBRIUM

    def residual_moments(self) -> Tuple[float, float]:
        """Mean and variance of the first wait.

        Equilibrium: E = (mu^2 + sigma^2) / (2 mu) and
        V = m3 / (3 mu) - E^2 with m3 the third raw moment of the
        inter-arrival law. Pure mode: (0, 0).
        """
        if self.mode is Mode.PURE:
            return 0.0, 0.0
        d = self.interarrival
        mu, var, m3 = d.mean, d.variance, d.third_raw_moment
        mean0 = (mu**2 + var) / (2.0 * mu)
        var0 = m3 / (3.0 * mu) - mean0**2
        return mean0, var0

    def _residual_cdf(self, t):
        """CDF of the equilibrium residual wait, H(t) = int_0^t (1-F_A) / mu_A."""
        d = self.interarrival
        t = np.asarray(t, dtype=float)
        # int_0^t (1 - F(s)) ds = t (1 - F(t)) + E[A; A <= t]
        integral = t * (1.0 - d.cdf(t)) + d.partial_expectation(t)
        return np.clip(integral / d.mean, 0.0, 1.0)

    def _residual_ppf(self, q):
        """Invert the residual CDF by bisection (vectorized over q)."""
        d = self.interarrival
        q = np.asarray(q, dtype=float)
        lo = np.zeros_like(q)
        hi = np.full_like(q, float(d.ppf(_BRACKET_Q)))
        # monotone CDF: plain bisection converges unconditionally
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self._residual_cdf(mid) < q
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            gap = self._residual_cdf(hi) - self._residual_cdf(lo)
            if np.all(gap <= _BISECT_TOL):
                break
        return 0.5 * (lo + hi)

    def residual_sample(self, rng: np.random.Generator, size=None):
        """Draw the first wait; 0 in pure mode.

        Closed forms: exponential inter-arrivals are memoryless, a point mass
        at c gives Uniform(0, c), and Uniform(0, h) has the triangular-decay
        density (1 - t/h) / (h/2), inverted analytically. Everything else
        goes through numerical inversion of the residual CDF.
        """
        if self.mode is Mode.PURE:
            return 0.0 if size is None else np.zeros(size)
        d = self.interarrival
        if isinstance(d, Exponential):
            return d.sample(rng, size)
        if isinstance(d, Deterministic):
            return d.value * rng.random(size)
        if isinstance(d, Uniform) and d.lo == 0.0:
            # H(t) = 2t/h - (t/h)^2, so H^{-1}(q) = h (1 - sqrt(1-q))
            return d.hi * (1.0 - np.sqrt(1.0 - rng.random(size)))
        q = rng.random(1 if size is None else size)
        out = self._residual_ppf(q)
        return float(out[0]) if size is None else out

    def arrival_stream(self, rng: np.random.Generator) -> Iterator[float]:
        """Lazy strictly increasing epochs t1 < t2 < ...; t1 is the first wait."""
        t = float(self.residual_sample(rng)) if self.mode is Mode.EQUILIBRIUM else 0.0
        yield t
        while True:
            t += float(self.interarrival.sample(rng))
            yield t
