"""Firing-rate nonlinearities with certified Lipschitz and saturation constants.

Two families:

* sigmoid(a, beta, theta):   f(u) = a / (1 + exp(-beta (u - theta)))
  strictly increasing, k1 = a beta / 4, invertible on (0, a)
* saturating ramp(a, m, theta): f(u) = clamp(m (u - theta), 0, a)
  nondecreasing but flat outside the ramp, k1 = m, not invertible

Energy-functional machinery needs f^{-1}; it is gated on strict monotonicity.
The antiderivative of the sigmoid inverse,

    H(r) = theta r + (r ln r + (a - r) ln(a - r)) / beta,

is finite at r = 0 and r = a (the r ln r limits are taken as exact zeros).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvertibilityError, ParameterError

SIGMOID = "sigmoid"
RAMP = "ramp"


@dataclass(frozen=True)
class FiringRate:
    family: str
    a: float
    beta: float = 1.0  # sigmoid steepness
    theta: float = 0.0  # threshold
    slope: float = 1.0  # ramp slope

    def __post_init__(self):
        if self.family not in (SIGMOID, RAMP):
            raise ParameterError(f"unknown firing family {self.family!r}")
        if self.a <= 0:
            raise ParameterError(f"bound a must be positive, got {self.a}")
        if self.family == SIGMOID and self.beta <= 0:
            raise ParameterError(f"sigmoid beta must be positive, got {self.beta}")
        if self.family == RAMP and self.slope <= 0:
            raise ParameterError(f"ramp slope must be positive, got {self.slope}")

    @property
    def strictly_increasing(self) -> bool:
        return self.family == SIGMOID

    @property
    def lipschitz_constant(self) -> float:
        """Certified global Lipschitz constant: max of f'."""
        if self.family == SIGMOID:
            return self.a * self.beta / 4.0
        return self.slope

    def value(self, u):
        u = np.asarray(u, dtype=np.float64)
        if self.family == SIGMOID:
            with np.errstate(over="ignore"):
                out = self.a / (1.0 + np.exp(-self.beta * (u - self.theta)))
        else:
            out = np.clip(self.slope * (u - self.theta), 0.0, self.a)
        return out if out.ndim else float(out)

    def derivative(self, u):
        """f'(u); at ramp kinks this is the left-limit value."""
        u = np.asarray(u, dtype=np.float64)
        if self.family == SIGMOID:
            f = self.value(u)
            out = self.beta * f * (1.0 - f / self.a)
        else:
            rising = (u > self.theta) & (u <= self.theta + self.a / self.slope)
            out = np.where(rising, self.slope, 0.0)
        return out if out.ndim else float(out)

    def inverse(self, r):
        """f^{-1} on (0, a); sigmoid only."""
        self._require_invertible()
        r = np.asarray(r, dtype=np.float64)
        if np.any(r <= 0) or np.any(r >= self.a):
            raise DomainError("inverse defined on the open interval (0, a)")
        out = self.theta + np.log(r / (self.a - r)) / self.beta
        return out if out.ndim else float(out)

    def _antiderivative_of_inverse(self, r: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(r > 0.0, r * np.log(r), 0.0)
            s = self.a - r
            t2 = np.where(s > 0.0, s * np.log(s), 0.0)
        return self.theta * r + (t1 + t2) / self.beta

    def inverse_integral(self, s_lo, s_hi):
        """integral of f^{-1}(r) dr from s_lo to s_hi, endpoints allowed in [0, a].

        Vectorized over either endpoint; finite everywhere on [0, a] by the
        removable r ln r singularities.
        """
        self._require_invertible()
        s_lo = np.asarray(s_lo, dtype=np.float64)
        s_hi = np.asarray(s_hi, dtype=np.float64)
        eps = 1e-12 * self.a
        if (np.any(s_lo < -eps) or np.any(s_lo > self.a + eps)
                or np.any(s_hi < -eps) or np.any(s_hi > self.a + eps)):
            raise DomainError("integral endpoints must lie in [0, a]")
        s_lo = np.clip(s_lo, 0.0, self.a)
        s_hi = np.clip(s_hi, 0.0, self.a)
        out = self._antiderivative_of_inverse(s_hi) - self._antiderivative_of_inverse(s_lo)
        return out if out.ndim else float(out)

    def _require_invertible(self):
        if not self.strictly_increasing:
            raise InvertibilityError(
                f"{self.family} firing rate is not strictly increasing; no inverse exists"
            )


def sigmoid(a: float = 1.0, beta: float = 4.0, theta: float = 0.0) -> FiringRate:
    return FiringRate(SIGMOID, a=a, beta=beta, theta=theta)


def saturating_ramp(a: float = 1.0, slope: float = 2.0, theta: float = 0.0) -> FiringRate:
    return FiringRate(RAMP, a=a, slope=slope, theta=theta)


def empirical_lipschitz(f: FiringRate, trials: int = 100_000, seed: int = 0,
                        span: float = 20.0) -> float:
    """Sampled sup of |f(u)-f(v)|/|u-v| over random pairs around the threshold."""
    rng = np.random.default_rng(seed)
    u = f.theta + span * (rng.random(trials) - 0.5)
    v = f.theta + span * (rng.random(trials) - 0.5)
    keep = np.abs(u - v) > 1e-12
    u, v = u[keep], v[keep]
    quot = np.abs(f.value(u) - f.value(v)) / np.abs(u - v)
    return float(np.max(quot))


def max_inverse_integral(f: FiringRate, resolution: float = 1e-3) -> float:
    """max over a grid of s in [0, a] of |integral_0^s f^{-1}|; finite by (H5)-type bounds."""
    s = np.arange(0.0, f.a + resolution / 2, resolution * f.a)
    vals = np.abs(f.inverse_integral(0.0, s))
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("inverse integral produced non-finite values")
    return float(np.max(vals))
