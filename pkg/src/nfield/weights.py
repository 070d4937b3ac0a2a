"""Admissible weight densities and weighted L^p norms.

Two radial families with closed-form normalization and a certified
unit-ball domination constant K = sup over y of sup_{|x-y|<=1} rho(x)/rho(y):

* exponential  rho(x) = c exp(-lam |x|),      K = exp(lam)
* polynomial   rho(x) = c (1 + |x|)^(-q),     K = 2^q   (requires q > N)

K is scale invariant, so the grid samples used for norms are rescaled to make
the discrete box mass exactly 1; that keeps the constant function at norm 1
and preserves every K-based bound on the truncated domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonIntegrableError, ParameterError
from .grid import Field, GridSpec, interior_slices, quadrature_values, trapezoid_weights

EXPONENTIAL = "exponential"
POLYNOMIAL = "polynomial"

# surface measure of the unit sphere S^{N-1}
_SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


@dataclass(frozen=True)
class Weight:
    """A weight density satisfying positivity, evenness, unit mass and the K bound."""

    family: str
    dim: int
    rate: float | None  # exponential decay rate lam
    exponent: float | None  # polynomial decay exponent q
    normalization: float  # closed-form c with integral over R^N equal to 1
    K: float

    def radial(self, r: np.ndarray) -> np.ndarray:
        """Density as a function of |x|, using the analytic normalization."""
        r = np.asarray(r, dtype=np.float64)
        if self.family == EXPONENTIAL:
            return self.normalization * np.exp(-self.rate * r)
        return self.normalization * (1.0 + r) ** (-self.exponent)

    def mass_within(self, radius: float) -> float:
        """Closed-form mass of the ball |x| <= radius (dim-specific antiderivative)."""
        area = _SPHERE_AREA[self.dim]
        if self.family == EXPONENTIAL:
            lam, n = self.rate, self.dim
            # int_0^R r^{n-1} e^{-lam r} dr for n = 1, 2, 3
            t = lam * radius
            if n == 1:
                inner = (1.0 - math.exp(-t)) / lam
            elif n == 2:
                inner = (1.0 - math.exp(-t) * (1.0 + t)) / lam**2
            else:
                inner = (2.0 - math.exp(-t) * (2.0 + 2.0 * t + t**2)) / lam**3
            return self.normalization * area * inner
        q, n = self.exponent, self.dim
        b = 1.0 + radius
        if n == 1:
            inner = (1.0 - b ** (1.0 - q)) / (q - 1.0)
        elif n == 2:
            inner = (1.0 - b ** (1.0 - q)) / (q - 1.0) - (1.0 - b ** (2.0 - q)) / (q - 2.0)
        else:
            inner = (
                (1.0 - b ** (1.0 - q)) / (q - 1.0)
                - 2.0 * (1.0 - b ** (2.0 - q)) / (q - 2.0)
                + (1.0 - b ** (3.0 - q)) / (q - 3.0)
            )
        return self.normalization * area * inner


def make_weight(
    family: str,
    dim: int,
    *,
    rate: float = 1.0,
    exponent: float = 3.0,
) -> Weight:
    if dim not in _SPHERE_AREA:
        raise ParameterError(f"dim must be 1, 2 or 3, got {dim}")
    area = _SPHERE_AREA[dim]
    if family == EXPONENTIAL:
        if rate <= 0:
            raise ParameterError(f"exponential rate must be positive, got {rate}")
        # int_{R^N} e^{-lam|x|} dx = area * (N-1)! / lam^N
        c = rate**dim / (area * math.factorial(dim - 1))
        return Weight(EXPONENTIAL, dim, float(rate), None, c, math.exp(rate))
    if family == POLYNOMIAL:
        if exponent <= dim:
            raise NonIntegrableError(
                f"polynomial exponent must exceed dim for integrability, got q={exponent}, N={dim}"
            )
        # int_0^inf r^{N-1} (1+r)^{-q} dr = B(N, q-N)
        beta = math.gamma(dim) * math.gamma(exponent - dim) / math.gamma(exponent)
        c = 1.0 / (area * beta)
        return Weight(POLYNOMIAL, dim, None, float(exponent), c, 2.0**exponent)
    raise ParameterError(f"unknown weight family {family!r}")


@lru_cache(maxsize=32)
def weight_samples(weight: Weight, grid: GridSpec) -> np.ndarray:
    """Grid samples of rho rescaled so the discrete box mass is exactly 1."""
    raw = weight.radial(grid.radii())
    mass = quadrature_values(raw, grid)
    samples = raw / mass
    samples.flags.writeable = False
    return samples


def weighted_lp_norm(field: Field, weight: Weight, p: float) -> float:
    """(integral of |u|^p rho)^{1/p} over the box with the unit-mass samples."""
    _check_p(p)
    rho = weight_samples(weight, field.grid)
    return _norm_from_samples(field.values, rho, field.grid, p)


def weighted_lp_distance(u: Field, v: Field, weight: Weight, p: float) -> float:
    _check_p(p)
    if u.grid != v.grid:
        raise ParameterError("fields live on different grids")
    rho = weight_samples(weight, u.grid)
    return _norm_from_samples(u.values - v.values, rho, u.grid, p)


def _check_p(p: float):
    if not (1.0 < p < math.inf):
        raise ParameterError(f"p must lie in (1, inf), got {p}")


def _abs_power(values: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values)
    if p == 2.0:
        return a * a
    if p == 3.0:
        return a * a * a
    if p == 1.5:
        return a * np.sqrt(a)
    return a**p


def _norm_from_samples(values: np.ndarray, rho: np.ndarray, grid: GridSpec, p: float) -> float:
    w = trapezoid_weights(grid)
    total = float(np.sum(_abs_power(values, p) * rho * w))
    return total ** (1.0 / p)


def norm_on_interior(values: np.ndarray, weight: Weight, grid: GridSpec, p: float,
                     margin: float = 1.0) -> float:
    """Weighted norm of the field restricted to the margin-deep interior sub-box."""
    _check_p(p)
    sl = interior_slices(grid, margin)
    rho = weight_samples(weight, grid)
    w = trapezoid_weights(grid)
    total = float(np.sum(_abs_power(values[sl], p) * rho[sl] * w[sl]))
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# (H2) certification: grid search of the unit-ball density ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class H2Report:
    K_observed: float
    K_claimed: float
    ok: bool


def h2_ratio_sup(samples: np.ndarray, grid: GridSpec, margin: float = 1.0) -> float:
    """max over interior y of max over grid x with |x-y| <= 1 of samples[x]/samples[y]."""
    inner = interior_slices(grid, margin)
    base = samples[inner]
    radius = [math.ceil(1.0 / s) for s in grid.spacing]
    worst = 0.0
    for offset in np.ndindex(*(2 * m + 1 for m in radius)):
        d = tuple(o - m for o, m in zip(offset, radius))
        dist2 = sum((di * si) ** 2 for di, si in zip(d, grid.spacing))
        if dist2 > 1.0 + 1e-12:
            continue
        shifted = tuple(slice(s.start + di, s.stop + di) for s, di in zip(inner, d))
        ratio = np.max(samples[shifted] / base)
        if ratio > worst:
            worst = float(ratio)
    return worst


def verify_h2(weight: Weight, grid: GridSpec, margin: float = 1.0) -> H2Report:
    """Certify the claimed K against a grid sup of the unit-ball density ratio."""
    observed = h2_ratio_sup(weight_samples(weight, grid), grid, margin)
    return H2Report(observed, weight.K, observed <= weight.K * (1.0 + 1e-9))
