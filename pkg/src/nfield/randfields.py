"""Seeded random test fields: the one randomness source for every certification.

The mixture is fixed at 40% Gaussian bumps, 40% white noise, 20% box
indicators, spanning smooth, rough and discontinuous inputs. All draws are
reproducible from an explicit seed.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, GridSpec

_KINDS = ("gauss", "noise", "indicator")
_PROBS = (0.4, 0.4, 0.2)


def random_values(grid: GridSpec, rng: np.random.Generator) -> np.ndarray:
    """One draw of the mixture as a raw value array."""
    kind = rng.choice(len(_KINDS), p=_PROBS)
    amp = rng.uniform(0.25, 2.0) * rng.choice((-1.0, 1.0))
    lo, hi = grid.box_lo, grid.box_hi
    if kind == 0:  # gaussian bump
        center = [rng.uniform(lo[i], hi[i]) for i in range(grid.dim)]
        width = rng.uniform(0.3, 1.5)
        r = grid.radii(tuple(center))
        return amp * np.exp(-(r**2) / (2.0 * width**2))
    if kind == 1:  # white noise
        return amp * rng.standard_normal(grid.shape)
    # axis-aligned box indicator
    values = np.full(grid.shape, amp)
    for axis, coords in enumerate(grid.meshgrid()):
        edges = np.sort(rng.uniform(lo[axis], hi[axis], size=2))
        values = values * ((coords >= edges[0]) & (coords <= edges[1]))
    return values


def random_field(grid: GridSpec, rng: np.random.Generator) -> Field:
    return Field(grid, random_values(grid, rng))


def nonzero_random_field(grid: GridSpec, rng: np.random.Generator,
                         max_attempts: int = 100) -> Field:
    """Redraws until the values are not identically zero (empty indicators happen)."""
    for _ in range(max_attempts):
        values = random_values(grid, rng)
        if np.any(values != 0.0):
            return Field(grid, values)
    raise RuntimeError("mixture kept producing zero fields")


def compact_bump(grid: GridSpec, center: tuple[float, ...], width: float,
                 amplitude: float) -> Field:
    """C^1 bump amp*(1 - (r/width)^2)^2, exactly zero outside radius `width`.

    Exactly compact support makes these the right initial conditions for
    energy diagnostics: the excited region never touches the box boundary.
    """
    r = grid.radii(center)
    values = amplitude * np.where(r <= width, (1.0 - (r / width) ** 2) ** 2, 0.0)
    return Field(grid, values)
