"""Radial connectivity kernels: even, nonnegative, C^1, supported in the unit ball.

Families (unit amplitude shapes, later scaled):

* polynomial_bump  s(r) = (1 - r^2)^2 on r <= 1
* bump             s(r) = exp(-1/(1 - r^2)) on r < 1  (smooth mollifier)

Each kernel carries its stencil samples (spacing matching the field grid), a
discretely exact L^1 norm, and a bound S on the integral of |d/dx_i J| used by
the gradient-convolution estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import ParameterError, ResolutionError, ShapeMismatchError

BUMP = "bump"
POLYNOMIAL_BUMP = "polynomial_bump"

MAX_SPACING = 0.25  # at least 4 stencil points per unit radius

# int over S^{N-1} of |omega . e_1|
_ABS_COS_AREA = {1: 2.0, 2: 4.0, 3: 2.0 * math.pi}


def _shape_value(family: str, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if family == POLYNOMIAL_BUMP:
        return np.where(r <= 1.0, (1.0 - r**2) ** 2, 0.0)
    if family == BUMP:
        inside = r < 1.0
        out = np.zeros_like(r)
        rr = np.where(inside, r, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(inside, np.exp(-1.0 / (1.0 - rr**2)), 0.0)
        return out
    raise ParameterError(f"unknown kernel family {family!r}")


def _shape_deriv(family: str, r: np.ndarray) -> np.ndarray:
    """d s/d r of the unit-amplitude shape."""
    r = np.asarray(r, dtype=np.float64)
    if family == POLYNOMIAL_BUMP:
        return np.where(r <= 1.0, -4.0 * r * (1.0 - r**2), 0.0)
    inside = r < 1.0
    rr = np.where(inside, r, 0.0)
    with np.errstate(divide="ignore", over="ignore"):
        val = np.exp(-1.0 / (1.0 - rr**2)) * (-2.0 * rr) / (1.0 - rr**2) ** 2
    return np.where(inside, val, 0.0)


@lru_cache(maxsize=16)
def _base_integral(family: str, dim: int) -> float:
    """Integral of the unit-amplitude shape over R^N."""
    if family == POLYNOMIAL_BUMP:
        return {1: 16.0 / 15.0, 2: math.pi / 3.0, 3: 32.0 * math.pi / 105.0}[dim]
    area = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[dim]
    val, _ = quad(lambda r: math.exp(-1.0 / (1.0 - r * r)) * r ** (dim - 1), 0.0, 1.0,
                  limit=200)
    return area * val


@lru_cache(maxsize=16)
def _abs_grad_integral(family: str, dim: int) -> float:
    """Integral of |d/dx_1 of the unit-amplitude shape| over R^N."""
    if family == POLYNOMIAL_BUMP:
        # |s'(r)| = 4 r (1 - r^2); closed forms of A_N * int_0^1 |s'| r^{N-1} dr
        return {1: 2.0, 2: 32.0 / 15.0, 3: 2.0 * math.pi / 3.0}[dim]
    val, _ = quad(
        lambda r: abs(math.exp(-1.0 / (1.0 - r * r)) * 2.0 * r / (1.0 - r * r) ** 2)
        * r ** (dim - 1),
        0.0, 1.0, limit=200,
    )
    return _ABS_COS_AREA[dim] * val


@dataclass(frozen=True, eq=False)
class Kernel:
    """Grid-sampled connectivity kernel plus its certified constants.

    `terms` is the analytic description, a sum of scaled radial shapes; it
    survives blending and rescaling so refined resampling stays possible.
    """

    dim: int
    spacing: tuple[float, ...]
    samples: np.ndarray
    l1_norm: float
    deriv_bound: float
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def family(self) -> str:
        families = {fam for _, fam in self.terms}
        return families.pop() if len(families) == 1 else "blend"

    @property
    def radius_points(self) -> tuple[int, ...]:
        return tuple((n - 1) // 2 for n in self.samples.shape)

    @property
    def amplitude(self) -> float:
        return float(self.radial_value(np.asarray(0.0)))

    def radial_value(self, r: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(r, dtype=np.float64))
        for coef, fam in self.terms:
            out = out + coef * _shape_value(fam, r)
        return out

    def radial_deriv(self, r: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(r, dtype=np.float64))
        for coef, fam in self.terms:
            out = out + coef * _shape_deriv(fam, r)
        return out


def _stencil_radii(spacing: tuple[float, ...], refine: int = 1) -> np.ndarray:
    axes = []
    for s in spacing:
        m = math.ceil(1.0 / s) * refine
        axes.append(np.arange(-m, m + 1) * (s / refine))
    sq = np.zeros(tuple(len(a) for a in axes))
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    for g in grids:
        sq = sq + g**2
    return np.sqrt(sq)


def make_kernel(
    family: str,
    dim: int,
    spacing: float | tuple[float, ...],
    normalize_to: float | None = 1.0,
    amplitude: float = 1.0,
) -> Kernel:
    """Sample a kernel family on its stencil, with an exactly normalized L^1 mass.

    With `normalize_to` given, samples are rescaled so the stencil quadrature
    equals it exactly; otherwise the raw shape is scaled by `amplitude`.
    """
    if dim not in (1, 2, 3):
        raise ParameterError(f"dim must be 1, 2 or 3, got {dim}")
    if isinstance(spacing, (int, float)):
        spacing = (float(spacing),) * dim
    spacing = tuple(float(s) for s in spacing)
    if len(spacing) != dim:
        raise ShapeMismatchError(f"spacing needs {dim} entries, got {len(spacing)}")
    for s in spacing:
        if s <= 0:
            raise ParameterError(f"spacing must be positive, got {s}")
        if s > MAX_SPACING + 1e-12:
            raise ResolutionError(
                f"spacing {s:g} exceeds {MAX_SPACING}; need >= 4 stencil points per unit radius"
            )
    cell = math.prod(spacing)
    raw = _shape_value(family, _stencil_radii(spacing))
    raw_mass = float(np.sum(raw)) * cell  # stencil edges are zero, so this is the trapezoid
    if normalize_to is not None:
        if normalize_to <= 0:
            raise ParameterError(f"normalize_to must be positive, got {normalize_to}")
        coef = normalize_to / raw_mass
        l1 = float(normalize_to)
    else:
        if amplitude < 0:
            raise ParameterError("amplitude must be nonnegative")
        coef = float(amplitude)
        l1 = raw_mass * coef
    deriv_bound = _abs_grad_integral(family, dim) * coef
    return Kernel(dim, spacing, coef * raw, l1, deriv_bound, ((coef, family),))


def scale_kernel(kernel: Kernel, factor: float) -> Kernel:
    """Scale a kernel by a nonnegative factor (0 gives the zero kernel)."""
    if factor < 0:
        raise ParameterError("kernels must stay nonnegative; factor must be >= 0")
    return Kernel(
        kernel.dim,
        kernel.spacing,
        kernel.samples * factor,
        kernel.l1_norm * factor,
        kernel.deriv_bound * factor,
        tuple((c * factor, fam) for c, fam in kernel.terms),
    )


def blend_kernels(j0: Kernel, j1: Kernel, epsilon: float) -> Kernel:
    """(1 - eps) * j0 + eps * j1; evenness and unit-ball support are preserved."""
    if not (0.0 <= epsilon <= 1.0):
        raise ParameterError(f"epsilon must lie in [0, 1], got {epsilon}")
    if j0.dim != j1.dim or j0.spacing != j1.spacing or j0.samples.shape != j1.samples.shape:
        raise ShapeMismatchError("kernels must share dim, spacing and stencil shape")
    if epsilon == 0.0:
        return j0
    if epsilon == 1.0:
        return j1
    samples = (1.0 - epsilon) * j0.samples + epsilon * j1.samples
    cell = math.prod(j0.spacing)
    l1 = float(np.sum(samples)) * cell
    terms = tuple((c * (1.0 - epsilon), fam) for c, fam in j0.terms) + tuple(
        (c * epsilon, fam) for c, fam in j1.terms
    )
    # integral of |grad| of a nonnegative mix is at most the mix of the integrals
    bound = (1.0 - epsilon) * j0.deriv_bound + epsilon * j1.deriv_bound
    return Kernel(j0.dim, j0.spacing, samples, l1, bound, terms)


@dataclass(frozen=True)
class H4Report:
    S_observed: float
    bound: float
    ok: bool
    refine: int


def verify_h4(kernel: Kernel, refine: int = 4) -> H4Report:
    """Check the derivative bound against central differences on a refined stencil."""
    radii = _stencil_radii(kernel.spacing, refine)
    values = kernel.radial_value(radii)
    cell = math.prod(s / refine for s in kernel.spacing)
    worst = 0.0
    for axis in range(kernel.dim):
        grad = np.gradient(values, kernel.spacing[axis] / refine, axis=axis)
        worst = max(worst, float(np.sum(np.abs(grad))) * cell)
    return H4Report(worst, kernel.deriv_bound, worst <= kernel.deriv_bound * (1.0 + 1e-3),
                    refine)
