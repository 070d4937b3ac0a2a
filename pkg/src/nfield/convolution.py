"""The spatial operator J * v with two interchangeable engines.

* direct: stencil summation (numba-jitted with a numpy fallback); this is the
  oracle every other path is checked against.
* fourier: FFT with zero padding to at least grid + stencil - 1 points per
  axis, so the circular product realizes the same linear, zero-extension
  convolution; results agree with the direct engine to 1e-10.

Fields are taken as zero outside the box, matching the truncation semantics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.fft import irfftn, next_fast_len, rfftn

from . import _stencil
from .errors import ParameterError, ShapeMismatchError
from .grid import Field, GridSpec, centered_grid
from .kernels import Kernel, make_kernel
from .randfields import nonzero_random_field
from .weights import Weight, norm_on_interior, weighted_lp_norm

DIRECT = "direct"
FOURIER = "fourier"


@dataclass(eq=False)
class ConvolutionPlan:
    """Precomputed state for repeated convolutions on one (kernel, grid) pair."""

    engine: str
    kernel: Kernel
    grid: GridSpec
    backend: str  # direct-path backend: "numba" or "numpy"
    _pad_shape: tuple[int, ...] | None = None
    _spectrum: np.ndarray | None = None
    _grad_stencils: dict = dc_field(default_factory=dict)

    @property
    def boundary(self) -> str:
        return "zero-extension"


def make_plan(kernel: Kernel, grid: GridSpec, engine: str = FOURIER,
              backend: str | None = None) -> ConvolutionPlan:
    if engine not in (DIRECT, FOURIER):
        raise ParameterError(f"unknown engine {engine!r}")
    if kernel.dim != grid.dim:
        raise ShapeMismatchError(f"kernel dim {kernel.dim} != grid dim {grid.dim}")
    for ks, gs in zip(kernel.spacing, grid.spacing):
        if abs(ks - gs) > 1e-12 * gs:
            raise ShapeMismatchError(
                f"kernel spacing {kernel.spacing} does not match grid spacing {grid.spacing}"
            )
    plan = ConvolutionPlan(engine, kernel, grid, backend or _stencil.default_backend())
    if engine == FOURIER:
        radius = kernel.radius_points
        pad_shape = tuple(
            next_fast_len(n + 2 * m) for n, m in zip(grid.counts, radius)
        )
        kpad = np.zeros(pad_shape)
        kpad[tuple(slice(0, s) for s in kernel.samples.shape)] = kernel.samples
        kpad = np.roll(kpad, shift=[-m for m in radius], axis=tuple(range(grid.dim)))
        plan._pad_shape = pad_shape
        plan._spectrum = rfftn(kpad)
    return plan


def convolve_values(plan: ConvolutionPlan, values: np.ndarray) -> np.ndarray:
    """Raw-array convolution; the hot path used by integrators and certifiers."""
    cell = plan.grid.cell_volume
    if plan.engine == DIRECT:
        return _stencil.direct_convolve(values, plan.kernel.samples,
                                        plan.kernel.radius_points, cell, plan.backend)
    spec = rfftn(values, s=plan._pad_shape)
    out = irfftn(spec * plan._spectrum, s=plan._pad_shape)
    return out[tuple(slice(0, n) for n in plan.grid.counts)] * cell


def convolve(plan: ConvolutionPlan, v: Field) -> Field:
    if v.grid != plan.grid:
        raise ShapeMismatchError("field grid does not match the plan grid")
    return Field(plan.grid, convolve_values(plan, v.values))


def _gradient_stencil(plan: ConvolutionPlan, axis: int) -> np.ndarray:
    if axis not in plan._grad_stencils:
        kernel = plan.kernel
        axes = [np.arange(-m, m + 1) * s for m, s in zip(kernel.radius_points, kernel.spacing)]
        grids = np.meshgrid(*axes, indexing="ij", sparse=True)
        r = np.sqrt(sum(g**2 for g in grids))
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(r > 0, grids[axis] / np.where(r > 0, r, 1.0), 0.0)
        plan._grad_stencils[axis] = kernel.radial_deriv(r) * direction
    return plan._grad_stencils[axis]


def convolve_gradient(plan: ConvolutionPlan, v: Field, axis: int) -> Field:
    """(d/dx_axis J) * v via the direct engine with the differentiated stencil."""
    if v.grid != plan.grid:
        raise ShapeMismatchError("field grid does not match the plan grid")
    if not (0 <= axis < plan.grid.dim):
        raise ParameterError(f"axis {axis} out of range for dim {plan.grid.dim}")
    stencil = _gradient_stencil(plan, axis)
    out = _stencil.direct_convolve(v.values, stencil, plan.kernel.radius_points,
                                   plan.grid.cell_volume, plan.backend)
    return Field(plan.grid, out)


def engine_difference(kernel: Kernel, grid: GridSpec, fields: list[Field]) -> float:
    """max abs difference of the two engines over the given fields, full grid."""
    direct = make_plan(kernel, grid, DIRECT)
    fourier = make_plan(kernel, grid, FOURIER)
    worst = 0.0
    for f in fields:
        d = convolve_values(direct, f.values)
        g = convolve_values(fourier, f.values)
        worst = max(worst, float(np.max(np.abs(d - g))))
    return worst


# ---------------------------------------------------------------------------
# Convolution norm bound certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma21Report:
    max_ratio: float
    bound: float
    ok: bool
    trials: int


def certify_lemma21(plan: ConvolutionPlan, weight: Weight, p: float, trials: int,
                    seed: int = 2025, margin: float = 1.0) -> Lemma21Report:
    """Monte-Carlo check of ||J*u|| <= K^(1/p) ||J||_1 ||u|| in the weighted norm.

    The numerator norm is restricted to the margin-deep interior, where the
    box truncation cannot be felt; the denominator is the full-box norm of u.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    bound = weight.K ** (1.0 / p) * plan.kernel.l1_norm
    worst = 0.0
    for _ in range(trials):
        u = nonzero_random_field(plan.grid, rng)
        denominator = weighted_lp_norm(u, weight, p)
        if denominator == 0.0:
            continue
        conv = convolve_values(plan, u.values)
        numerator = norm_on_interior(conv, weight, plan.grid, p, margin)
        worst = max(worst, numerator / denominator)
    return Lemma21Report(worst, bound, worst <= bound * (1.0 + 1e-6), trials)


# ---------------------------------------------------------------------------
# Engine benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkRow:
    engine: str
    points: int
    seconds_per_call: float
    max_abs_diff_vs_direct: float


BENCH_ENGINES = (DIRECT, "direct-numpy", FOURIER)


def benchmark(sizes: list[int], dim: int = 1, engines: tuple[str, ...] = BENCH_ENGINES,
              trials: int = 5, kernel_family: str = "polynomial_bump",
              half_width: float = 4.0, seed: int = 7) -> list[BenchmarkRow]:
    """Time each engine per size; agreement with the direct oracle is asserted first.

    The "direct" engine uses the active stencil backend (numba unless disabled
    via the environment flag), "direct-numpy" forces the pure-numpy fallback.
    """
    if not sizes:
        raise ParameterError("sizes must be nonempty")
    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        grid = centered_grid(dim, half_width, size)
        kernel = make_kernel(kernel_family, dim, grid.spacing, normalize_to=1.0)
        v = nonzero_random_field(grid, rng)
        plans = {
            DIRECT: make_plan(kernel, grid, DIRECT),
            "direct-numpy": make_plan(kernel, grid, DIRECT, backend="numpy"),
            FOURIER: make_plan(kernel, grid, FOURIER),
        }
        reference = convolve_values(plans[DIRECT], v.values)
        for engine in engines:
            if engine not in plans:
                raise ParameterError(f"unknown benchmark engine {engine!r}")
            plan = plans[engine]
            out = convolve_values(plan, v.values)  # warm-up; also the agreement check
            diff = float(np.max(np.abs(out - reference)))
            if diff > 1e-10:
                raise AssertionError(
                    f"engine {engine} disagrees with direct by {diff:.3e} at size {size}"
                )
            start = time.perf_counter()
            for _ in range(trials):
                convolve_values(plan, v.values)
            elapsed = (time.perf_counter() - start) / trials
            rows.append(BenchmarkRow(engine, grid.num_points, elapsed, diff))
    return rows
