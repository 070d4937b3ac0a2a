"""Attractor diagnostics and the energy functional.

The global attractor is approximated from below by post-transient snapshot
clouds of finitely many trajectories started inside the absorbing ball of
radius R + eps, R = a K^(1/p) ||J||_1 + h and eps fixed at 0.01 R. Under-
approximation is the conservative direction for the directed-semidistance
experiments: a too-small baseline cloud can only inflate the measured
semidistance.

The energy G is always taken relative to the homogeneous equilibrium (the
full-space functional can be infinite and is deliberately not implemented).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import convolve_values, make_plan
from .dynamics import (
    ModelParams,
    SimConfig,
    Trajectory,
    homogeneous_equilibrium,
    rhs_values,
    simulate,
)
from .errors import EmptySampleError, InvertibilityError, ParameterError
from .firing import FiringRate
from .grid import Field, GridSpec, quadrature_values, trapezoid_weights
from .kernels import Kernel, blend_kernels
from .randfields import nonzero_random_field
from .weights import Weight, weight_samples, weighted_lp_norm, _abs_power

ATTRACTOR_EPS_FACTOR = 0.01  # eps in B(0, R + eps), as a fraction of R
_SUP_TO_NORM_CAP = 50.0  # reject initial draws spikier than this, see sample_attractor


def absorbing_radius(params: ModelParams, weight: Weight, p: float) -> float:
    """R = a K^(1/p) ||J||_1 + h."""
    return (params.firing.a * weight.K ** (1.0 / p) * params.kernel.l1_norm + params.h)


# ---------------------------------------------------------------------------
# Norm decay along trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbsorbingReport:
    R: float
    max_violation: float
    ok: bool
    entry_time: float
    entry_ok: bool


def certify_absorbing(trajectory: Trajectory, weight: Weight, p: float,
                      params: ModelParams, tol: float = 1e-2) -> AbsorbingReport:
    """Check ||u(t)|| <= exp(-t) ||u(0)|| + R + tol at every recorded time.

    Also checks the entry-time statement: past t = ln(||u(0)||/eps) plus one
    recording interval, the norm stays below R + eps with eps = 0.01 R.
    """
    diag = trajectory.diagnostics
    if diag.lp_norm is None:
        raise ParameterError("trajectory was recorded without the weighted norm")
    R = absorbing_radius(params, weight, p)
    t = diag.t
    lp = diag.lp_norm
    violation = lp - (np.exp(-t) * lp[0] + R)
    eps = ATTRACTOR_EPS_FACTOR * R
    entry_time = math.log(lp[0] / eps) if lp[0] > eps else 0.0
    slack = t[1] - t[0] if len(t) > 1 else 0.0
    past = t > entry_time + slack + 1e-12
    entry_ok = bool(np.all(lp[past] < R + eps)) if past.any() else True
    return AbsorbingReport(R, float(np.max(violation)), float(np.max(violation)) <= tol,
                           entry_time, entry_ok)


# ---------------------------------------------------------------------------
# Attractor sampling and the sup-norm bound
# ---------------------------------------------------------------------------

@dataclass
class AttractorSample:
    snapshots: list[Field]
    t_transient: float
    t_sample: float
    initial_sups: tuple[float, ...]
    seed: int
    summary: dict


def sample_attractor(params: ModelParams, config: SimConfig, n_initial: int,
                     t_transient: float, t_sample: float,
                     weight: Weight, p: float) -> AttractorSample:
    """Post-transient snapshots from seeded random starts inside B(0, R + eps).

    Draws are rescaled to a random weighted norm below R + eps; draws whose
    sup norm exceeds 50 (R + eps) are rejected so the linear decay of the
    initial condition is below certification tolerances after the transient.
    """
    if n_initial < 1:
        raise ParameterError("n_initial must be >= 1")
    if t_transient < 5:
        raise ParameterError("t_transient must be >= 5 decay times")
    R = absorbing_radius(params, weight, p)
    ball = R * (1.0 + ATTRACTOR_EPS_FACTOR)
    rng = np.random.default_rng(config.seed)
    grid = params.grid
    snapshots: list[Field] = []
    initial_sups = []
    for _ in range(n_initial):
        u0 = None
        for _ in range(100):
            draw = nonzero_random_field(grid, rng)
            norm = weighted_lp_norm(draw, weight, p)
            scale = ball * rng.uniform(0.2, 1.0) / norm
            if np.max(np.abs(draw.values)) * scale <= _SUP_TO_NORM_CAP * ball:
                u0 = Field(grid, draw.values * scale)
                break
        if u0 is None:
            raise RuntimeError("could not draw an initial condition inside the ball")
        initial_sups.append(float(np.max(np.abs(u0.values))))
        run_config = SimConfig(dt=config.dt, t_end=t_transient + t_sample,
                               integrator=config.integrator,
                               record_every=config.record_every, seed=config.seed)
        trajectory = simulate(params, run_config, u0, weight=weight, p=p)
        for time, snap in zip(trajectory.times, trajectory.snapshots):
            if time >= t_transient - 1e-12:
                snapshots.append(snap)
    sample = AttractorSample(
        snapshots, t_transient, t_sample, tuple(initial_sups), config.seed,
        summary={
            "l1_norm": params.kernel.l1_norm,
            "a": params.firing.a,
            "h": params.h,
            "K": weight.K,
            "p": p,
        },
    )
    _check_sample_invariants(sample, params, weight, p)
    return sample


def _check_sample_invariants(sample: AttractorSample, params: ModelParams,
                             weight: Weight, p: float):
    r = params.sup_bound
    R = absorbing_radius(params, weight, p)
    decay = math.exp(-sample.t_transient) * max(sample.initial_sups)
    for snap in sample.snapshots:
        sup = float(np.max(np.abs(snap.values)))
        if sup > r + 1e-6 + decay:
            raise RuntimeError(f"attractor snapshot violates the sup bound: {sup} > {r}")
        if weighted_lp_norm(snap, weight, p) > R + 1e-3:
            raise RuntimeError("attractor snapshot violates the weighted-norm ball")


@dataclass(frozen=True)
class LinfReport:
    r: float
    max_sup: float
    ok: bool


def certify_linf_bound(sample: AttractorSample, params: ModelParams,
                       tol: float = 1e-6) -> LinfReport:
    """Post-transient states must lie in the sup-norm ball of radius a ||J||_1 + h,
    up to the linear decay of the initial condition."""
    if sample.t_transient < 5:
        raise ParameterError("t_transient must be >= 5 decay times")
    if not sample.snapshots:
        raise EmptySampleError("sample holds no snapshots")
    r = params.sup_bound
    max_sup = max(float(np.max(np.abs(s.values))) for s in sample.snapshots)
    allowance = r + tol + math.exp(-sample.t_transient) * max(sample.initial_sups)
    return LinfReport(r, max_sup, max_sup <= allowance)


# ---------------------------------------------------------------------------
# Energy functional relative to the homogeneous equilibrium
# ---------------------------------------------------------------------------

def lyapunov_G(u: Field, params: ModelParams, u0: float) -> float:
    """Energy relative to the homogeneous equilibrium u0: with phi = f(u) - f(u0),

        G(u) = integral of -1/2 phi (J*phi) + int_0^phi g^{-1}(rho) d rho,

    where g is the shifted nonlinearity g(U) = f(U + u0) - f(u0), so that
    int_0^phi g^{-1} = int_{f(u0)}^{f(u)} f^{-1}(r) dr - u0 phi. The u0 phi
    correction is what makes dG/dt = -int f'(u) (du/dt)^2 along the flow.
    """
    firing = params.firing
    if not firing.strictly_increasing:
        raise InvertibilityError("energy functional needs an invertible firing rate")
    fu = firing.value(u.values)
    f_star = float(firing.value(u0))
    phi = fu - f_star
    conv_phi = convolve_values(params.plan, phi)
    inv_int = firing.inverse_integral(f_star, fu) - u0 * phi
    return quadrature_values(-0.5 * phi * conv_phi + inv_int, u.grid)


def lyapunov_rate(u: Field, params: ModelParams) -> float:
    """dG/dt along the flow: -integral of f'(u) (du/dt)^2; nonpositive."""
    firing = params.firing
    if not firing.strictly_increasing:
        raise InvertibilityError("energy functional needs an invertible firing rate")
    du = rhs_values(params, u.values)
    return -quadrature_values(firing.derivative(u.values) * du**2, u.grid)


@dataclass(frozen=True)
class H6Report:
    fractions: tuple[float, ...]
    tail_masses: tuple[float, ...]
    converged: bool


def check_h6(u: Field, params: ModelParams, u0: float,
             fractions: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)) -> H6Report:
    """Excited-region mass over nested sub-boxes; convergence of the last two
    values is the numeric proxy for a finite excited region."""
    if any(f2 <= f1 for f1, f2 in zip(fractions, fractions[1:])) or not fractions:
        raise ParameterError("fractions must be increasing")
    if fractions[0] <= 0 or fractions[-1] > 1:
        raise ParameterError("fractions must lie in (0, 1]")
    grid = u.grid
    excite = np.abs(params.firing.value(u.values) - float(params.firing.value(u0)))
    lo, hi = grid.box_lo, grid.box_hi
    masses = []
    for frac in fractions:
        mask = np.ones(grid.shape, dtype=bool)
        for axis, coords in enumerate(grid.meshgrid()):
            center = 0.5 * (lo[axis] + hi[axis])
            half = 0.5 * (hi[axis] - lo[axis]) * frac
            mask = mask & (np.abs(coords - center) <= half + 1e-12)
        masses.append(quadrature_values(excite * mask, grid))
    converged = abs(masses[-1] - masses[-2]) <= 1e-6 * max(abs(masses[-1]), 1e-12) \
        if len(masses) > 1 else False
    return H6Report(tuple(fractions), tuple(masses), converged)


# ---------------------------------------------------------------------------
# Semidistance between sampled attractors, and the kernel-perturbation sweep
# ---------------------------------------------------------------------------

def semidistance(a: AttractorSample, b: AttractorSample, weight: Weight, p: float) -> float:
    """Directed Hausdorff semidistance: max over a of min over b of the weighted
    L^p distance. Not symmetric; zero when every snapshot of a appears in b."""
    if not a.snapshots or not b.snapshots:
        raise EmptySampleError("semidistance needs nonempty samples")
    grid = a.snapshots[0].grid
    if any(s.grid != grid for s in b.snapshots):
        raise ParameterError("samples live on different grids")
    rho = weight_samples(weight, grid)
    w = trapezoid_weights(grid)
    worst = 0.0
    for sa in a.snapshots:
        best = math.inf
        for sb in b.snapshots:
            dist = float(np.sum(_abs_power(sa.values - sb.values, p) * rho * w)) ** (1.0 / p)
            best = min(best, dist)
        worst = max(worst, best)
    return worst


@dataclass(frozen=True)
class SemicontinuityRow:
    epsilon: float
    semidistance: float
    R_max: float
    max_sup_norm: float


@dataclass(frozen=True)
class SemicontinuityResult:
    rows: tuple[SemicontinuityRow, ...]
    R_max: float
    containment_ok: bool


def semicontinuity_experiment(
    j0: Kernel,
    j1: Kernel,
    epsilons: list[float],
    firing: FiringRate,
    h: float,
    grid: GridSpec,
    config: SimConfig,
    weight: Weight,
    p: float,
    n_initial: int = 3,
    t_transient: float = 20.0,
    t_sample: float = 2.0,
    engine: str = "fourier",
) -> SemicontinuityResult:
    """Sample the attractor of J_eps = (1-eps) J0 + eps J1 for a decreasing list
    of eps and report the directed semidistance to the J0 attractor, plus the
    uniform ball containment over the whole sweep."""
    if any(e2 >= e1 for e1, e2 in zip(epsilons, epsilons[1:])):
        raise ParameterError("epsilons must be strictly decreasing")
    if epsilons and epsilons[-1] < 0:
        raise ParameterError("epsilons must be nonnegative")

    def build(kernel: Kernel) -> ModelParams:
        return ModelParams(kernel, firing, h, make_plan(kernel, grid, engine))

    baseline = sample_attractor(build(j0), config, n_initial, t_transient, t_sample,
                                weight, p)
    kernels = [blend_kernels(j0, j1, e) for e in epsilons]
    l1_max = max([j0.l1_norm] + [k.l1_norm for k in kernels])
    R_max = firing.a * weight.K ** (1.0 / p) * l1_max + h

    rows = []
    containment = all(
        weighted_lp_norm(s, weight, p) <= R_max + 1e-3 for s in baseline.snapshots
    )
    for eps, kernel in zip(epsilons, kernels):
        sample = sample_attractor(build(kernel), config, n_initial, t_transient,
                                  t_sample, weight, p)
        d = semidistance(sample, baseline, weight, p)
        max_sup = max(float(np.max(np.abs(s.values))) for s in sample.snapshots)
        containment &= all(
            weighted_lp_norm(s, weight, p) <= R_max + 1e-3 for s in sample.snapshots
        )
        rows.append(SemicontinuityRow(eps, d, R_max, max_sup))
    return SemicontinuityResult(tuple(rows), R_max, containment)
