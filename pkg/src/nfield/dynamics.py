"""Time evolution of u' = -u + J*(f o u) + h and the homogeneous equilibrium.

The default integrator treats the linear decay exactly and freezes the
nonlocal term over the step,

    u+ = exp(-dt) u + (1 - exp(-dt)) [J*(f o u) + h],

a convex combination that unconditionally preserves the sup-norm ball of
radius a ||J||_1 + h. Classical RK4 is kept as the high-accuracy reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import ConvolutionPlan, convolve_values
from .errors import DivergenceError, OutOfModelError, ParameterError, ShapeMismatchError
from .firing import FiringRate
from .grid import Field, GridSpec, trapezoid_weights
from .kernels import Kernel
from .randfields import nonzero_random_field
from .weights import Weight, weight_samples, _abs_power

EXPONENTIAL_EULER = "exponential_euler"
RK4 = "rk4"
MAX_DT = 0.1


@dataclass(eq=False)
class ModelParams:
    """Model data; `shifted` selects the deviation form of the same equation.

    The default evolves u' = -u + J*(f o u) + h with the field taken as zero
    outside the box. With shifted=True the evolution is written relative to
    the homogeneous equilibrium u0, u' = -(u - u0) + J*(f o u - f(u0)), whose
    zero extension means the off-box field rests at u0; this is the setting
    in which the energy functional decays exactly, because a zero-extended
    firing input is inconsistent with a resting boundary layer.
    """

    kernel: Kernel
    firing: FiringRate
    h: float
    plan: ConvolutionPlan
    shifted: bool = False

    def __post_init__(self):
        if self.h <= 0:
            raise ParameterError(f"external stimulus h must be positive, got {self.h}")
        if self.plan.kernel is not self.kernel:
            raise ShapeMismatchError("plan was built for a different kernel")
        self._u_star = homogeneous_equilibrium(self.firing, self.kernel.l1_norm, self.h).u0
        self._f_star = float(self.firing.value(self._u_star))

    @property
    def equilibrium_value(self) -> float:
        return self._u_star

    @property
    def grid(self) -> GridSpec:
        return self.plan.grid

    @property
    def sup_bound(self) -> float:
        """a ||J||_1 + h, the pointwise bound on J*(f o u) + h (both modes)."""
        return self.firing.a * self.kernel.l1_norm + self.h


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    integrator: str = EXPONENTIAL_EULER
    record_every: int = 100
    seed: int = 12345

    def __post_init__(self):
        if not (0 < self.dt <= MAX_DT):
            raise ParameterError(f"dt must lie in (0, {MAX_DT}], got {self.dt}")
        if self.t_end < 0:
            raise ParameterError(f"t_end must be nonnegative, got {self.t_end}")
        if self.integrator not in (EXPONENTIAL_EULER, RK4):
            raise ParameterError(f"unknown integrator {self.integrator!r}")
        if self.record_every < 1:
            raise ParameterError("record_every must be >= 1")


@dataclass
class DiagnosticsSeries:
    t: np.ndarray
    lp_norm: np.ndarray | None
    sup_norm: np.ndarray
    lyapunov_G: np.ndarray | None
    dG_dt: np.ndarray | None


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list[Field]
    diagnostics: DiagnosticsSeries


def frozen_term(params: ModelParams, values: np.ndarray) -> np.ndarray:
    """The nonlocal-plus-stimulus part of the right-hand side.

    Unshifted: J*(f o u) + h. Shifted: J*(f o u - f(u0)) + u0, which is the
    same expression under the resting-state extension of the field.
    """
    fu = params.firing.value(values)
    if params.shifted:
        return convolve_values(params.plan, fu - params._f_star) + params._u_star
    return convolve_values(params.plan, fu) + params.h


def rhs_values(params: ModelParams, values: np.ndarray) -> np.ndarray:
    return -values + frozen_term(params, values)


def rhs(params: ModelParams, u: Field) -> Field:
    if u.grid != params.grid:
        raise ShapeMismatchError("field grid does not match the model grid")
    return Field(u.grid, rhs_values(params, u.values))


def step_exponential_euler(params: ModelParams, u: Field, dt: float) -> Field:
    if dt <= 0:
        raise ParameterError("dt must be positive")
    decay = math.exp(-dt)
    return Field(u.grid, decay * u.values + (1.0 - decay) * frozen_term(params, u.values))


def step_rk4(params: ModelParams, u: Field, dt: float) -> Field:
    if dt <= 0:
        raise ParameterError("dt must be positive")
    v = u.values
    k1 = rhs_values(params, v)
    k2 = rhs_values(params, v + 0.5 * dt * k1)
    k3 = rhs_values(params, v + 0.5 * dt * k2)
    k4 = rhs_values(params, v + dt * k3)
    return Field(u.grid, v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def simulate(
    params: ModelParams,
    config: SimConfig,
    u0: Field,
    weight: Weight | None = None,
    p: float = 2.0,
    equilibrium: float | None = None,
) -> Trajectory:
    """Integrate from t = 0 to t_end, recording diagnostics every record_every steps.

    When `weight` is given the weighted L^p norm is recorded; when the firing
    rate is strictly increasing the energy G (relative to the homogeneous
    equilibrium) and its decay rate are recorded as well. Deterministic for
    fixed inputs; a non-finite state aborts with the failing step index.
    """
    if u0.grid != params.grid:
        raise ShapeMismatchError("initial condition grid does not match the model grid")
    grid = params.grid
    firing = params.firing
    n_steps = int(round(config.t_end / config.dt)) if config.t_end > 0 else 0

    track_energy = firing.strictly_increasing
    if track_energy:
        if equilibrium is None or params.shifted:
            equilibrium = params.equilibrium_value
        f_star = float(firing.value(equilibrium))
        conv_one = None
        if not params.shifted:
            conv_one = convolve_values(params.plan, np.ones(grid.shape))
    w = trapezoid_weights(grid)
    rho = weight_samples(weight, grid) if weight is not None else None

    decay = math.exp(-config.dt)
    times, snapshots = [], []
    lp_series, sup_series, g_series, rate_series = [], [], [], []

    state = u0.values
    for step in range(n_steps + 1):
        if not np.isfinite(state).all():
            raise DivergenceError(step, step * config.dt)
        recording = step % config.record_every == 0 or step == n_steps
        fu = frozen = conv_fu = None
        if recording or config.integrator == EXPONENTIAL_EULER:
            fu = firing.value(state)
            if params.shifted:
                conv_fu = convolve_values(params.plan, fu - f_star)
                frozen = conv_fu + equilibrium
            else:
                conv_fu = convolve_values(params.plan, fu)
                frozen = conv_fu + params.h
        if recording:
            times.append(step * config.dt)
            snapshots.append(Field(grid, state))
            sup_series.append(float(np.max(np.abs(state))))
            if rho is not None:
                lp_series.append(float(np.sum(_abs_power(state, p) * rho * w)) ** (1.0 / p))
            if track_energy:
                phi = fu - f_star
                conv_phi = conv_fu if params.shifted else conv_fu - f_star * conv_one
                # int_0^phi g^{-1} for the shifted nonlinearity g; the -u0 phi
                # correction makes the decay identity dG/dt = -int f'(u) u_t^2 exact
                inv_int = firing.inverse_integral(f_star, fu) - equilibrium * phi
                g_series.append(float(np.sum((-0.5 * phi * conv_phi + inv_int) * w)))
                rhs_now = -state + frozen
                rate_series.append(
                    -float(np.sum(firing.derivative(state) * rhs_now**2 * w))
                )
        if step == n_steps:
            break
        if config.integrator == EXPONENTIAL_EULER:
            state = decay * state + (1.0 - decay) * frozen
        else:
            k1 = rhs_values(params, state)
            k2 = rhs_values(params, state + 0.5 * config.dt * k1)
            k3 = rhs_values(params, state + 0.5 * config.dt * k2)
            k4 = rhs_values(params, state + config.dt * k3)
            state = state + (config.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    diagnostics = DiagnosticsSeries(
        t=np.asarray(times),
        lp_norm=np.asarray(lp_series) if rho is not None else None,
        sup_norm=np.asarray(sup_series),
        lyapunov_G=np.asarray(g_series) if track_energy else None,
        dG_dt=np.asarray(rate_series) if track_energy else None,
    )
    return Trajectory(np.asarray(times), snapshots, diagnostics)


# ---------------------------------------------------------------------------
# Homogeneous equilibria: u0 = ||J||_1 f(u0) + h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumResult:
    u0: float
    unique: bool
    residual: float
    iterations: int


def homogeneous_equilibrium(firing: FiringRate, l1_norm: float, h: float) -> EquilibriumResult:
    """Bisection on the bracket [h, ||J||_1 a + h], where the root must lie.

    Uniqueness is claimed only under the contraction condition ||J||_1 k1 < 1.
    """
    if l1_norm < 0:
        raise ParameterError("l1_norm must be nonnegative")
    if h <= 0:
        raise ParameterError("h must be positive")
    unique = l1_norm * firing.lipschitz_constant < 1.0

    def g(u: float) -> float:
        return u - l1_norm * float(firing.value(u)) - h

    lo, hi = h, l1_norm * firing.a + h
    if g(lo) == 0.0:
        return EquilibriumResult(lo, unique, 0.0, 0)
    if g(hi) == 0.0:
        return EquilibriumResult(hi, unique, 0.0, 0)
    iterations = 0
    while hi - lo > 1e-16 * max(1.0, abs(hi)) and iterations < 200:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    u0 = 0.5 * (lo + hi)
    return EquilibriumResult(u0, unique, abs(g(u0)), iterations)


def fixed_point_equilibrium(firing: FiringRate, l1_norm: float, h: float,
                            damping: float = 0.5, tol: float = 1e-14,
                            max_iter: int = 100_000) -> float:
    """Damped fixed-point iteration; independent cross-check of the bisection root."""
    if not (0 < damping <= 1):
        raise ParameterError("damping must lie in (0, 1]")
    u = h
    for _ in range(max_iter):
        target = l1_norm * float(firing.value(u)) + h
        step = damping * (target - u)
        u += step
        if abs(step) <= tol * max(1.0, abs(u)):
            return u
    raise RuntimeError("fixed-point iteration did not converge")


def resting_stimulus(firing: FiringRate, l1_norm: float, u0: float) -> float:
    """The h making u0 a resting state: h = u0 - ||J||_1 f(u0); must be positive."""
    if not math.isfinite(u0):
        raise ParameterError("u0 must be finite")
    h = u0 - l1_norm * float(firing.value(u0))
    if h <= 0:
        raise OutOfModelError(
            f"computed stimulus h = {h:g} is not positive; the model requires h > 0"
        )
    return h


# ---------------------------------------------------------------------------
# Lipschitz certification of the right-hand side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LipschitzReport:
    max_quotient: float
    bound: float
    ok: bool
    trials: int


def certify_lipschitz(params: ModelParams, weight: Weight, p: float, trials: int,
                      seed: int = 4242) -> LipschitzReport:
    """Monte-Carlo check of ||F(u)-F(v)|| <= (1 + K^(1/p) ||J||_1 k1) ||u-v||."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    grid = params.grid
    rho = weight_samples(weight, grid)
    w = trapezoid_weights(grid)
    bound = 1.0 + weight.K ** (1.0 / p) * params.kernel.l1_norm * params.firing.lipschitz_constant

    def norm(values: np.ndarray) -> float:
        return float(np.sum(_abs_power(values, p) * rho * w)) ** (1.0 / p)

    worst = 0.0
    for _ in range(trials):
        u = nonzero_random_field(grid, rng).values
        v = nonzero_random_field(grid, rng).values
        denominator = norm(u - v)
        if denominator == 0.0:
            continue
        quotient = norm(rhs_values(params, u) - rhs_values(params, v)) / denominator
        worst = max(worst, quotient)
    return LipschitzReport(worst, bound, worst <= bound * (1.0 + 1e-6), trials)
