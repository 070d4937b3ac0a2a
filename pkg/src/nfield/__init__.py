"""Simulation and certification toolkit for the nonlocal evolution equation

    du/dt = -u + J*(f o u) + h,    h > 0,

on a truncated box, in weighted L^p phase spaces. Every quantitative estimate
the model admits (convolution norm bound, Lipschitz constant, absorbing ball,
sup-norm attractor bound, attractor semicontinuity in J, energy decay) has a
numeric certifier in this package.
"""

from .analysis import (
    AttractorSample,
    absorbing_radius,
    certify_absorbing,
    certify_linf_bound,
    check_h6,
    lyapunov_G,
    lyapunov_rate,
    sample_attractor,
    semicontinuity_experiment,
    semidistance,
)
from .convolution import (
    ConvolutionPlan,
    benchmark,
    certify_lemma21,
    convolve,
    convolve_gradient,
    make_plan,
)
from .dynamics import (
    ModelParams,
    SimConfig,
    Trajectory,
    certify_lipschitz,
    fixed_point_equilibrium,
    homogeneous_equilibrium,
    resting_stimulus,
    rhs,
    simulate,
    step_exponential_euler,
    step_rk4,
)
from .firing import FiringRate, saturating_ramp, sigmoid
from .grid import (
    Field,
    GridSpec,
    centered_grid,
    constant_field,
    interior_mask,
    quadrature,
    read_snapshot,
    write_snapshot,
)
from .kernels import Kernel, blend_kernels, make_kernel, scale_kernel, verify_h4
from .weights import Weight, make_weight, verify_h2, weighted_lp_norm

__version__ = "0.1.0"

__all__ = [
    "AttractorSample",
    "ConvolutionPlan",
    "Field",
    "FiringRate",
    "GridSpec",
    "Kernel",
    "ModelParams",
    "SimConfig",
    "Trajectory",
    "Weight",
    "absorbing_radius",
    "benchmark",
    "blend_kernels",
    "centered_grid",
    "certify_absorbing",
    "certify_lemma21",
    "certify_linf_bound",
    "certify_lipschitz",
    "check_h6",
    "constant_field",
    "convolve",
    "convolve_gradient",
    "fixed_point_equilibrium",
    "homogeneous_equilibrium",
    "interior_mask",
    "lyapunov_G",
    "lyapunov_rate",
    "make_kernel",
    "make_plan",
    "make_weight",
    "quadrature",
    "read_snapshot",
    "resting_stimulus",
    "rhs",
    "sample_attractor",
    "saturating_ramp",
    "scale_kernel",
    "semicontinuity_experiment",
    "semidistance",
    "sigmoid",
    "simulate",
    "step_exponential_euler",
    "step_rk4",
    "verify_h2",
    "verify_h4",
    "weighted_lp_norm",
    "write_snapshot",
]
