"""Line-oriented run configuration: `section.key = value`, `#` comments.

Every key is validated at load time against the preconditions of the module
that consumes it, unknown keys are rejected, and parse errors carry line
numbers. A parsed config serializes back to text that parses to an equal
config.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .convolution import make_plan
from .dynamics import ModelParams, SimConfig
from .errors import ConfigError
from .firing import FiringRate, saturating_ramp, sigmoid
from .grid import GridSpec, centered_grid
from .kernels import MAX_SPACING, Kernel, make_kernel
from .weights import Weight, make_weight


@dataclass
class ModelSection:
    h: float = 0.1
    p: float = 2.0


@dataclass
class SpaceSection:
    dim: int = 1
    points: int = 1025
    half_width: float = 8.0


@dataclass
class KernelSection:
    family: str = "polynomial_bump"
    normalize_l1: float = 1.0
    blend_epsilon: float = 0.0


@dataclass
class WeightSection:
    family: str = "exponential"
    lam: float = 1.0  # config key: weight.lambda
    q: float = 3.0


@dataclass
class FiringSection:
    family: str = "sigmoid"
    a: float = 1.0
    beta: float = 4.0
    theta: float = 0.5
    slope: float = 2.0


@dataclass
class SimSection:
    dt: float = 1e-3
    t_end: float = 10.0
    integrator: str = "exponential_euler"
    record_every: int = 100
    seed: int = 12345


@dataclass
class AnalysisSection:
    t_transient: float = 20.0
    t_sample: float = 2.0
    n_initial: int = 4
    epsilons: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)


@dataclass
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    space: SpaceSection = field(default_factory=SpaceSection)
    kernel: KernelSection = field(default_factory=KernelSection)
    weight: WeightSection = field(default_factory=WeightSection)
    firing: FiringSection = field(default_factory=FiringSection)
    sim: SimSection = field(default_factory=SimSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    if "." in text or "e" in text.lower():
        raise ValueError("expected an integer")
    return int(text)


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text
    return parse


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


# key -> (section attr, field attr, parser, constraint text, constraint check)
_SCHEMA = {
    "model.h": ("model", "h", _parse_float, "h > 0", lambda v: v > 0),
    "model.p": ("model", "p", _parse_float, "1 < p < inf", lambda v: 1.0 < v < float("inf")),
    "space.dim": ("space", "dim", _parse_int, "dim in {1, 2, 3}", lambda v: v in (1, 2, 3)),
    "space.points": ("space", "points", _parse_int, "points >= 3", lambda v: v >= 3),
    "space.half_width": ("space", "half_width", _parse_float, "half_width >= 2",
                         lambda v: v >= 2.0),
    "kernel.family": ("kernel", "family", _parse_choice("bump", "polynomial_bump"),
                      "known kernel family", lambda v: True),
    "kernel.normalize_l1": ("kernel", "normalize_l1", _parse_float, "normalize_l1 > 0",
                            lambda v: v > 0),
    "kernel.blend_epsilon": ("kernel", "blend_epsilon", _parse_float,
                             "0 <= blend_epsilon <= 1", lambda v: 0.0 <= v <= 1.0),
    "weight.family": ("weight", "family", _parse_choice("exponential", "polynomial"),
                      "known weight family", lambda v: True),
    "weight.lambda": ("weight", "lam", _parse_float, "lambda > 0", lambda v: v > 0),
    "weight.q": ("weight", "q", _parse_float, "q > 0", lambda v: v > 0),
    "firing.family": ("firing", "family", _parse_choice("sigmoid", "ramp"),
                      "known firing family", lambda v: True),
    "firing.a": ("firing", "a", _parse_float, "a > 0", lambda v: v > 0),
    "firing.beta": ("firing", "beta", _parse_float, "beta > 0", lambda v: v > 0),
    "firing.theta": ("firing", "theta", _parse_float, "theta finite", lambda v: True),
    "firing.slope": ("firing", "slope", _parse_float, "slope > 0", lambda v: v > 0),
    "sim.dt": ("sim", "dt", _parse_float, "0 < dt <= 0.1 (stability cap)",
               lambda v: 0.0 < v <= 0.1),
    "sim.t_end": ("sim", "t_end", _parse_float, "t_end >= 0", lambda v: v >= 0),
    "sim.integrator": ("sim", "integrator", _parse_choice("exponential_euler", "rk4"),
                       "known integrator", lambda v: True),
    "sim.record_every": ("sim", "record_every", _parse_int, "record_every >= 1",
                         lambda v: v >= 1),
    "sim.seed": ("sim", "seed", _parse_int, "integer seed", lambda v: True),
    "analysis.t_transient": ("analysis", "t_transient", _parse_float, "t_transient >= 5",
                             lambda v: v >= 5.0),
    "analysis.t_sample": ("analysis", "t_sample", _parse_float, "t_sample > 0",
                          lambda v: v > 0),
    "analysis.n_initial": ("analysis", "n_initial", _parse_int, "n_initial >= 1",
                           lambda v: v >= 1),
    "analysis.epsilons": ("analysis", "epsilons", _parse_float_list,
                          "strictly decreasing, nonnegative",
                          lambda v: len(v) > 0 and all(x >= 0 for x in v)
                          and all(b < a for a, b in zip(v, v[1:]))),
}


def parse_config(text: str) -> RunConfig:
    config = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        section, attr, parser, constraint, check = _SCHEMA[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigError(f"malformed value for {key}: {value!r} ({exc})", lineno) from exc
        if not check(parsed):
            raise ConfigError(f"{key} = {value} violates constraint: {constraint}", lineno)
        setattr(getattr(config, section), attr, parsed)
    _cross_validate(config)
    return config


def _cross_validate(config: RunConfig):
    if config.weight.family == "polynomial" and config.weight.q <= config.space.dim:
        raise ConfigError(
            f"weight.q = {config.weight.q} must exceed space.dim = {config.space.dim} "
            "for an integrable density"
        )
    spacing = 2.0 * config.space.half_width / (config.space.points - 1)
    if spacing > MAX_SPACING + 1e-12:
        raise ConfigError(
            f"grid spacing {spacing:g} exceeds the kernel resolution cap {MAX_SPACING}; "
            "increase space.points or shrink space.half_width"
        )


def format_config(config: RunConfig) -> str:
    """Serialize; parse_config(format_config(c)) == c."""
    lines = []
    for key, (section, attr, parser, _, _) in _SCHEMA.items():
        value = getattr(getattr(config, section), attr)
        if parser is _parse_float_list:
            text = ",".join(repr(x) for x in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def default_config_text() -> str:
    return format_config(RunConfig())


# ---------------------------------------------------------------------------
# Builders: config -> domain objects
# ---------------------------------------------------------------------------

def build_grid(config: RunConfig) -> GridSpec:
    return centered_grid(config.space.dim, config.space.half_width, config.space.points)


def build_weight(config: RunConfig) -> Weight:
    if config.weight.family == "exponential":
        return make_weight("exponential", config.space.dim, rate=config.weight.lam)
    return make_weight("polynomial", config.space.dim, exponent=config.weight.q)


def build_kernel(config: RunConfig, normalize_to: float | None = None) -> Kernel:
    grid = build_grid(config)
    return make_kernel(
        config.kernel.family,
        config.space.dim,
        grid.spacing,
        normalize_to=normalize_to if normalize_to is not None else config.kernel.normalize_l1,
    )


def build_firing(config: RunConfig) -> FiringRate:
    f = config.firing
    if f.family == "sigmoid":
        return sigmoid(a=f.a, beta=f.beta, theta=f.theta)
    return saturating_ramp(a=f.a, slope=f.slope, theta=f.theta)


def build_params(config: RunConfig, engine: str = "fourier") -> ModelParams:
    grid = build_grid(config)
    kernel = build_kernel(config)
    plan = make_plan(kernel, grid, engine)
    return ModelParams(kernel, build_firing(config), config.model.h, plan)


def build_sim_config(config: RunConfig) -> SimConfig:
    s = config.sim
    return SimConfig(dt=s.dt, t_end=s.t_end, integrator=s.integrator,
                     record_every=s.record_every, seed=s.seed)
