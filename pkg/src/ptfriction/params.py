"""Dimensionless parameter space, physical conversion and sweep expansion."""

import dataclasses
import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from scipy import constants

HBAR = constants.hbar
K_B = constants.k

SWEEP_KINDS = ("lambda-sweep", "eta-sweep-fixed-u0", "eta-sweep-fixed-omega", "temperature-sweep")
FORMALISMS = ("quantum", "classical")


class ConfigError(ValueError):
    """Invalid parameter value or malformed config file."""


@dataclass(frozen=True)
class SeparationModel:
    """Short/long-range corrugation amplitude ``U0(d)`` inputs (SI units)."""

    c_sr: float
    d0: float
    c_lr: float
    sigma_lr: float
    d: float


def interaction_potential(d, model):
    """``C_sr exp(-d/d0) - C_lr d**(-sigma_lr)`` for a separation ``d``.

    ``model`` is any object with ``c_sr, d0, c_lr, sigma_lr`` attributes; its
    own ``d`` is ignored.
    """
    if not d > 0 or not model.d0 > 0:
        raise ConfigError(f"separation and decay length must be positive (d={d}, d0={model.d0})")
    if not model.sigma_lr > 0:
        raise ConfigError(f"sigma_lr must be positive, got {model.sigma_lr}")
    return model.c_sr * math.exp(-d / model.d0) - model.c_lr * d ** (-model.sigma_lr)


@dataclass(frozen=True)
class PhysicalParams:
    mass: float
    lattice_constant: float
    omega: float
    velocity: float
    u0: Optional[float] = None
    separation: Optional[SeparationModel] = None
    alpha: float = 0.01
    temperature: float = 0.0
    omega_c: Optional[float] = None

    def __post_init__(self):
        for name in ("mass", "lattice_constant", "omega", "velocity"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.alpha < 0 or self.temperature < 0:
            raise ConfigError("alpha and temperature must be non-negative")
        if (self.u0 is None) == (self.separation is None):
            raise ConfigError("give exactly one of u0 or separation")
        if self.omega_c is not None and not self.omega_c > 0:
            raise ConfigError("omega_c must be positive")

    @property
    def corrugation(self):
        if self.u0 is not None:
            return self.u0
        return interaction_potential(self.separation.d, self.separation)


@dataclass(frozen=True)
class DimensionlessConfig:
    """One point of the simulation parameter space.

    ``n_steps`` is the quantum RK4 step count per drive period and
    ``n_steps_classical`` the Langevin step count per period.
    """

    eta: float
    lambda_bar: float
    omega_t: float = 100.0
    alpha: float = 0.01
    theta: float = 0.1
    omega_c_ratio: float = 10.0
    n_max: int = 25
    n_steps: int = 20000
    n_ran: int = 200
    n_periods: int = 1
    seed: int = 0
    n_steps_classical: int = 100000
    record_stride: int = 10
    record_stride_classical: int = 100
    lamb_shift: bool = False
    convention: str = "ito"

    def __post_init__(self):
        for name in ("eta", "lambda_bar", "omega_t", "omega_c_ratio"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and positive, got {value}")
        if not (self.theta >= 0 and self.alpha >= 0):
            raise ConfigError("theta and alpha must be non-negative")
        if self.n_max < 2:
            raise ConfigError("n_max must be >= 2")
        if self.n_steps < 100 or self.n_steps_classical < 100:
            raise ConfigError("step counts per period must be >= 100")
        if self.n_ran < 1 or self.n_periods < 1:
            raise ConfigError("n_ran and n_periods must be >= 1")
        if self.record_stride < 1 or self.record_stride_classical < 1:
            raise ConfigError("record strides must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.convention not in ("ito", "stratonovich"):
            raise ConfigError(f"unknown stochastic convention {self.convention!r}")
        u0 = self.u0
        if not (math.isfinite(u0) and u0 > 0):
            raise ConfigError(f"derived u0 = 2 eta lambda_bar^2 = {u0} is not finite and positive")

    @property
    def u0(self):
        """Corrugation amplitude in units of hbar*Omega."""
        return 2.0 * self.eta * self.lambda_bar**2

    def to_dict(self):
        return dataclasses.asdict(self)


def nondimensionalize(p, **overrides):
    """Map SI inputs to a :class:`DimensionlessConfig`.

    Keyword ``overrides`` set the numerical controls (n_max, seeds, ...).
    """
    u0 = p.corrugation
    a, omega = p.lattice_constant, p.omega
    eta = 2.0 * math.pi**2 * u0 / (p.mass * omega**2 * a**2)
    lambda_bar = a / (2.0 * math.pi) * math.sqrt(p.mass * omega / HBAR)
    omega_t = omega * a / p.velocity
    theta = K_B * p.temperature / (HBAR * omega)
    kwargs = dict(eta=eta, lambda_bar=lambda_bar, omega_t=omega_t, alpha=p.alpha, theta=theta)
    if p.omega_c is not None:
        kwargs["omega_c_ratio"] = p.omega_c / omega
    kwargs.update(overrides)
    return DimensionlessConfig(**kwargs)


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    grid: tuple
    base: DimensionlessConfig
    formalisms: tuple = FORMALISMS

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ConfigError(f"unknown sweep kind {self.kind!r}")
        grid = tuple(float(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        bad = set(self.formalisms) - set(FORMALISMS)
        if bad or not self.formalisms:
            raise ConfigError(f"formalisms must be a nonempty subset of {FORMALISMS}")

    @property
    def swept_param(self):
        return {
            "lambda-sweep": "lambda_bar",
            "eta-sweep-fixed-u0": "eta",
            "eta-sweep-fixed-omega": "eta",
            "temperature-sweep": "theta",
        }[self.kind]


@dataclass
class SweepPoint:
    index: int
    value: float
    config: Optional[DimensionlessConfig] = None
    error: Optional[str] = None


def point_config(spec, value):
    """Config for one grid value, with the sweep's coupled parameters recomputed."""
    base = spec.base
    if spec.kind == "lambda-sweep":
        return replace(base, lambda_bar=value)
    if spec.kind == "temperature-sweep":
        return replace(base, theta=value)
    if spec.kind == "eta-sweep-fixed-u0":
        return replace(base, eta=value, lambda_bar=math.sqrt(base.u0 / (2.0 * value)))
    # fixed Omega: U0 ~ 1/a so u0 * lambda_bar is the invariant
    c = base.u0 * base.lambda_bar
    return replace(base, eta=value, lambda_bar=(c / (2.0 * value)) ** (1.0 / 3.0))


def expand_sweep(spec):
    """One :class:`SweepPoint` per grid value; invalid points carry ``error``."""
    points = []
    for i, value in enumerate(spec.grid):
        try:
            points.append(SweepPoint(i, value, config=point_config(spec, value)))
        except (ConfigError, ValueError, ZeroDivisionError) as exc:
            points.append(SweepPoint(i, value, error=str(exc)))
    return points


_CONFIG_FIELDS = {f.name: f for f in fields(DimensionlessConfig)}
_SWEEP_KEYS = ("kind", "grid", "formalisms")


def _coerce(name, raw):
    kind = _CONFIG_FIELDS[name].type
    try:
        if kind in ("int", int):
            return int(raw, 0) if isinstance(raw, str) else int(raw)
        if kind in ("bool", bool):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind in ("str", str):
            return raw.strip()
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config_text(text):
    """Parse flat ``key = value`` text into a dict of raw strings."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_FIELDS and key not in _SWEEP_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def config_from_mapping(raw, **overrides):
    kwargs = {k: _coerce(k, v) for k, v in raw.items() if k in _CONFIG_FIELDS}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    missing = {"eta", "lambda_bar"} - kwargs.keys()
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    return DimensionlessConfig(**kwargs)


def load_config(path, **overrides):
    with open(path) as fh:
        raw = parse_config_text(fh.read())
    return config_from_mapping(raw, **overrides)


def load_sweep(path, **overrides):
    with open(path) as fh:
        raw = parse_config_text(fh.read())
    if "kind" not in raw or "grid" not in raw:
        raise ConfigError("sweep config needs 'kind' and 'grid'")
    try:
        grid = tuple(float(g) for g in raw["grid"].replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad grid: {raw['grid']!r}") from exc
    formalisms = tuple(raw.get("formalisms", "quantum,classical").replace(",", " ").split())
    base = config_from_mapping(raw, **overrides)
    return SweepSpec(raw["kind"], grid, base, formalisms)

