"""Time evolution of 1-D barotropic flow along four independent routes.

``material``        (eta, eta_dot) with rho0 frozen:  rho0 eta_tt = -D_X p(rho0 / eta_X)
``euler_poincare``  (v, rho):  v_t = -v v_x - (W + rho W')_x,  rho_t = -(rho v)_x
``lie_poisson``     (m, rho):  localisation of dF/dt = {F, H} for weighted linear F
``flux_form``       (m, rho):  m_t = -(m^2/rho + p)_x,  rho_t = -m_x

All routes share the centred grid derivative and classical RK4, so on smooth
pre-shock data they differ only by O(h^2) product-rule defects.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from semidirect.algebra import Density, Diffeo, invert_diffeo
from semidirect.errors import MonotonicityError, PositivityError, SimulationAbort
from semidirect.grid import Field, Grid, derivative, integrate, interpolate
from semidirect.hamiltonian import ConservativeState, dH_dm, dH_drho, hamiltonian_eval
from semidirect.lagrangian import BarotropicLaw, MaterialState, ReducedState, spatial_density_at_labels

logger = logging.getLogger(__name__)

SOLVERS = ("material", "euler_poincare", "lie_poisson", "flux_form")
INITIAL_CONDITIONS = ("acoustic", "gaussian_bump", "constant")


# -------------------------------------------------------------- right-hand sides


def rhs_euler_poincare(state: ReducedState, law: BarotropicLaw) -> tuple[Field, Field]:
    v, rho = state.v, state.rho.rho
    r = rho.values
    enthalpy = Field(rho.grid, law.energy(r) + r * law.energy_prime(r))
    return -v * derivative(v) - derivative(enthalpy), -derivative(rho * v)


def rhs_lie_poisson(state: ConservativeState, law: BarotropicLaw) -> tuple[Field, Field]:
    m, rho = state.m, state.rho.rho
    u = dH_dm(state)
    dm = -derivative(m * u) - m * derivative(u) - rho * derivative(dH_drho(state, law))
    return dm, -derivative(m)


def rhs_flux_form(state: ConservativeState, law: BarotropicLaw) -> tuple[Field, Field]:
    m, rho = state.m, state.rho.rho
    flux = m * m / rho + rho.map(law.pressure)
    return -derivative(flux), -derivative(m)


def rhs_material(state: MaterialState, law: BarotropicLaw) -> Field:
    """Material acceleration ``-D_X[W'(rho0/eta') rho0^2/eta'^2] / rho0``."""
    rho_s = spatial_density_at_labels(state)
    return -derivative(rho_s.map(law.pressure)) / state.rho0.rho


def _material_rates(state: MaterialState, law: BarotropicLaw):
    return state.eta_dot, rhs_material(state, law), 0.0


# -------------------------------------------------------------- conversions


def material_to_spatial(state: MaterialState) -> tuple[ConservativeState, ReducedState]:
    """Read (rho, u) at the spatial nodes through ``eta^{-1}``."""
    grid = state.grid
    inverse = invert_diffeo(state.eta).eta.values
    rho = Density(Field(grid, interpolate(spatial_density_at_labels(state), inverse)))
    u = Field(grid, interpolate(state.eta_dot, inverse))
    return ConservativeState(rho.rho * u, rho), ReducedState(u, rho)


def to_conservative(state) -> ConservativeState:
    if isinstance(state, ConservativeState):
        return state
    if isinstance(state, ReducedState):
        return ConservativeState(state.rho.rho * state.v, state.rho)
    return material_to_spatial(state)[0]


# -------------------------------------------------------------- integrator


def _combine(ks, weights):
    out = []
    for parts in zip(*ks):
        acc = 0.0
        for w, p in zip(weights, parts):
            acc = acc + w * (p.values if isinstance(p, Field) else p)
        out.append(acc)
    return tuple(out)


def step_rk4(rhs: Callable, state, dt: float, time: float = 0.0):
    """One classical Runge-Kutta step for any state with ``shifted(direction, t)``.

    ``rhs(state)`` returns the rate as a tuple in the order ``shifted`` expects.
    Loss of positivity or monotonicity at any stage aborts the run.
    """
    try:
        k1 = rhs(state)
        k2 = rhs(state.shifted(k1, 0.5 * dt))
        k3 = rhs(state.shifted(k2, 0.5 * dt))
        k4 = rhs(state.shifted(k3, dt))
        return state.shifted(_combine((k1, k2, k3, k4), (1.0, 2.0, 2.0, 1.0)), dt / 6.0)
    except (PositivityError, MonotonicityError) as exc:
        raise SimulationAbort(str(exc), time) from exc


# -------------------------------------------------------------- configuration


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid
    law: BarotropicLaw
    dt: float
    t_end: float
    solver: str = "flux_form"
    ic_name: str = "acoustic"
    ic_params: dict = field(default_factory=dict)
    output_stride: int = 1
    cfl_factor: float = 0.4

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")
        if self.ic_name not in INITIAL_CONDITIONS:
            raise ValueError(f"unknown initial condition {self.ic_name!r}")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ValueError(f"output_stride must be a positive integer, got {self.output_stride}")
        if not 0 < self.cfl_factor <= 1:
            raise ValueError(f"cfl_factor must lie in (0, 1], got {self.cfl_factor}")
        initial_condition(self.grid, self.ic_name, self.ic_params)

    @property
    def n_steps(self) -> int:
        return int(np.floor(self.t_end / self.dt * (1.0 + 1e-12)))

    def replace(self, **changes) -> "SimulationConfig":
        return dataclasses.replace(self, **changes)


_IC_DEFAULTS = {
    "acoustic": {"A": 0.01, "k": 1},
    "gaussian_bump": {"A": 0.01, "sigma": None},
    "constant": {"rho": 1.0, "u": 0.0},
}


def initial_condition(grid: Grid, name: str, params: dict | None = None) -> tuple[Field, Field]:
    """(rho, u) at t = 0 for a named initial condition."""
    if name not in _IC_DEFAULTS:
        raise ValueError(f"unknown initial condition {name!r}")
    params = dict(params or {})
    unknown = set(params) - set(_IC_DEFAULTS[name])
    if unknown:
        raise ValueError(f"unknown parameters for {name!r}: {sorted(unknown)}")
    p = {**_IC_DEFAULTS[name], **params}
    x, L = grid.nodes, grid.length
    if name == "acoustic":
        rho = 1.0 + p["A"] * np.sin(2.0 * np.pi * p["k"] * x / L)
        u = np.zeros_like(x)
    elif name == "gaussian_bump":
        sigma = p["sigma"] if p["sigma"] is not None else L / 10.0
        bump = sum(np.exp(-(((x - L / 2 + j * L) / sigma) ** 2)) for j in range(-3, 4))
        rho = 1.0 + p["A"] * bump
        u = np.zeros_like(x)
    else:
        rho = np.full_like(x, float(p["rho"]))
        u = np.full_like(x, float(p["u"]))
    if np.any(rho <= 0):
        raise ValueError(f"initial density for {name!r} is not positive")
    return Field(grid, rho), Field(grid, u)


def breaking_indicator(rho: Field, u: Field, law: BarotropicLaw, t_end: float) -> float:
    """``t_end * max |d_x (u +- c)|``; characteristics cross near 1."""
    c = rho.map(lambda r: np.sqrt(law.sound_speed_sq(r)))
    return t_end * max(derivative(u + c).max_abs(), derivative(u - c).max_abs())


# -------------------------------------------------------------- simulate


@dataclass
class TrajectoryRecord:
    grid: Grid
    times: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    m: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray

    @property
    def diagnostics(self) -> np.ndarray:
        return np.column_stack([self.mass, self.momentum, self.energy])

    def final(self) -> tuple[np.ndarray, np.ndarray]:
        return self.rho[-1], self.u[-1]


def initial_state(config: SimulationConfig):
    grid = config.grid
    rho, u = initial_condition(grid, config.ic_name, config.ic_params)
    density = Density(rho)
    if config.solver == "material":
        return MaterialState(Diffeo.identity(grid), u, density)
    if config.solver == "euler_poincare":
        return ReducedState(u, density)
    return ConservativeState(rho * u, density)


def rate_function(config: SimulationConfig) -> Callable:
    law = config.law
    return {
        "material": lambda s: _material_rates(s, law),
        "euler_poincare": lambda s: rhs_euler_poincare(s, law),
        "lie_poisson": lambda s: rhs_lie_poisson(s, law),
        "flux_form": lambda s: rhs_flux_form(s, law),
    }[config.solver]


def max_stable_dt(state, config: SimulationConfig) -> float:
    """Largest dt allowed by the CFL condition at the current state."""
    law, h = config.law, config.grid.spacing
    if isinstance(state, MaterialState):
        # waves in the label coordinate travel at c / eta'
        jac = state.eta.jacobian().values
        rho = state.rho0.rho.values / jac
        speed = np.max(np.sqrt(law.sound_speed_sq(rho)) / jac)
    else:
        cons = to_conservative(state)
        rho = cons.rho.rho.values
        speed = np.max(np.abs(cons.velocity.values) + np.sqrt(law.sound_speed_sq(rho)))
    return config.cfl_factor * h / speed if speed > 0 else np.inf


def simulate(config: SimulationConfig) -> TrajectoryRecord:
    """Integrate ``config.solver`` to ``t_end``, recording every ``output_stride`` steps.

    Snapshot count is ``n_steps // output_stride + 1``.

    Raises:
        SimulationAbort: CFL violation, loss of positivity or element inversion.
    """
    rhs = rate_function(config)
    state = initial_state(config)
    snapshots = []

    def record(s, t):
        cons = to_conservative(s)
        rho, m = cons.rho.rho, cons.m
        snapshots.append(
            (t, rho.values, cons.velocity.values, m.values, integrate(rho), integrate(m), hamiltonian_eval(cons, config.law))
        )

    t = 0.0
    record(state, t)
    for step in range(1, config.n_steps + 1):
        limit = max_stable_dt(state, config)
        if config.dt > limit:
            raise SimulationAbort(f"CFL violated: dt = {config.dt:.3g} > {limit:.3g}", t)
        state = step_rk4(rhs, state, config.dt, t)
        t = step * config.dt
        if step % config.output_stride == 0:
            record(state, t)
    logger.debug("%s: %d steps, %d snapshots", config.solver, config.n_steps, len(snapshots))

    cols = list(zip(*snapshots))
    return TrajectoryRecord(
        grid=config.grid,
        times=np.array(cols[0]),
        rho=np.array(cols[1]),
        u=np.array(cols[2]),
        m=np.array(cols[3]),
        mass=np.array(cols[4]),
        momentum=np.array(cols[5]),
        energy=np.array(cols[6]),
    )


def route_distance(a: TrajectoryRecord, b: TrajectoryRecord) -> dict[str, np.ndarray]:
    """Pairwise L-infinity and L2 distances in rho and u at every shared snapshot."""
    if a.rho.shape != b.rho.shape:
        raise ValueError("trajectories have different shapes")
    h = a.grid.spacing
    du, drho = a.u - b.u, a.rho - b.rho
    return {
        "linf_rho": np.max(np.abs(drho), axis=1),
        "l2_rho": np.sqrt(h * np.sum(drho**2, axis=1)),
        "linf_u": np.max(np.abs(du), axis=1),
        "l2_u": np.sqrt(h * np.sum(du**2, axis=1)),
    }
