"""Barotropic stored energy, reduced/unreduced Lagrangians and their derivatives.

The Lagrangian is kinetic minus potential energy,

    L(eta_dot, mu0) = int [ 1/2 eta_dot^2 - W(rho0 / eta') ] rho0 dX      (material)
    l(v, mu)        = int [ 1/2 v^2 - W(rho) ] rho dx                     (spatial)

with ``rho0 / eta'`` the spatial density read back at the material label.
:func:`functional_fd` is the independent oracle every analytic variational
derivative in the package is checked against.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from semidirect.algebra import (
    Density,
    Diffeo,
    OneFormDensity,
    compose,
    invert_diffeo,
    pullback_density,
    pullback_scalar,
)
from semidirect.errors import FiniteDifferenceError, MonotonicityError, PositivityError
from semidirect.grid import Field, Grid, derivative, integrate, interpolate


def _positive(rho):
    r = np.asarray(rho, dtype=float)
    if np.any(r <= 0):
        raise PositivityError("density must be strictly positive")
    return r


class BarotropicLaw(ABC):
    """Stored energy per unit mass ``W(rho)``; pressure is ``rho^2 W'(rho)``."""

    @abstractmethod
    def energy(self, rho): ...

    @abstractmethod
    def energy_prime(self, rho): ...

    @abstractmethod
    def energy_second(self, rho): ...

    def pressure(self, rho):
        r = _positive(rho)
        return r * r * self.energy_prime(r)

    def sound_speed_sq(self, rho):
        """dp/drho = 2 rho W' + rho^2 W''."""
        r = _positive(rho)
        return 2.0 * r * self.energy_prime(r) + r * r * self.energy_second(r)


@dataclass(frozen=True)
class PolytropicLaw(BarotropicLaw):
    """``W = kappa rho^(gamma-1) / (gamma-1)``, i.e. ``p = kappa rho^gamma``."""

    kappa: float = 1.0
    gamma: float = 1.4

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")

    def energy(self, rho):
        r = _positive(rho)
        return self.kappa * r ** (self.gamma - 1.0) / (self.gamma - 1.0)

    def energy_prime(self, rho):
        r = _positive(rho)
        return self.kappa * r ** (self.gamma - 2.0)

    def energy_second(self, rho):
        r = _positive(rho)
        return self.kappa * (self.gamma - 2.0) * r ** (self.gamma - 3.0)


def energy(law: BarotropicLaw, rho):
    return law.energy(rho)


def energy_prime(law: BarotropicLaw, rho):
    return law.energy_prime(rho)


def pressure(law: BarotropicLaw, rho):
    return law.pressure(rho)


# ------------------------------------------------------------------ states


def _shift_field(f: Field, d, t: float) -> Field:
    return f + t * (d.values if isinstance(d, Field) else np.asarray(d, dtype=float))


@dataclass(frozen=True, eq=False)
class MaterialState:
    """Configuration ``eta``, material velocity ``eta_dot`` and reference density."""

    eta: Diffeo
    eta_dot: Field
    rho0: Density

    @property
    def grid(self) -> Grid:
        return self.eta.grid

    def shifted(self, direction: Sequence, t: float) -> "MaterialState":
        d_eta, d_eta_dot, d_rho0 = direction
        return MaterialState(
            Diffeo(_shift_field(self.eta.eta, d_eta, t)),
            _shift_field(self.eta_dot, d_eta_dot, t),
            Density(_shift_field(self.rho0.rho, d_rho0, t)),
        )


@dataclass(frozen=True, eq=False)
class ReducedState:
    """Eulerian velocity ``v`` and advected density ``rho dx``."""

    v: Field
    rho: Density

    @property
    def grid(self) -> Grid:
        return self.v.grid

    def shifted(self, direction: Sequence, t: float) -> "ReducedState":
        d_v, d_rho = direction
        return ReducedState(_shift_field(self.v, d_v, t), Density(_shift_field(self.rho.rho, d_rho, t)))


# ------------------------------------------------------------- Lagrangians


def spatial_density_at_labels(state: MaterialState) -> Field:
    """``rho0 / eta'``: spatial density evaluated at the material points."""
    jac = state.eta.jacobian()
    if not np.all(jac.values > 0):
        raise MonotonicityError("eta' <= 0: element inversion")
    return state.rho0.rho / jac


def reduced_lagrangian(state: ReducedState, law: BarotropicLaw) -> float:
    v, rho = state.v, state.rho.rho
    return integrate((0.5 * v * v - rho.map(law.energy)) * rho)


def unreduced_lagrangian(state: MaterialState, law: BarotropicLaw) -> float:
    rho_s = spatial_density_at_labels(state)
    return integrate((0.5 * state.eta_dot**2 - rho_s.map(law.energy)) * state.rho0.rho)


def dl_dv(state: ReducedState) -> OneFormDensity:
    """delta l / delta v = v-flat (x) mu."""
    return OneFormDensity(state.v, state.rho.rho)


def dl_dmu(state: ReducedState, law: BarotropicLaw) -> Field:
    """delta l / delta mu = v^2/2 - W(rho) - W'(rho) rho."""
    v, rho = state.v, state.rho.rho.values
    return 0.5 * v * v - (law.energy(rho) + law.energy_prime(rho) * rho)


def potential_hessian_form(law: BarotropicLaw, rho: Density, rho1: Field, rho2: Field) -> float:
    """Bilinear form <DW(mu).mu1, mu2> = int W'(rho) rho1 rho2 dx."""
    return integrate(rho.rho.map(law.energy_prime) * rho1 * rho2)


def lift_to_material(diffeo: Diffeo, state: ReducedState) -> MaterialState:
    """(v, mu) -> (v o eta, eta^* mu) on the configuration ``eta``."""
    return MaterialState(diffeo, pullback_scalar(diffeo, state.v), pullback_density(diffeo, state.rho))


def act_on_material(gamma: Diffeo, state: MaterialState) -> MaterialState:
    """Right action of ``gamma`` on (eta, eta_dot, mu0): compose and pull back."""
    return MaterialState(
        compose(state.eta, gamma),
        pullback_scalar(gamma, state.eta_dot),
        pullback_density(gamma, state.rho0),
    )


# ---------------------------------------------------------- the FD oracle


def _shift(state, direction, t):
    if hasattr(state, "shifted"):
        return state.shifted(direction, t)
    return state + t * direction


def functional_fd(functional: Callable, state, direction, step: float = 1e-5) -> float:
    """Central difference ``(F(s + step d) - F(s - step d)) / (2 step)``.

    ``state`` is anything with a ``shifted(direction, t)`` method (the state
    dataclasses) or supporting ``+`` and scalar ``*`` (arrays, fields).
    """
    if not (np.isfinite(step) and step > 0):
        raise FiniteDifferenceError(f"step must be positive, got {step}")
    if step < 1e-14:
        raise FiniteDifferenceError(f"step {step:.1e} underflows the difference quotient")
    f_plus = functional(_shift(state, direction, step))
    f_minus = functional(_shift(state, direction, -step))
    return (f_plus - f_minus) / (2.0 * step)


@dataclass(frozen=True)
class FDComparison:
    analytic: float
    fd: float
    fd_coarse: float
    relative_error: float
    step_discrepancy: float


def compare_with_fd(
    functional: Callable,
    state,
    direction,
    analytic: float,
    steps: tuple[float, float] = (1e-4, 1e-5),
) -> FDComparison:
    """Check an analytic directional derivative against the FD oracle at two steps.

    The relative error uses the finer step; the discrepancy between the two
    steps is reported so a truncation- or rounding-dominated estimate shows.
    """
    coarse = functional_fd(functional, state, direction, steps[0])
    fine = functional_fd(functional, state, direction, steps[1])
    scale = max(abs(analytic), abs(fine), 1e-300)
    return FDComparison(
        analytic=analytic,
        fd=fine,
        fd_coarse=coarse,
        relative_error=abs(fine - analytic) / scale,
        step_discrepancy=abs(fine - coarse) / scale,
    )


# ------------------------------------------------- constrained variations


@dataclass(frozen=True)
class ConstraintReport:
    velocity_residual: float
    density_residual: float


def variation_constraint_check(
    family: Callable[[np.ndarray, float, float], np.ndarray],
    grid: Grid,
    t0: float,
    eps0: float = 0.0,
    rho0=1.0,
    dt: float = 1e-4,
    deps: float = 1e-4,
) -> ConstraintReport:
    """Residuals of the reduced-variation constraints for a family ``eta(X; t, eps)``.

    Computes ``du`` by differencing ``u^eps = eta_dot^eps o (eta^eps)^{-1}`` in
    eps, builds ``w = d_eps eta o eta^{-1}`` and returns the sup-norms of

        du - (dw/dt + u w' - w u')          and          d rho + (rho w)'

    where ``rho = (rho0 / eta') o eta^{-1}``.
    """
    X = grid.nodes
    rho0_field = grid.field(rho0)

    def configuration(t, eps):
        return Diffeo(grid.field(family(X, t, eps)))

    def eta_dot(t, eps):
        return grid.field((family(X, t + dt, eps) - family(X, t - dt, eps)) / (2.0 * dt))

    def spatial(t, eps):
        eta = configuration(t, eps)
        inv = invert_diffeo(eta).eta.values
        u = interpolate(eta_dot(t, eps), inv)
        rho = interpolate(rho0_field / eta.jacobian(), inv)
        return grid.field(u), grid.field(rho)

    def w_at(t):
        d_eta = grid.field((family(X, t, eps0 + deps) - family(X, t, eps0 - deps)) / (2.0 * deps))
        inv = invert_diffeo(configuration(t, eps0)).eta.values
        return grid.field(interpolate(d_eta, inv))

    u, rho = spatial(t0, eps0)
    u_plus, rho_plus = spatial(t0, eps0 + deps)
    u_minus, rho_minus = spatial(t0, eps0 - deps)
    du = (u_plus - u_minus) / (2.0 * deps)
    drho = (rho_plus - rho_minus) / (2.0 * deps)

    w = w_at(t0)
    w_dot = (w_at(t0 + dt) - w_at(t0 - dt)) / (2.0 * dt)
    bracket = u * derivative(w) - w * derivative(u)

    return ConstraintReport(
        velocity_residual=(du - (w_dot + bracket)).max_abs(),
        density_residual=(drho + derivative(rho * w)).max_abs(),
    )
