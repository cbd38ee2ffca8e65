"""Lie-Poisson structure of 1-D barotropic flow in the variables (m, rho).

The Hamiltonian is

    H(m, rho) = 1/2 int m^2 / rho dx + int rho W(rho) dx

and the semidirect-product bracket, written with the grid derivative ``D``,

    {F, G} = int m (G_m D F_m - F_m D G_m) dx + int rho (G_m D F_rho - F_m D G_rho) dx.

Functionals carry their own variational derivatives; brackets of brackets
get theirs by nodal finite differences (:func:`bracket_functional`), which
is what :func:`jacobiator` uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from semidirect.algebra import Density
from semidirect.grid import Field, Grid, check_same_grid, derivative, integrate
from semidirect.lagrangian import BarotropicLaw, _shift_field, functional_fd


@dataclass(frozen=True, eq=False)
class ConservativeState:
    """Momentum density ``m = rho u`` and density ``rho dx``."""

    m: Field
    rho: Density

    def __post_init__(self):
        check_same_grid(self.m, self.rho.rho)

    @property
    def grid(self) -> Grid:
        return self.m.grid

    @property
    def velocity(self) -> Field:
        return self.m / self.rho.rho

    @classmethod
    def from_velocity(cls, u: Field, rho: Density) -> "ConservativeState":
        return cls(rho.rho * u, rho)

    def shifted(self, direction: Sequence, t: float) -> "ConservativeState":
        d_m, d_rho = direction
        return ConservativeState(_shift_field(self.m, d_m, t), Density(_shift_field(self.rho.rho, d_rho, t)))


@dataclass(frozen=True)
class Functional:
    """A named functional of (m, rho) with its two variational derivatives."""

    name: str
    evaluate: Callable[[ConservativeState], float]
    dF_dm: Callable[[ConservativeState], Field]
    dF_drho: Callable[[ConservativeState], Field]

    def __call__(self, state: ConservativeState) -> float:
        return self.evaluate(state)

    def scaled(self, c: float) -> "Functional":
        return Functional(
            f"{c:g}*{self.name}",
            lambda s: c * self.evaluate(s),
            lambda s: c * self.dF_dm(s),
            lambda s: c * self.dF_drho(s),
        )

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(
            f"({self.name}+{other.name})",
            lambda s: self.evaluate(s) + other.evaluate(s),
            lambda s: self.dF_dm(s) + other.dF_dm(s),
            lambda s: self.dF_drho(s) + other.dF_drho(s),
        )


# ------------------------------------------------------------ Hamiltonian


def hamiltonian_eval(state: ConservativeState, law: BarotropicLaw) -> float:
    rho = state.rho.rho
    return 0.5 * integrate(state.m * state.m / rho) + integrate(rho * rho.map(law.energy))


def dH_dm(state: ConservativeState) -> Field:
    """delta H / delta m = m / rho (the velocity)."""
    return state.m / state.rho.rho


def dH_drho(state: ConservativeState, law: BarotropicLaw) -> Field:
    """delta H / delta rho = -u^2/2 + W + rho W'."""
    rho = state.rho.rho.values
    u = dH_dm(state)
    return -0.5 * u * u + (law.energy(rho) + rho * law.energy_prime(rho))


def hamiltonian_functional(law: BarotropicLaw) -> Functional:
    return Functional(
        "H",
        lambda s: hamiltonian_eval(s, law),
        dH_dm,
        lambda s: dH_drho(s, law),
    )


def weighted_linear_functional(which: str, w: Field) -> Functional:
    """``int m w dx`` (which='momentum') or ``int rho w dx`` (which='density')."""
    zero = w * 0.0
    if which == "momentum":
        return Functional("int m w", lambda s: integrate(s.m * w), lambda s: w, lambda s: zero)
    if which == "density":
        return Functional("int rho w", lambda s: integrate(s.rho.rho * w), lambda s: zero, lambda s: w)
    raise ValueError(f"which must be 'momentum' or 'density', got {which!r}")


def total_mass(grid: Grid) -> Functional:
    return weighted_linear_functional("density", grid.field(1.0))


def total_momentum(grid: Grid) -> Functional:
    return weighted_linear_functional("momentum", grid.field(1.0))


# ---------------------------------------------------------------- bracket


def lie_poisson_bracket(F: Functional, G: Functional, state: ConservativeState) -> float:
    Fm, Fr = F.dF_dm(state), F.dF_drho(state)
    Gm, Gr = G.dF_dm(state), G.dF_drho(state)
    m, rho = state.m, state.rho.rho
    return integrate(m * (Gm * derivative(Fm) - Fm * derivative(Gm))) + integrate(
        rho * (Gm * derivative(Fr) - Fm * derivative(Gr))
    )


def evolution_rate(F: Functional, state: ConservativeState, law: BarotropicLaw) -> float:
    """dF/dt = {F, H}."""
    return lie_poisson_bracket(F, hamiltonian_functional(law), state)


def variational_derivative_fd(
    evaluate: Callable[[ConservativeState], float],
    state: ConservativeState,
    which: str,
    step: float = 1e-5,
) -> Field:
    """Nodal finite-difference variational derivative of a functional.

    On the grid ``<dF/dm, dm> = h sum dF/dm_i dm_i``, so the derivative at
    node i is the partial derivative in ``m_i`` divided by the spacing.
    """
    grid = state.grid
    n, h = grid.n_points, grid.spacing
    zero = np.zeros(n)
    out = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        direction = (e, zero) if which == "m" else (zero, e)
        out[i] = functional_fd(evaluate, state, direction, step) / h
    return Field(grid, out)


def bracket_functional(F: Functional, G: Functional, step: float = 1e-5) -> Functional:
    """{F, G} as a Functional; its derivatives come from nodal finite differences."""

    def evaluate(s):
        return lie_poisson_bracket(F, G, s)

    return Functional(
        f"{{{F.name},{G.name}}}",
        evaluate,
        lambda s: variational_derivative_fd(evaluate, s, "m", step),
        lambda s: variational_derivative_fd(evaluate, s, "rho", step),
    )


def jacobiator(
    F: Functional, G: Functional, K: Functional, state: ConservativeState, step: float = 1e-5
) -> float:
    """{{F,G},K} + {{G,K},F} + {{K,F},G}; zero for a Poisson bracket."""
    total = 0.0
    for A, B, C in ((F, G, K), (G, K, F), (K, F, G)):
        total += lie_poisson_bracket(bracket_functional(A, B, step), C, state)
    return total


def validate_functional(
    F: Functional,
    state: ConservativeState,
    directions: Sequence[tuple[Field, Field]],
    step: float = 1e-5,
) -> float:
    """Largest relative mismatch between F's derivatives and the FD oracle."""
    worst = 0.0
    dm, dr = F.dF_dm(state), F.dF_drho(state)
    for d_m, d_rho in directions:
        analytic = integrate(dm * d_m) + integrate(dr * d_rho)
        fd = functional_fd(F.evaluate, state, (d_m, d_rho), step)
        scale = max(abs(analytic), abs(fd), 1e-300)
        worst = max(worst, abs(fd - analytic) / scale)
    return worst
