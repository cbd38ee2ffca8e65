r"""Semidirect-product geometry of ``Diff(S^1) x Den(S^1)`` on grid fields.

Conventions (1-D, flat metric, so one-forms and vector fields share
coefficients):

=========================  ==============================================
action of G on V            :math:`\gamma f = f\circ\eta`
action of G on V*           :math:`\gamma(\rho\,dx) = (\rho\circ\eta)\,\eta'\,dx`
algebra bracket             :math:`[\xi,\zeta]_g = -(\xi\zeta' - \zeta\xi')`
Ad                          :math:`(\eta'\xi)\circ\eta^{-1}`
Ad*                         pullback of both factors of :math:`a\,dx\otimes\rho\,dx`
ad*                         :math:`(\mathcal{L}_\xi a + a\,\mathrm{div}_\rho\xi)\otimes\rho`
diamond                     :math:`f \diamond \rho = df \otimes \rho`
=========================  ==============================================

Identities that avoid the product rule (diamond adjointness, Lie-derivative
duality) hold to rounding on the grid; those that need it (ad/ad* duality,
Jacobi) hold at O(h^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from semidirect.errors import InversionError, MonotonicityError, PositivityError
from semidirect.grid import (
    Field,
    Grid,
    HermiteInterpolant,
    check_same_grid,
    derivative,
    integrate,
    interpolate,
    lifted_derivative,
)


@dataclass(frozen=True, eq=False)
class Density:
    """Volume form ``rho dx`` with ``rho > 0``."""

    rho: Field

    def __post_init__(self):
        if not np.all(self.rho.values > 0):
            raise PositivityError("density coefficient must be strictly positive")

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    def __add__(self, other: "Density") -> "Density":
        return Density(self.rho + other.rho)


@dataclass(frozen=True, eq=False)
class OneFormDensity:
    """One-form density ``a dx (x) rho dx``, stored as the split pair."""

    a: Field
    rho: Field

    def __post_init__(self):
        check_same_grid(self.a, self.rho)
        if not np.all(self.rho.values > 0):
            raise PositivityError("density coefficient must be strictly positive")

    @property
    def grid(self) -> Grid:
        return self.a.grid

    @property
    def density(self) -> Density:
        return Density(self.rho)


@dataclass(frozen=True, eq=False)
class Diffeo:
    """Orientation-preserving circle map, lifted so ``eta(x + L) = eta(x) + L``.

    ``eta.values[i]`` is the image of node ``x_i``. Values are never wrapped
    back into [0, L); only interpolation lookups reduce modulo the period.
    """

    eta: Field

    def __post_init__(self):
        v = self.eta.values
        L = self.eta.grid.length
        if not (np.all(np.diff(v) > 0) and v[0] + L > v[-1]):
            raise MonotonicityError("diffeomorphism values must be strictly increasing")

    @classmethod
    def identity(cls, grid: Grid) -> "Diffeo":
        return cls(grid.field(grid.nodes))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Diffeo":
        return cls(grid.field(fn))

    @property
    def grid(self) -> Grid:
        return self.eta.grid

    def interpolant(self) -> HermiteInterpolant:
        return HermiteInterpolant(self.eta.values, self.grid, lift=self.grid.length)

    def __call__(self, points) -> np.ndarray:
        return self.interpolant()(points)

    def jacobian(self) -> Field:
        """``eta'`` by the five-point centred difference of the lifted values.

        Fourth order, matching the interpolation error, so pulled-back
        densities keep their mass to ~1e-9 rather than O(h^2).
        """
        # differentiate the periodic displacement eta - x so the identity maps to exactly 1
        displacement = self.eta.values - self.grid.nodes
        return Field(self.grid, 1.0 + lifted_derivative(displacement, self.grid, 0.0, order=4))


@dataclass(frozen=True, eq=False)
class SemidirectElement:
    gamma: Diffeo
    omega: Density


# ---------------------------------------------------------------- pairings


def pair_v(mu: Density, f: Field) -> float:
    """<mu, f> = int f rho dx."""
    check_same_grid(mu.rho, f)
    return integrate(f * mu.rho)


def pair_g(md: OneFormDensity, xi: Field) -> float:
    """<a dx (x) rho dx, xi> = int a xi rho dx."""
    check_same_grid(md.a, xi)
    return integrate(md.a * xi * md.rho)


# ------------------------------------------------------------ group level


def compose(g1: Diffeo, g2: Diffeo) -> Diffeo:
    """Group product ``g1 . g2 = eta1 o eta2``."""
    check_same_grid(g1.eta, g2.eta)
    return Diffeo(Field(g1.grid, g1(g2.eta.values)))


def invert_diffeo(g: Diffeo, tol: float = 1e-12, max_iter: int = 200) -> Diffeo:
    """Sample ``eta^{-1}`` at the nodes by bisection on the monotone interpolant.

    Raises:
        InversionError: if the residual ``|eta(eta^{-1}(x)) - x|`` stays above
            ``tol`` (only possible if the interpolant is not monotone).
    """
    grid = g.grid
    L, h = grid.length, grid.spacing
    interp = g.interpolant()
    eta = g.eta.values
    targets = grid.nodes
    # bring targets into [eta_0, eta_0 + L) where node values bracket them
    shift = np.floor((targets - eta[0]) / L)
    y = targets - shift * L
    knots = np.append(eta, eta[0] + L)
    cell = np.clip(np.searchsorted(knots, y, side="right") - 1, 0, grid.n_points - 1)
    lo = np.zeros_like(y)
    hi = np.ones_like(y)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = interp.cell(cell, mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) * h < 1e-3 * tol:
            break
    t = 0.5 * (lo + hi)
    x = (cell + t) * h + shift * L
    residual = np.max(np.abs(interp(x) - targets))
    if residual > tol:
        raise InversionError(f"bisection residual {residual:.3e} exceeds {tol:.1e}")
    return Diffeo(Field(grid, x))


def pullback_scalar(g: Diffeo, f: Field) -> Field:
    """Right action on functions: ``f o eta``."""
    check_same_grid(g.eta, f)
    return Field(f.grid, interpolate(f, g.eta.values))


def pullback_density(g: Diffeo, mu: Density) -> Density:
    """Right action on densities: ``(rho o eta) eta'``."""
    check_same_grid(g.eta, mu.rho)
    jac = g.jacobian()
    if not np.all(jac.values > 0):
        raise MonotonicityError("diffeomorphism Jacobian is not positive")
    return Density(pullback_scalar(g, mu.rho) * jac)


def pushforward_vector(g: Diffeo, xi: Field) -> Field:
    """Ad: ``g_* xi = (eta' xi) o eta^{-1}``."""
    check_same_grid(g.eta, xi)
    inverse = invert_diffeo(g)
    return Field(xi.grid, interpolate(g.jacobian() * xi, inverse.eta.values))


def ad_star_group(g: Diffeo, md: OneFormDensity) -> OneFormDensity:
    """Ad*: pull back both the one-form and the density factor."""
    check_same_grid(g.eta, md.a)
    jac = g.jacobian()
    return OneFormDensity(pullback_scalar(g, md.a) * jac, pullback_density(g, md.density).rho)


def semidirect_product(e1: SemidirectElement, e2: SemidirectElement) -> SemidirectElement:
    """(g1, w1)(g2, w2) = (g1 . g2, w2 + g2 w1)."""
    return SemidirectElement(
        compose(e1.gamma, e2.gamma),
        e2.omega + pullback_density(e2.gamma, e1.omega),
    )


# ---------------------------------------------------------- algebra level


def lie_derivative_scalar(xi: Field, f: Field) -> Field:
    """Algebra action on functions: ``xi f'``."""
    return xi * derivative(f)


def lie_derivative_density(xi: Field, mu: Density) -> Field:
    """Coefficient of the Lie derivative of ``rho dx``: ``(xi rho)'``."""
    return derivative(xi * mu.rho)


def jacobi_lie_bracket(xi: Field, eta: Field) -> Field:
    """Vector-field commutator ``xi eta' - eta xi'``."""
    return xi * derivative(eta) - eta * derivative(xi)


def algebra_bracket(xi: Field, eta: Field) -> Field:
    """Bracket on the algebra of Diff: minus the Jacobi-Lie bracket. Also ad_xi eta."""
    return -jacobi_lie_bracket(xi, eta)


ad = algebra_bracket


def div_mu(xi: Field, mu: Density) -> Field:
    """Divergence with respect to ``rho dx``: ``(xi rho)' / rho``."""
    return derivative(xi * mu.rho) / mu.rho


def ad_star(xi: Field, md: OneFormDensity) -> OneFormDensity:
    """ad*_xi (a dx (x) mu) = (xi a' + a xi' + a div_mu xi) dx (x) mu."""
    check_same_grid(xi, md.a)
    a = md.a
    coeff = xi * derivative(a) + a * derivative(xi) + a * div_mu(xi, md.density)
    return OneFormDensity(coeff, md.rho)


def diamond(f: Field, mu: Density) -> OneFormDensity:
    """f <> mu = df (x) mu."""
    check_same_grid(f, mu.rho)
    return OneFormDensity(derivative(f), mu.rho)


def flat(v: Field) -> Field:
    """Index lowering for the flat metric on the circle (identity on coefficients)."""
    return v


sharp = flat
