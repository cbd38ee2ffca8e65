"""Uniform periodic grid on the circle [0, L) and the discrete calculus on it.

Everything downstream (actions, brackets, Lagrangians, solvers) is built from
four primitives defined here:

* :func:`derivative` -- second-order centred difference, exactly skew-adjoint
  under :func:`integrate` (summation by parts holds to rounding).
* :func:`integrate` -- rectangle rule, i.e. the periodic trapezoid rule.
* :func:`interpolate` -- periodic cubic Hermite interpolation with
  fourth-order node slopes, monotonicity-limited for lifted monotone data.
* :func:`random_smooth_field` -- seeded truncated Fourier series used by the
  property checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from semidirect.errors import GridMismatchError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n_points`` nodes ``x_i = i * spacing``."""

    n_points: int
    length: float = 2.0 * np.pi

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 8 or self.n_points % 2:
            raise ValueError(f"n_points must be an even integer >= 8, got {self.n_points}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_points) * self.spacing

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.n_points * factor, self.length)

    def field(self, values) -> "Field":
        """Wrap ``values`` (array, scalar, Field or callable of x) as a Field."""
        if isinstance(values, Field):
            check_same_grid(values, Field(self, np.zeros(self.n_points)))
            return values
        if callable(values):
            values = values(self.nodes)
        return Field(self, np.broadcast_to(np.asarray(values, dtype=float), (self.n_points,)))


@dataclass(frozen=True, eq=False)
class Field:
    """Samples of a periodic real function at the grid nodes.

    Values are stored as a read-only copy. Arithmetic between fields (and with
    scalars) is pointwise and checks that both operands share a grid.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    # make ``ndarray (op) Field`` defer to the reflected Field operators
    __array_ufunc__ = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _other(self, other):
        if isinstance(other, Field):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._other(other))

    def __rtruediv__(self, other):
        return Field(self.grid, self._other(other) / self.values)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __pow__(self, p):
        return Field(self.grid, self.values**p)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        """Apply a pointwise function to the values."""
        return Field(self.grid, fn(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def check_same_grid(*fields) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def derivative(f: Field) -> Field:
    """Centred periodic difference ``(f[i+1] - f[i-1]) / 2h``."""
    v = f.values
    return Field(f.grid, (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * f.grid.spacing))


def lifted_derivative(values: np.ndarray, grid: Grid, lift: float, order: int = 2) -> np.ndarray:
    """Centred difference of lifted data with ``y[i + n] = y[i] + lift``.

    ``order`` selects the 3-point (2) or 5-point (4) stencil.
    """
    if order == 2:
        ext = np.concatenate(([values[-1] - lift], values, [values[0] + lift]))
        return (ext[2:] - ext[:-2]) / (2.0 * grid.spacing)
    if order == 4:
        ext = np.concatenate((values[-2:] - lift, values, values[:2] + lift))
        return (-ext[4:] + 8.0 * ext[3:-1] - 8.0 * ext[1:-3] + ext[:-4]) / (12.0 * grid.spacing)
    raise ValueError(f"order must be 2 or 4, got {order}")


def integrate(f: Field) -> float:
    """Rectangle-rule integral over one period."""
    return float(f.grid.spacing * np.sum(f.values))


def _node_slopes(values: np.ndarray, spacing: float, lift: float) -> np.ndarray:
    # fourth-order centred slopes on the periodically extended (lifted) data
    ext = np.concatenate((values[-2:] - lift, values, values[:2] + lift))
    slopes = (-ext[4:] + 8.0 * ext[3:-1] - 8.0 * ext[1:-3] + ext[:-4]) / (12.0 * spacing)
    secant = (np.append(values[1:], values[0] + lift) - values) / spacing
    if np.all(secant > 0) or np.all(secant < 0):
        # Hyman filter: keeps each cubic piece inside the Fritsch-Carlson box
        sign = np.sign(secant[0])
        bound = 3.0 * np.minimum(np.abs(secant), np.abs(np.roll(secant, 1)))
        slopes = sign * np.clip(sign * slopes, 0.0, bound)
    return slopes


class HermiteInterpolant:
    """Periodic (optionally lifted) cubic Hermite interpolant of node data.

    ``lift`` is the jump per period: ``y(x + L) = y(x) + lift``. Scalar fields
    use ``lift = 0``; circle diffeomorphisms use ``lift = L``. When the
    (lifted) node sequence is strictly monotone the node slopes are limited so
    that the interpolant is monotone as well; otherwise the slopes are the
    unlimited fourth-order estimates, which keeps the local error at O(h^4)
    near extrema of smooth data.
    """

    def __init__(self, values: np.ndarray, grid: Grid, lift: float = 0.0):
        self.grid = grid
        self.lift = float(lift)
        self.values = np.asarray(values, dtype=float)
        self.slopes = _node_slopes(self.values, grid.spacing, self.lift)
        self._right = np.append(self.values[1:], self.values[0] + self.lift)
        self._right_slopes = np.roll(self.slopes, -1)

    def locate(self, points):
        """Split points into (period index k, cell index i, local coordinate t)."""
        g = self.grid
        points = np.asarray(points, dtype=float)
        k = np.floor(points / g.length)
        r = (points - k * g.length) / g.spacing
        # snap rounding noise so grid nodes land exactly on t = 0
        nearest = np.rint(r)
        r = np.where(np.abs(r - nearest) <= 1e-12 * np.maximum(1.0, nearest), nearest, r)
        wrap = r >= g.n_points
        k = np.where(wrap, k + 1, k)
        r = np.where(wrap, r - g.n_points, r)
        i = np.minimum(r.astype(int), g.n_points - 1)
        return k, i, r - i

    def cell(self, i, t):
        """Evaluate the cubic on cell ``i`` at local coordinate ``t`` in [0, 1]."""
        h = self.grid.spacing
        t2 = t * t
        t3 = t2 * t
        # written as left value plus increments so constants are reproduced exactly
        left = self.values[i]
        return (
            left
            + (3 * t2 - 2 * t3) * (self._right[i] - left)
            + (t3 - 2 * t2 + t) * h * self.slopes[i]
            + (t3 - t2) * h * self._right_slopes[i]
        )

    def __call__(self, points) -> np.ndarray:
        k, i, t = self.locate(points)
        return self.cell(i, t) + k * self.lift


def interpolate(f: Field, points) -> np.ndarray:
    """Evaluate the periodic cubic interpolant of ``f`` at arbitrary reals."""
    return HermiteInterpolant(f.values, f.grid)(points)


def random_smooth_field(
    grid: Grid, rng: np.random.Generator, modes: int = 5, scale: float = 1.0
) -> Field:
    """Truncated Fourier series with seeded coefficients, wavenumbers 0..modes."""
    x = grid.nodes * (2.0 * np.pi / grid.length)
    coeffs = rng.standard_normal((modes + 1, 2))
    values = np.full(grid.n_points, coeffs[0, 0] / 2.0)
    for k in range(1, modes + 1):
        values += (coeffs[k, 0] * np.cos(k * x) + coeffs[k, 1] * np.sin(k * x)) / k
    return Field(grid, scale * values)


def random_positive_field(
    grid: Grid, rng: np.random.Generator, modes: int = 5, spread: float = 0.3
) -> Field:
    """Strictly positive smooth field ``exp(spread * s)``, ``s`` a random series scaled into [-1, 1]."""
    s = random_smooth_field(grid, rng, modes)
    s = s.map(lambda v: v / max(1.0, np.max(np.abs(v))))
    return s.map(lambda v: np.exp(spread * v))
