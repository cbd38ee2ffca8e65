"""Verification suites behind ``semidirect verify``.

Each suite returns a :class:`VerificationReport`: a list of named checks
(measured value, threshold, pass/fail) and, for suites that refine the grid,
a convergence table. Random test data are seeded truncated Fourier series
(wavenumbers <= 5), so reports are reproducible from the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from semidirect import algebra as alg
from semidirect.algebra import Density, Diffeo, OneFormDensity
from semidirect.dynamics import SimulationConfig, route_distance, simulate
from semidirect.grid import Field, Grid, integrate, random_positive_field, random_smooth_field
from semidirect.hamiltonian import (
    ConservativeState,
    dH_dm,
    dH_drho,
    evolution_rate,
    hamiltonian_functional,
    jacobiator,
    lie_poisson_bracket,
    total_mass,
    total_momentum,
    weighted_linear_functional,
)
from semidirect.lagrangian import (
    BarotropicLaw,
    MaterialState,
    PolytropicLaw,
    ReducedState,
    act_on_material,
    compare_with_fd,
    dl_dmu,
    dl_dv,
    lift_to_material,
    potential_hessian_form,
    reduced_lagrangian,
    unreduced_lagrangian,
    variation_constraint_check,
)

SUITES = ("algebra", "duality", "lagrangian", "bracket", "convergence", "constraints")
DEFAULT_GRIDS = {"constraints": (512,), "bracket": (64, 128)}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, threshold: float) -> "Check":
        return cls(name, float(value), float(threshold), bool(value <= threshold))

    @classmethod
    def within(cls, name: str, value: float, lo: float, hi: float) -> "Check":
        # threshold records the half-width around the centre of [lo, hi]
        return cls(f"{name} in [{lo:g}, {hi:g}]", float(value), (hi - lo) / 2, bool(lo <= value <= hi))

    def to_dict(self) -> dict:
        def num(v):
            return v if math.isfinite(v) else None

        return {"name": self.name, "value": num(self.value), "threshold": num(self.threshold), "passed": self.passed}


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: list[Check] = field(default_factory=list)
    table: list[dict] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "checks": [c.to_dict() for c in self.checks]}
        if self.table is not None:
            out["table"] = self.table
        return out

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}  (seed {self.seed})"]
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{flag}] {c.name}: {c.value:.3e} (threshold {c.threshold:.3e})")
        if self.table:
            lines.append("  convergence:")
            lines.append(f"    {'quantity':<42}{'n':>6}{'h':>12}{'error':>12}{'order':>8}")
            for row in self.table:
                order = "" if row["order"] is None else f"{row['order']:.2f}"
                lines.append(
                    f"    {row['quantity']:<42}{row['n']:>6}{row['h']:>12.4e}{row['error']:>12.3e}{order:>8}"
                )
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def observed_orders(hs: Sequence[float], errors: Sequence[float]) -> list[float | None]:
    """Pairwise orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}); ``None`` for the first level."""
    out: list[float | None] = [None]
    for i in range(1, len(hs)):
        out.append(math.log(errors[i - 1] / errors[i]) / math.log(hs[i - 1] / hs[i]))
    return out


def fitted_order(hs: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def _convergence(report: VerificationReport, quantity: str, grids: Sequence[int], errors: Sequence[float],
                 lo: float = 1.8, hi: float = 2.2):
    hs = [2.0 * np.pi / n for n in grids]
    with_order = len(grids) >= 3
    orders = observed_orders(hs, errors) if with_order else [None] * len(grids)
    report.table = report.table or []
    for n, h, e, o in zip(grids, hs, errors, orders):
        report.table.append({"quantity": quantity, "n": n, "h": h, "error": float(e), "order": o})
    if with_order:
        report.checks.append(Check.within(f"{quantity} observed order", fitted_order(hs, errors), lo, hi))


# ---------------------------------------------------------------- test data


def random_diffeo(grid: Grid, rng: np.random.Generator, amplitude: float = 0.05) -> Diffeo:
    """``x + amplitude * s(x)`` with ``s`` a random series scaled to sup-slope 1."""
    s = random_smooth_field(grid, rng, modes=3)
    slope = np.max(np.abs(alg.derivative(s).values))
    return Diffeo(grid.field(grid.nodes) + (amplitude / slope) * s)


def _fields(grid, seed, count):
    rng = np.random.default_rng(seed)
    return [random_smooth_field(grid, rng) for _ in range(count)]


def ad_duality_error(grid: Grid, seed: int) -> float:
    xi, eta, a = _fields(grid, seed, 3)
    rho = random_positive_field(grid, np.random.default_rng(seed + 1))
    md = OneFormDensity(a, rho)
    return abs(alg.pair_g(alg.ad_star(xi, md), eta) - alg.pair_g(md, alg.algebra_bracket(xi, eta)))


def jacobi_cyclic_error(grid: Grid, seed: int) -> float:
    a, b, c = _fields(grid, seed, 3)
    B = alg.jacobi_lie_bracket
    return (B(B(a, b), c) + B(B(b, c), a) + B(B(c, a), b)).max_abs()


def exact_duality_errors(grid: Grid, seed: int) -> tuple[float, float]:
    """(diamond adjointness, scalar/density Lie-derivative duality)."""
    f, xi = _fields(grid, seed, 2)
    mu = Density(random_positive_field(grid, np.random.default_rng(seed + 1)))
    diamond = abs(alg.pair_g(alg.diamond(f, mu), xi) - alg.pair_v(mu, alg.lie_derivative_scalar(xi, f)))
    lie = abs(alg.pair_v(mu, alg.lie_derivative_scalar(xi, f)) + integrate(f * alg.lie_derivative_density(xi, mu)))
    return diamond, lie


# ------------------------------------------------------------------- suites


def suite_algebra(grids: Sequence[int], seed: int) -> VerificationReport:
    report = VerificationReport("algebra", seed)
    grid = Grid(max(grids))
    rng = np.random.default_rng(seed)
    worst_anti = worst_self = worst_bilinear = 0.0
    for _ in range(20):
        xi, eta = random_smooth_field(grid, rng), random_smooth_field(grid, rng)
        worst_anti = max(worst_anti, (alg.algebra_bracket(xi, eta) + alg.algebra_bracket(eta, xi)).max_abs())
        worst_self = max(worst_self, alg.ad(xi, xi).max_abs())
        worst_bilinear = max(
            worst_bilinear, (alg.algebra_bracket(2.0 * xi, eta) - 2.0 * alg.algebra_bracket(xi, eta)).max_abs()
        )
    report.checks += [
        Check.at_most("bracket antisymmetry (exact)", worst_anti, 0.0),
        Check.at_most("ad_xi xi = 0 (exact)", worst_self, 0.0),
        Check.at_most("bracket bilinearity (exact)", worst_bilinear, 0.0),
    ]
    diamond, lie = exact_duality_errors(grid, seed)
    report.checks += [
        Check.at_most("diamond adjointness", diamond, 1e-12),
        Check.at_most("Lie derivative scalar/density duality", lie, 1e-12),
    ]
    # group-level checks use fixed analytic data; their tolerances are
    # interpolation-limited and stated for smooth, low-wavenumber inputs
    x = grid.nodes
    g1 = Diffeo(grid.field(x + 0.1 * np.sin(x)))
    g2 = Diffeo(grid.field(x + 0.05 * np.sin(2 * x) + 0.3))
    worst_action = 0.0
    for f in (grid.field(np.sin), grid.field(np.cos(x) + 0.3 * np.sin(2 * x))):
        action = alg.pullback_scalar(alg.compose(g1, g2), f) - alg.pullback_scalar(g2, alg.pullback_scalar(g1, f))
        worst_action = max(worst_action, action.max_abs())
    report.checks.append(Check.at_most("right-action law", worst_action, 1e-7))
    inverse = alg.invert_diffeo(g1)
    report.checks.append(Check.at_most("inverse residual", np.max(np.abs(g1(inverse.eta.values) - grid.nodes)), 1e-12))
    mu = Density(grid.field(1.0 + 0.2 * np.cos(x) + 0.3 * np.sin(2 * x)))
    one = grid.field(1.0)
    mass = max(abs(alg.pair_v(alg.pullback_density(g, mu), one) - alg.pair_v(mu, one)) for g in (g1,))
    report.checks.append(Check.at_most("pullback_density mass preservation", mass, 2e-6))
    xi = grid.field(np.cos(x) + 0.5 * np.sin(2 * x))
    md = OneFormDensity(grid.field(np.sin(x) + 0.2), mu.rho)
    Ad = abs(alg.pair_g(alg.ad_star_group(g1, md), xi) - alg.pair_g(md, alg.pushforward_vector(g1, xi)))
    report.checks.append(Check.at_most("Ad/Ad* duality", Ad, 1e-5))
    return report


def suite_duality(grids: Sequence[int], seed: int) -> VerificationReport:
    report = VerificationReport("duality", seed)
    grids = sorted(grids)
    worst_d = worst_l = 0.0
    for n in grids:
        d, l = exact_duality_errors(Grid(n), seed)
        worst_d, worst_l = max(worst_d, d), max(worst_l, l)
    report.checks += [
        Check.at_most("diamond adjointness (all grids)", worst_d, 1e-12),
        Check.at_most("Lie derivative duality (all grids)", worst_l, 1e-12),
    ]
    _convergence(report, "ad*/ad duality", grids, [ad_duality_error(Grid(n), seed) for n in grids])
    _convergence(report, "Jacobi cyclic sum", grids, [jacobi_cyclic_error(Grid(n), seed) for n in grids])
    return report


def random_reduced_state(grid: Grid, rng: np.random.Generator) -> ReducedState:
    return ReducedState(random_smooth_field(grid, rng, scale=0.5), Density(random_positive_field(grid, rng)))


def variational_derivative_errors(grid: Grid, law: BarotropicLaw, rng: np.random.Generator, count: int = 20):
    """Worst relative FD mismatch of dl/dv, dl/dmu, dH/dm, dH/drho over ``count`` states."""
    worst = dict.fromkeys(("dl/dv", "dl/dmu", "dH/dm", "dH/drho"), 0.0)
    zero = grid.field(0.0)
    H = hamiltonian_functional(law)
    for _ in range(count):
        state = random_reduced_state(grid, rng)
        xi, alpha = random_smooth_field(grid, rng), random_smooth_field(grid, rng)
        l = lambda s: reduced_lagrangian(s, law)  # noqa: E731
        c = compare_with_fd(l, state, (xi, zero), alg.pair_g(dl_dv(state), xi))
        worst["dl/dv"] = max(worst["dl/dv"], c.relative_error)
        c = compare_with_fd(l, state, (zero, alpha), integrate(dl_dmu(state, law) * alpha))
        worst["dl/dmu"] = max(worst["dl/dmu"], c.relative_error)
        cons = ConservativeState(state.rho.rho * state.v, state.rho)
        c = compare_with_fd(H.evaluate, cons, (xi, zero), integrate(dH_dm(cons) * xi))
        worst["dH/dm"] = max(worst["dH/dm"], c.relative_error)
        c = compare_with_fd(H.evaluate, cons, (zero, alpha), integrate(dH_drho(cons, law) * alpha))
        worst["dH/drho"] = max(worst["dH/drho"], c.relative_error)
    return worst


def invariance_errors(grid: Grid, law: BarotropicLaw, seed: int) -> tuple[float, float]:
    """(G-invariance defect of L, reduction-identity defect L(v o eta, eta^* mu) - l)."""
    rng = np.random.default_rng(seed)
    state = random_reduced_state(grid, rng)
    eta, gamma = random_diffeo(grid, rng), random_diffeo(grid, rng)
    material = lift_to_material(eta, state)
    reduction = abs(unreduced_lagrangian(material, law) - reduced_lagrangian(state, law))
    invariance = abs(unreduced_lagrangian(act_on_material(gamma, material), law) - unreduced_lagrangian(material, law))
    return invariance, reduction


def suite_lagrangian(grids: Sequence[int], seed: int, law: BarotropicLaw | None = None) -> VerificationReport:
    law = law or PolytropicLaw(1.0, 1.4)
    report = VerificationReport("lagrangian", seed)
    grids = sorted(grids)
    grid = Grid(grids[-1])
    rng = np.random.default_rng(seed)
    for name, err in variational_derivative_errors(grid, law, rng).items():
        report.checks.append(Check.at_most(f"{name} vs FD oracle (relative)", err, 1e-6))
    rho = Density(random_positive_field(grid, rng))
    r1, r2 = random_smooth_field(grid, rng), random_smooth_field(grid, rng)
    sym = abs(potential_hessian_form(law, rho, r1, r2) - potential_hessian_form(law, rho, r2, r1))
    report.checks.append(Check.at_most("DW symmetry", sym, 1e-12))
    inv, red = zip(*(invariance_errors(Grid(n), law, seed) for n in grids))
    report.checks += [
        Check.at_most(f"G-invariance at n={grids[-1]}", inv[-1], 1e-5),
        Check.at_most(f"reduction identity at n={grids[-1]}", red[-1], 1e-5),
    ]
    hs = [2 * np.pi / n for n in grids]
    report.table = []
    for quantity, errs in (("G-invariance", inv), ("reduction identity", red)):
        orders = observed_orders(hs, errs) if len(grids) >= 3 else [None] * len(grids)
        for n, h, e, o in zip(grids, hs, errs, orders):
            report.table.append({"quantity": quantity, "n": n, "h": h, "error": float(e), "order": o})
    return report


def random_conservative_state(grid: Grid, rng: np.random.Generator) -> ConservativeState:
    rho = Density(random_positive_field(grid, rng))
    return ConservativeState(rho.rho * random_smooth_field(grid, rng, scale=0.5), rho)


def random_weighted_functional(grid: Grid, rng: np.random.Generator):
    which = "momentum" if rng.random() < 0.5 else "density"
    return weighted_linear_functional(which, random_smooth_field(grid, rng))


def bracket_identity_errors(grid: Grid, law: BarotropicLaw, seed: int, pairs: int = 50):
    """Worst antisymmetry and bilinearity defects over seeded functional pairs."""
    rng = np.random.default_rng(seed)
    H = hamiltonian_functional(law)
    anti = bilinear = 0.0
    for k in range(pairs):
        state = random_conservative_state(grid, rng)
        F = random_weighted_functional(grid, rng)
        G = H if k % 5 == 0 else random_weighted_functional(grid, rng)
        F2 = random_weighted_functional(grid, rng)
        a, b = rng.standard_normal(2)
        fg, gf = lie_poisson_bracket(F, G, state), lie_poisson_bracket(G, F, state)
        anti = max(anti, abs(fg + gf))
        combo = lie_poisson_bracket(F.scaled(a) + F2.scaled(b), G, state)
        bilinear = max(bilinear, abs(combo - (a * fg + b * lie_poisson_bracket(F2, G, state))))
    return anti, bilinear


def conservation_rates(grid: Grid, law: BarotropicLaw, seed: int, states: int = 10) -> tuple[float, float]:
    """Worst |{mass, H}| and |{momentum, H}| over seeded smooth states."""
    rng = np.random.default_rng(seed)
    mass = momentum = 0.0
    for _ in range(states):
        s = random_conservative_state(grid, rng)
        mass = max(mass, abs(evolution_rate(total_mass(grid), s, law)))
        momentum = max(momentum, abs(evolution_rate(total_momentum(grid), s, law)))
    return mass, momentum


def jacobiator_magnitude(grid: Grid, seed: int) -> float:
    rng = np.random.default_rng(seed)
    state = random_conservative_state(grid, rng)
    F, G, K = (weighted_linear_functional(w, random_smooth_field(grid, rng)) for w in ("momentum", "momentum", "momentum"))
    return abs(jacobiator(F, G, K, state))


def suite_bracket(grids: Sequence[int], seed: int, law: BarotropicLaw | None = None) -> VerificationReport:
    law = law or PolytropicLaw(1.0, 1.4)
    report = VerificationReport("bracket", seed)
    grids = sorted(grids)
    grid = Grid(grids[-1])
    anti, bilinear = bracket_identity_errors(grid, law, seed)
    mass, momentum = conservation_rates(grid, law, seed)
    report.checks += [
        Check.at_most("antisymmetry (50 pairs)", anti, 1e-12),
        Check.at_most("bilinearity (50 pairs)", bilinear, 1e-12),
        Check.at_most("evolution rate of total mass", mass, 1e-12),
        Check.at_most("evolution rate of total momentum", momentum, 1e-12),
    ]
    if len(grids) >= 2:
        js = [jacobiator_magnitude(Grid(n), seed) for n in grids]
        for (n0, j0), (n1, j1) in zip(zip(grids, js), zip(grids[1:], js[1:])):
            report.checks.append(Check.within(f"jacobiator reduction {n0}->{n1}", j0 / j1, 3.2, 4.8))
        hs = [2 * np.pi / n for n in grids]
        orders = observed_orders(hs, js) if len(grids) >= 3 else [None] * len(grids)
        report.table = [
            {"quantity": "jacobiator", "n": n, "h": h, "error": float(j), "order": o}
            for n, h, j, o in zip(grids, hs, js, orders)
        ]
    return report


ROUTE_PAIRS = (("euler_poincare", "lie_poisson"), ("euler_poincare", "flux_form"), ("lie_poisson", "flux_form"))


def route_distances(n: int, law: BarotropicLaw, t_end: float = 0.5, dt_at_256: float = 5e-4,
                    solvers=("euler_poincare", "lie_poisson", "flux_form"), pairs=ROUTE_PAIRS,
                    ic_params: dict | None = None) -> dict[tuple[str, str], tuple[float, float]]:
    """Final-time (L-inf u, L-inf rho) distances between solver routes, dt scaled with h."""
    dt = dt_at_256 * 256 / n
    base = SimulationConfig(Grid(n), law, dt, t_end, "flux_form", "acoustic", ic_params or {"A": 0.01})
    # record only t = 0 and the final time
    base = base.replace(output_stride=base.n_steps)
    records = {s: simulate(base.replace(solver=s)) for s in solvers}
    out = {}
    for a, b in pairs:
        d = route_distance(records[a], records[b])
        out[(a, b)] = (float(d["linf_u"][-1]), float(d["linf_rho"][-1]))
    return out


def suite_convergence(grids: Sequence[int], seed: int, law: BarotropicLaw | None = None) -> VerificationReport:
    law = law or PolytropicLaw(1.0, 1.4)
    report = VerificationReport("convergence", seed)
    grids = sorted(grids)
    spatial = [route_distances(n, law) for n in grids]
    material = [
        route_distances(n, law, t_end=0.25, solvers=("material", "flux_form"), pairs=(("material", "flux_form"),))
        for n in grids
    ]
    levels = [{**s, **m} for s, m in zip(spatial, material)]
    for pair in (*ROUTE_PAIRS, ("material", "flux_form")):
        limit = 5e-4 if pair[0] == "material" else 5e-5
        for k, var in enumerate(("u", "rho")):
            errs = [lvl[pair][k] for lvl in levels]
            label = f"{pair[0]} vs {pair[1]} linf({var})"
            report.checks.append(Check.at_most(f"{label} at n={grids[-1]}", errs[-1], limit))
            for i in range(1, len(grids)):
                report.checks.append(
                    Check.within(f"{label} reduction {grids[i - 1]}->{grids[i]}", errs[i - 1] / errs[i], 3.2, 4.8)
                )
            _convergence(report, label, grids, errs, lo=1.8, hi=2.2)
    return report


def constraint_family(X, t, eps):
    return X + t * 0.1 * np.sin(X) + eps * 0.05 * np.sin(2 * X)


def suite_constraints(grids: Sequence[int], seed: int) -> VerificationReport:
    report = VerificationReport("constraints", seed)
    grid = Grid(max(grids))
    res = variation_constraint_check(constraint_family, grid, t0=0.2, eps0=0.0)
    trivial = variation_constraint_check(lambda X, t, eps: X + t * 0.1 * np.sin(X), grid, t0=0.2)
    report.checks += [
        Check.at_most(f"velocity constraint residual (n={grid.n_points})", res.velocity_residual, 1e-4),
        Check.at_most(f"density constraint residual (n={grid.n_points})", res.density_residual, 1e-4),
        Check.at_most("eps-independent family residual",
                      max(trivial.velocity_residual, trivial.density_residual), 1e-12),
    ]
    return report


_SUITE_FUNCS: dict[str, Callable[[Sequence[int], int], VerificationReport]] = {
    "algebra": suite_algebra,
    "duality": suite_duality,
    "lagrangian": suite_lagrangian,
    "bracket": suite_bracket,
    "convergence": suite_convergence,
    "constraints": suite_constraints,
}


def run_suite(name: str, grids: Sequence[int] | None = None, seed: int = 0) -> VerificationReport:
    if name not in _SUITE_FUNCS:
        raise KeyError(f"unknown suite {name!r}; expected one of {SUITES}")
    grids = tuple(grids) if grids else DEFAULT_GRIDS.get(name, (64, 128, 256))
    return _SUITE_FUNCS[name](grids, seed)
