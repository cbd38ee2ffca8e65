"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line (printed in the pytest terminal summary,
or directly when this file is run as a script) before asserting.
"""

import itertools

import numpy as np
import pytest

from semidirect.algebra import Density
from semidirect.dynamics import SimulationConfig, route_distance, simulate
from semidirect.grid import Grid
from semidirect.hamiltonian import evolution_rate, total_mass, total_momentum
from semidirect.lagrangian import PolytropicLaw, variation_constraint_check
from semidirect.verify import (
    ad_duality_error,
    bracket_identity_errors,
    constraint_family,
    exact_duality_errors,
    fitted_order,
    invariance_errors,
    jacobi_cyclic_error,
    jacobiator_magnitude,
    random_conservative_state,
    variational_derivative_errors,
)

LAW = PolytropicLaw(kappa=1.0, gamma=1.4)
SEED = 20240601
SPATIAL = ("euler_poincare", "lie_poisson", "flux_form")

RESULTS: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    RESULTS.append(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
    return passed


def final_distances(n, dt, t_end, solvers, pairs):
    cfg = SimulationConfig(Grid(n), LAW, dt, t_end, ic_name="acoustic", ic_params={"A": 0.01})
    cfg = cfg.replace(output_stride=cfg.n_steps)
    runs = {s: simulate(cfg.replace(solver=s)) for s in solvers}
    out = {}
    for a, b in pairs:
        d = route_distance(runs[a], runs[b])
        out[(a, b)] = (d["linf_u"][-1], d["linf_rho"][-1])
    return out


def test_criterion_1_pde_recovery():
    pairs = list(itertools.combinations(SPATIAL, 2))
    coarse = final_distances(256, 5e-4, 0.5, SPATIAL, pairs)
    fine = final_distances(512, 2.5e-4, 0.5, SPATIAL, pairs)
    ok = True
    parts = []
    for pair in pairs:
        for k, var in enumerate(("u", "rho")):
            ratio = coarse[pair][k] / fine[pair][k]
            ok &= coarse[pair][k] <= 5e-5 and 3.2 <= ratio <= 4.8
            parts.append(f"{pair[0][:2]}/{pair[1][:2]} {var} {coarse[pair][k]:.2e} x{ratio:.2f}")
    assert record("1 (PDE recovery, n=256 <= 5e-5, refinement factor in [3.2, 4.8])", ok, "; ".join(parts))


def test_criterion_2_material_spatial_equivalence():
    pair = [("material", "flux_form")]
    errs = [final_distances(n, 5e-4 * 256 / n, 0.25, ("material", "flux_form"), pair)[pair[0]][0] for n in (128, 256, 512)]
    order = fitted_order([2 * np.pi / n for n in (128, 256, 512)], errs)
    ok = errs[1] <= 5e-4 and order >= 1.8
    detail = f"L-inf(u) at n=256 {errs[1]:.2e} (<= 5e-4), observed order {order:.2f} (>= 2 within 0.2)"
    assert record("2 (material/spatial equivalence)", ok, detail)


def test_criterion_3_duality_suite():
    grids = (64, 128, 256)
    exact = max(max(exact_duality_errors(Grid(n), SEED)) for n in grids)
    hs = [2 * np.pi / n for n in grids]
    ad_order = fitted_order(hs, [ad_duality_error(Grid(n), SEED) for n in grids])
    jac_order = fitted_order(hs, [jacobi_cyclic_error(Grid(n), SEED) for n in grids])
    ok = exact <= 1e-12 and 1.8 <= ad_order <= 2.2 and 1.8 <= jac_order <= 2.2
    detail = f"exact dualities {exact:.1e}; ad*/ad order {ad_order:.2f}; Jacobi order {jac_order:.2f}"
    assert record("3 (duality suite)", ok, detail)


def test_criterion_4a_bracket_antisymmetry_bilinearity():
    anti, bilinear = bracket_identity_errors(Grid(128), LAW, SEED, pairs=50)
    ok = anti <= 1e-12 and bilinear <= 1e-12
    assert record("4a (bracket antisymmetry/bilinearity, 50 pairs)", ok, f"{anti:.1e}, {bilinear:.1e}")


def test_criterion_4b_mass_and_momentum_rates():
    grid = Grid(128)
    rng = np.random.default_rng(SEED)
    mass = momentum = 0.0
    for _ in range(10):
        state = random_conservative_state(grid, rng)
        mass = max(mass, abs(evolution_rate(total_mass(grid), state, LAW)))
        momentum = max(momentum, abs(evolution_rate(total_momentum(grid), state, LAW)))
    ok = mass <= 1e-12 and momentum <= 1e-12
    detail = f"|{{mass, H}}| {mass:.1e}, |{{momentum, H}}| {momentum:.1e} (both <= 1e-12)"
    assert record("4b (evolution rate of total mass and momentum)", ok, detail)


def test_criterion_4c_jacobiator():
    j64, j128 = (jacobiator_magnitude(Grid(n), SEED) for n in (64, 128))
    ok = 3.2 <= j64 / j128 <= 4.8
    assert record("4c (jacobiator 64 -> 128)", ok, f"|J| {j64:.2e} -> {j128:.2e}, factor {j64 / j128:.2f}")


def test_criterion_5_variational_derivatives():
    worst = variational_derivative_errors(Grid(256), LAW, np.random.default_rng(SEED), count=20)
    ok = max(worst.values()) <= 1e-6
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record("5 (variational derivatives vs FD, relative 1e-6)", ok, detail)


def test_criterion_6_invariance_and_reduction():
    errs = [invariance_errors(Grid(n), LAW, SEED) for n in (64, 128, 256)]
    inv, red = zip(*errs)
    converging = all(a > b for a, b in zip(inv, inv[1:])) and all(a > b for a, b in zip(red, red[1:]))
    ok = inv[-1] <= 1e-5 and red[-1] <= 1e-5 and converging
    detail = f"G-invariance {inv[-1]:.1e}, reduction {red[-1]:.1e} at n=256; decreasing: {converging}"
    assert record("6 (G-invariance and reduction identity)", ok, detail)


def test_criterion_7_constraints():
    res = variation_constraint_check(constraint_family, Grid(512), t0=0.2, eps0=0.0, rho0=1.0)
    ok = res.velocity_residual <= 1e-4 and res.density_residual <= 1e-4
    detail = f"velocity {res.velocity_residual:.1e}, density {res.density_residual:.1e} at n=512"
    assert record("7 (variation constraints)", ok, detail)


def _drifts(solver, dt):
    cfg = SimulationConfig(Grid(256), LAW, dt, 1.0, solver, "acoustic", {"A": 0.01})
    rec = simulate(cfg)
    return np.abs(rec.diagnostics - rec.diagnostics[0]).max(axis=0)


def test_criterion_8a_conservation():
    ok = True
    parts = []
    for solver in ("flux_form", "lie_poisson"):
        mass, momentum, energy = _drifts(solver, 1e-3)
        ok &= mass <= 1e-12 and energy <= 1e-8
        if solver == "flux_form":
            ok &= momentum <= 1e-12
        parts.append(f"{solver}: mass {mass:.1e} momentum {momentum:.1e} energy {energy:.1e}")
    assert record("8a (mass, momentum, energy drift at dt=1e-3, t_end=1)", ok, "; ".join(parts))


def test_criterion_8b_energy_drift_scaling():
    ok = True
    parts = []
    for solver in ("flux_form", "lie_poisson"):
        coarse, fine = _drifts(solver, 1e-3)[2], _drifts(solver, 5e-4)[2]
        ratio = coarse / fine if fine > 0 else np.inf
        ok &= 12.8 <= ratio <= 19.2
        parts.append(f"{solver}: {coarse:.2e} -> {fine:.2e} (x{ratio:.2f})")
    assert record("8b (energy drift shrinks ~16x when dt halves)", ok, "; ".join(parts))


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS))
    sys.exit(0 if all(line.startswith("[PASS]") for line in RESULTS) else 1)
