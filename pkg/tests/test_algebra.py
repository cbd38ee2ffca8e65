import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semidirect import algebra as alg
from semidirect.algebra import Density, Diffeo, OneFormDensity, SemidirectElement
from semidirect.errors import MonotonicityError, PositivityError
from semidirect.grid import Grid, integrate, random_positive_field, random_smooth_field
from semidirect.verify import ad_duality_error, jacobi_cyclic_error


@pytest.fixture
def g():
    return Grid(256)


def shift(grid, a):
    return Diffeo(grid.field(grid.nodes + a))


def wiggle(grid, eps=0.1, k=1):
    return Diffeo(grid.field(grid.nodes + eps * np.sin(k * grid.nodes)))


# ------------------------------------------------------------------- types


def test_density_and_diffeo_invariants():
    g = Grid(16)
    with pytest.raises(PositivityError):
        Density(g.field(0.0))
    with pytest.raises(PositivityError):
        OneFormDensity(g.field(1.0), g.field(-1.0))
    with pytest.raises(MonotonicityError):
        Diffeo(g.field(-g.nodes))
    with pytest.raises(MonotonicityError):
        Diffeo(g.field(2.0 * g.nodes))  # winding number 2
    Diffeo(g.field(g.nodes + 100.0))  # lifted values need not lie in [0, L)


# ---------------------------------------------------------------- pairings


def test_pair_v_examples(g):
    one = Density(g.field(1.0))
    assert alg.pair_v(one, g.field(1.0)) == pytest.approx(2 * np.pi, abs=1e-13)
    assert abs(alg.pair_v(one, g.field(np.sin))) <= 1e-14
    rho = Density(g.field(lambda x: 1 + 0.5 * np.sin(x)))
    assert alg.pair_v(rho, g.field(np.sin)) == pytest.approx(np.pi / 2, abs=1e-12)


def test_pair_g_examples(g):
    assert alg.pair_g(OneFormDensity(g.field(0.0), g.field(1.0)), g.field(np.sin)) == 0.0
    assert alg.pair_g(OneFormDensity(g.field(1.0), g.field(1.0)), g.field(1.0)) == pytest.approx(2 * np.pi, abs=1e-13)
    md = OneFormDensity(g.field(np.cos), g.field(1.0))
    assert alg.pair_g(md, g.field(np.cos)) == pytest.approx(np.pi, abs=1e-12)


# ------------------------------------------------------------- group level


def test_pullback_scalar_examples(g):
    f = g.field(np.sin)
    assert np.array_equal(alg.pullback_scalar(Diffeo.identity(g), f).values, f.values)
    out = alg.pullback_scalar(shift(g, 0.3), f)
    assert np.max(np.abs(out.values - np.sin(g.nodes + 0.3))) <= 1e-8


def test_right_action_law(g):
    g1, g2 = wiggle(g), Diffeo(g.field(g.nodes + 0.05 * np.sin(2 * g.nodes) + 0.3))
    f = g.field(lambda x: np.cos(x) + 0.3 * np.sin(2 * x))
    lhs = alg.pullback_scalar(alg.compose(g1, g2), f)
    rhs = alg.pullback_scalar(g2, alg.pullback_scalar(g1, f))
    assert (lhs - rhs).max_abs() <= 1e-7


def test_pullback_density_examples(g):
    mu = Density(g.field(lambda x: 1 + 0.5 * np.sin(x)))
    same = alg.pullback_density(Diffeo.identity(g), mu)
    assert (same.rho - mu.rho).max_abs() <= 1e-12
    out = alg.pullback_density(wiggle(g), Density(g.field(1.0)))
    assert np.max(np.abs(out.rho.values - (1 + 0.1 * np.cos(g.nodes)))) <= 1e-6
    mu = Density(g.field(lambda x: 1 + 0.2 * np.cos(x) + 0.3 * np.sin(2 * x)))
    one = g.field(1.0)
    assert abs(alg.pair_v(alg.pullback_density(wiggle(g), mu), one) - alg.pair_v(mu, one)) <= 2e-6


def test_pushforward_vector_examples(g):
    xi = g.field(np.sin)
    assert (alg.pushforward_vector(Diffeo.identity(g), xi) - xi).max_abs() <= 1e-12
    assert alg.pushforward_vector(shift(g, 0.3), g.field(1.0)).values == pytest.approx(1.0, abs=1e-8)


def test_ad_star_group_examples(g):
    md = OneFormDensity(g.field(1.0), g.field(1.0))
    same = alg.ad_star_group(Diffeo.identity(g), md)
    assert (same.a - md.a).max_abs() <= 1e-12 and (same.rho - md.rho).max_abs() <= 1e-12
    out = alg.ad_star_group(wiggle(g), md)
    expected = 1 + 0.1 * np.cos(g.nodes)
    assert np.max(np.abs(out.a.values - expected)) <= 1e-6
    assert np.max(np.abs(out.rho.values - expected)) <= 1e-6


def test_Ad_Ad_star_duality(g):
    xi = g.field(lambda x: np.cos(x) + 0.5 * np.sin(2 * x))
    md = OneFormDensity(g.field(lambda x: np.sin(x) + 0.2), g.field(lambda x: 1 + 0.2 * np.cos(x)))
    for gamma in (wiggle(g), shift(g, 0.3), Diffeo(g.field(g.nodes + 0.05 * np.sin(2 * g.nodes)))):
        lhs = alg.pair_g(alg.ad_star_group(gamma, md), xi)
        rhs = alg.pair_g(md, alg.pushforward_vector(gamma, xi))
        assert abs(lhs - rhs) <= 1e-5


def test_invert_diffeo_examples(g):
    ident = Diffeo.identity(g)
    assert np.max(np.abs(alg.invert_diffeo(ident).eta.values - g.nodes)) <= 1e-12
    inv = alg.invert_diffeo(shift(g, 0.3))
    assert np.max(np.abs(inv.eta.values - (g.nodes - 0.3))) <= 1e-10
    w = wiggle(g, 0.3)
    back = alg.compose(w, alg.invert_diffeo(w))
    assert np.max(np.abs(back.eta.values - g.nodes)) <= 1e-10
    assert np.max(np.abs(w(alg.invert_diffeo(w).eta.values) - g.nodes)) <= 1e-12


def test_semidirect_product(g):
    gamma = wiggle(g)
    w = Density(g.field(lambda x: 1 + 0.3 * np.sin(x)))
    we = Density(g.field(lambda x: 1 + 0.2 * np.cos(x)))
    ident = Diffeo.identity(g)
    out = alg.semidirect_product(SemidirectElement(gamma, w), SemidirectElement(ident, we))
    assert (out.gamma.eta - gamma.eta).max_abs() <= 1e-12
    assert (out.omega.rho - (we.rho + w.rho)).max_abs() <= 1e-12

    out = alg.semidirect_product(SemidirectElement(ident, w), SemidirectElement(ident, we))
    assert (out.omega.rho - (w.rho + we.rho)).max_abs() <= 1e-12

    e1 = SemidirectElement(gamma, w)
    e2 = SemidirectElement(Diffeo(g.field(g.nodes + 0.05 * np.sin(2 * g.nodes) + 0.3)), we)
    e3 = SemidirectElement(Diffeo(g.field(g.nodes - 0.08 * np.cos(g.nodes))), Density(g.field(1.5)))
    left = alg.semidirect_product(alg.semidirect_product(e1, e2), e3)
    right = alg.semidirect_product(e1, alg.semidirect_product(e2, e3))
    assert (left.gamma.eta - right.gamma.eta).max_abs() <= 1e-6
    assert (left.omega.rho - right.omega.rho).max_abs() <= 1e-6


# ----------------------------------------------------------- algebra level

STENCIL = 1e-3  # h^2-level tolerance at n = 256 for unit-amplitude data


def test_lie_derivative_examples(g):
    x = g.nodes
    assert alg.lie_derivative_scalar(g.field(np.sin), g.field(2.0)).max_abs() == 0.0
    assert np.max(np.abs(alg.lie_derivative_scalar(g.field(1.0), g.field(np.sin)).values - np.cos(x))) <= STENCIL
    out = alg.lie_derivative_scalar(g.field(np.sin), g.field(np.cos)).values
    assert np.max(np.abs(out + np.sin(x) ** 2)) <= STENCIL
    mu = Density(g.field(lambda x: 1 + 0.5 * np.sin(x)))
    assert np.max(np.abs(alg.lie_derivative_density(g.field(1.0), mu).values - 0.5 * np.cos(x))) <= STENCIL


def test_bracket_examples(g):
    x = g.nodes
    B = alg.jacobi_lie_bracket
    assert np.max(np.abs(B(g.field(1.0), g.field(np.sin)).values - np.cos(x))) <= STENCIL
    assert np.max(np.abs(B(g.field(np.sin), g.field(np.cos)).values + 1.0)) <= STENCIL
    assert np.max(np.abs(alg.algebra_bracket(g.field(1.0), g.field(np.sin)).values + np.cos(x))) <= STENCIL
    xi = g.field(np.sin)
    assert alg.algebra_bracket(xi, xi).max_abs() == 0.0
    assert alg.ad is alg.algebra_bracket


def test_div_mu_examples(g):
    x = g.nodes
    one = Density(g.field(1.0))
    assert alg.div_mu(g.field(0.0), one).max_abs() == 0.0
    assert np.max(np.abs(alg.div_mu(g.field(np.sin), one).values - np.cos(x))) <= STENCIL
    mu = Density(g.field(lambda x: np.exp(np.sin(x))))
    assert np.max(np.abs(alg.div_mu(g.field(1.0), mu).values - np.cos(x))) <= STENCIL


def test_ad_star_and_diamond_examples(g):
    x = g.nodes
    md = OneFormDensity(g.field(np.sin), g.field(1.0))
    out = alg.ad_star(g.field(1.0), md)
    assert np.max(np.abs(out.a.values - np.cos(x))) <= STENCIL
    d = alg.diamond(g.field(np.sin), Density(g.field(1.0)))
    assert np.max(np.abs(d.a.values - np.cos(x))) <= STENCIL and np.all(d.rho.values == 1.0)
    assert alg.flat(g.field(np.sin)) is not None and alg.sharp is alg.flat


def test_ad_duality_and_jacobi_are_second_order():
    for quantity in (ad_duality_error, jacobi_cyclic_error):
        e = [quantity(Grid(n), 3) for n in (64, 128, 256)]
        assert 3.2 <= e[0] / e[1] <= 4.8 and 3.2 <= e[1] / e[2] <= 4.8


# -------------------------------------------------------------- properties

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.sampled_from([32, 64, 128]))
def test_bracket_antisymmetric_and_bilinear_exactly(seed, n):
    g = Grid(n)
    rng = np.random.default_rng(seed)
    xi, eta, zeta = (random_smooth_field(g, rng) for _ in range(3))
    assert (alg.algebra_bracket(xi, eta) + alg.algebra_bracket(eta, xi)).max_abs() == 0.0
    assert alg.algebra_bracket(xi, xi).max_abs() == 0.0
    assert (alg.algebra_bracket(2.0 * xi, eta) - 2.0 * alg.algebra_bracket(xi, eta)).max_abs() == 0.0
    lin = alg.algebra_bracket(xi + zeta, eta) - alg.algebra_bracket(xi, eta) - alg.algebra_bracket(zeta, eta)
    assert lin.max_abs() <= 1e-12 * (1 + xi.max_abs() + zeta.max_abs()) * eta.max_abs() * n


@given(seeds, st.sampled_from([32, 64, 256]))
def test_exact_dualities(seed, n):
    g = Grid(n)
    rng = np.random.default_rng(seed)
    f, xi = random_smooth_field(g, rng), random_smooth_field(g, rng)
    mu = Density(random_positive_field(g, rng))
    lhs = alg.pair_g(alg.diamond(f, mu), xi)
    assert abs(lhs - alg.pair_v(mu, alg.lie_derivative_scalar(xi, f))) <= 1e-12 * max(1.0, abs(lhs))
    lie = alg.pair_v(mu, alg.lie_derivative_scalar(xi, f)) + integrate(f * alg.lie_derivative_density(xi, mu))
    assert abs(lie) <= 1e-12 * max(1.0, abs(lhs))


@given(seeds, st.floats(0.0, 0.3))
def test_inverse_round_trip(seed, amplitude):
    g = Grid(64)
    s = random_smooth_field(g, np.random.default_rng(seed), modes=3)
    slope = np.max(np.abs(alg.derivative(s).values))
    eta = Diffeo(g.field(g.nodes + amplitude / max(slope, 1e-12) * s + 1.0))
    inv = alg.invert_diffeo(eta)
    assert np.max(np.abs(eta(inv.eta.values) - g.nodes)) <= 1e-12
