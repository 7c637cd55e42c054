import numpy as np
import pytest
from hypothesis import given, strategies as st

from voidcell import densities as D

finite = st.floats(-3, 3, allow_nan=False)
matrices = st.lists(finite, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))
angles = st.floats(0, 2 * np.pi)
points = st.lists(st.floats(-5, 5), min_size=2, max_size=2).map(np.array)


def test_example_quadratic_density_is_valid():
    f = D.homogeneous_bulk(1.0)
    assert D.validate_bulk(f, D.default_bulk_samples()).ok
    assert f(np.zeros(2), np.eye(2)) == pytest.approx(2.0)
    assert f(np.zeros(2), np.array([[0.0, 1.0], [-1.0, 0.0]])) == 0.0


def test_alpha_beta_ordering():
    with pytest.raises(D.DensityError):
        D.BulkDensity(lambda x, xi: 0.0, alpha=2.0, beta=1.0)
    with pytest.raises(D.DensityError):
        D.SurfaceDensity(lambda x, nu: 1.0, alpha=0.0, beta=1.0)
    with pytest.raises(D.DensityError):
        D.BulkDensity(lambda x, xi: 0.0, alpha=1.0, beta=1.0, p=3)


def test_validators_catch_violations():
    bad = D.BulkDensity(lambda x, xi: 1.0 + D.strain_sq(xi), alpha=1.0, beta=1.0)
    rep = D.validate_bulk(bad, D.default_bulk_samples())
    assert not rep.ok and {v["condition"] for v in rep.violations} >= {"f1"}
    skew_sensitive = D.BulkDensity(lambda x, xi: np.sum(np.asarray(xi) ** 2), alpha=1.0, beta=2.0)
    rep = D.validate_bulk(skew_sensitive, D.default_bulk_samples())
    assert "sym" in {v["condition"] for v in rep.violations}
    odd = D.SurfaceDensity(lambda x, nu: 1.5 + 0.5 * np.asarray(nu)[..., 0], alpha=1.0, beta=2.0)
    rep = D.validate_surface(odd, D.default_surface_samples())
    assert "g1" in {v["condition"] for v in rep.violations}
    with pytest.raises(ValueError):
        D.validate_surface(odd, [])


@pytest.mark.parametrize("g", [
    D.constant_surface(1.0), D.make_stripe_surface(1.0, 2.0), D.make_sinusoid_surface(),
    D.make_counterexample_surface(), D.crystalline_surface(), D.nonconvex_surface(),
])
def test_builtin_surface_families_valid(g):
    assert D.validate_surface(g, D.default_surface_samples()).ok


@pytest.mark.parametrize("f", [
    D.homogeneous_bulk(2.0), D.make_laminate_bulk(1.0, 2.0),
    D.make_laminate_bulk(1.0, 3.0, scalar_mode=True), D.homogeneous_bulk(1.0, scalar_mode=True),
])
def test_builtin_bulk_families_valid(f):
    assert D.validate_bulk(f, D.default_bulk_samples()).ok


@given(matrices, points)
def test_laminate_depends_on_sym_only(xi, x):
    f = D.make_laminate_bulk(1.0, 2.0)
    assert f(x, xi) == pytest.approx(f(x, D.sym(xi)), abs=1e-12)
    s2 = D.strain_sq(xi)
    assert f.alpha * s2 - 1e-12 <= f(x, xi) <= f.beta * s2 + 1e-12


@given(angles, points)
def test_surface_even_and_bounded(t, x):
    nu = np.array([np.cos(t), np.sin(t)])
    for g in (D.crystalline_surface(), D.nonconvex_surface(), D.make_sinusoid_surface()):
        v = g(x, nu)
        assert v == pytest.approx(g(x, -nu))
        assert g.alpha - 1e-12 <= v <= g.beta + 1e-12


@given(st.floats(0.05, 2.0), points)
def test_rescaled_family(eps, x):
    g = D.make_stripe_surface(1.0, 2.0)
    ge = g.rescaled(eps)
    nu = np.array([1.0, 0.0])
    assert ge(x, nu) == g(x / eps, nu)
    assert ge.period == pytest.approx(eps)


def test_frozen_densities():
    g = D.make_stripe_surface(1.0, 2.0)
    g0 = g.frozen([0.75, 0.0])
    y = np.array([[0.1, 0.0], [0.3, 0.2]])
    assert np.all(g0(y, np.array([1.0, 0.0])) == 2.0)
    assert g0.continuous_in_x and g0.period is None
    f = D.make_laminate_bulk(1.0, 2.0).frozen([0.25, 0.0])
    assert np.all(f.coefficient(y) == 1.0)


def test_stripes_discontinuous_sinusoid_continuous():
    assert not D.make_stripe_surface(1.0, 2.0).continuous_in_x
    assert D.make_sinusoid_surface().continuous_in_x
    assert not D.make_counterexample_surface().continuous_in_x


def test_counterexample_band():
    g = D.make_counterexample_surface(line_x=0.5, line_halfwidth=0.01)
    nu = np.array([1.0, 0.0])
    assert g(np.array([0.505, 3.0]), nu) == 1.0
    assert g(np.array([0.52, 0.0]), nu) == 2.0


def test_strain_sq_modes():
    xi = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert D.strain_sq(xi) == pytest.approx(1 + 16 + 2 * 2.5**2)
    assert D.strain_sq(xi, scalar_mode=True) == pytest.approx(25.0)
