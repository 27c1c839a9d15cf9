import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mxrgeom import catalog
from mxrgeom.ambient import model_residual
from mxrgeom.catalog import (CONJUGATE_PAIRS, CatalogSpec, conjugate_pair_check, domain_halfwidth,
                             fundamental_closed_form, solve_profile)
from mxrgeom.errors import DomainError, PreconditionError, StepSizeError, UnsupportedError
from mxrgeom.fundamental import ParameterGrid


def test_spec_parsing():
    assert CatalogSpec.parse("s2-helicoid:2") == CatalogSpec("s2-helicoid", 2.0)
    assert CatalogSpec.parse("u:1.5", "s2") == CatalogSpec("s2-unduloid", 1.5)
    assert CatalogSpec.parse("c0", "h2").kind == "h2-horocycle"
    assert CatalogSpec.parse("h2-catenoid").param == 1.0
    with pytest.raises(PreconditionError):
        CatalogSpec.parse("u:1.5")
    with pytest.raises(UnsupportedError):
        CatalogSpec.parse("s2-torus:1")


@pytest.mark.parametrize("kind,param", [("s2-unduloid", 1.0), ("s2-unduloid", -0.5),
                                        ("h2-gencatenoid", 1.0), ("h2-gencatenoid", 0.0),
                                        ("s2-helicoid", 0.0), ("h2-catenoid", 0.0)])
def test_parameter_ranges(kind, param):
    with pytest.raises(PreconditionError):
        CatalogSpec(kind, param)


def test_h2_helicoid_closed_form_profile():
    sol = solve_profile(CatalogSpec("h2-helicoid", 1.0), 1e-4, 1.2)
    exact = np.log(np.tan(sol.u / 2 + np.pi / 4))
    assert np.max(np.abs(sol.p - exact)) <= 1e-8
    assert np.max(np.abs(sol.dp - 1 / np.cos(sol.u))) <= 1e-8


def test_unduloid_initial_value():
    sol = solve_profile(CatalogSpec("s2-unduloid", math.sqrt(2)))
    p0, dp0, _, _ = sol.evaluate(0.0)
    assert math.isclose(p0, math.pi / 4, abs_tol=1e-15)
    assert dp0 == 0


@pytest.mark.parametrize("text", catalog.MAIN_SIX[:4] + catalog.MAIN_SIX[5:])
def test_first_integral_drift(text):
    sol = solve_profile(CatalogSpec.parse(text), 1e-4, 0.5)
    assert sol.drift <= 1e-8


def test_profile_errors():
    with pytest.raises(StepSizeError):
        solve_profile(CatalogSpec("s2-helicoid", 8.0), 0.05, 0.5)
    with pytest.raises(DomainError):
        solve_profile(CatalogSpec("h2-catenoid", 1.0), 1e-3, 1.4)
    with pytest.raises(UnsupportedError):
        solve_profile(CatalogSpec("h2-horocycle"))


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5))
def test_evaluate_between_samples(u):
    sol = solve_profile(CatalogSpec("h2-helicoid", 1.0))
    p, dp, ddp, _ = sol.evaluate(u)
    assert abs(p - math.log(math.tan(u / 2 + math.pi / 4))) <= 1e-10
    assert abs(ddp - math.sin(u) / math.cos(u) ** 2) <= 1e-10


def test_chart_values():
    c0 = catalog.chart(CatalogSpec("h2-horocycle"))
    assert np.allclose(c0.evaluate(0.0, 0.0), [1, 0, 0, 0])
    hel = catalog.chart(CatalogSpec("s2-helicoid", 1.0))
    assert np.allclose(hel.evaluate(np.array(0.0), np.array(0.0)), [0, 0, 1, 0])


@pytest.mark.parametrize("kind", catalog.KINDS)
def test_chart_on_model(kind):
    spec = CatalogSpec(kind)
    a = catalog.default_halfwidth(spec)
    grid = ParameterGrid(-a, a, -0.5, 0.5, 50, 50)
    P = catalog.chart(spec, a).sample(grid).positions
    assert np.max(model_residual(P, spec.sig)) <= 1e-12


def test_horocycle_closed_form_at_u0():
    grid = ParameterGrid(-0.1, 0.1, -0.1, 0.1, 3, 3)
    d = fundamental_closed_form(CatalogSpec("h2-horocycle"), grid)
    assert np.allclose(d.S[1, 1], -np.diag([1, -1]))
    assert np.allclose(d.T[1, 1], [1, 0])
    assert d.nu[1, 1] == 0


def test_catenoid_closed_form_at_u0():
    grid = ParameterGrid(-0.1, 0.1, -0.1, 0.1, 3, 3)
    d = fundamental_closed_form(CatalogSpec("h2-catenoid", 1.0), grid)
    # sinh psi(0) = 1, cosh psi(0) = sqrt 2, psi'(0) = 0
    assert np.allclose(d.S[1, 1], -math.sqrt(2) * np.diag([1, -1]), atol=1e-15)
    assert abs(d.nu[1, 1]) < 1e-15


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 10.0])
def test_catenoid_height_below_pi(alpha):
    assert 2 * domain_halfwidth(CatalogSpec("h2-catenoid", alpha)) < math.pi


@pytest.mark.parametrize("gamma", [0.3, 0.6, 0.9])
def test_gencatenoid_height_above_pi(gamma):
    assert 2 * domain_halfwidth(CatalogSpec("h2-gencatenoid", gamma)) > math.pi


def test_catenoid_height_decreases():
    u = [domain_halfwidth(CatalogSpec("h2-catenoid", a)) for a in (0.5, 1, 2, 10)]
    assert all(x > y for x, y in zip(u, u[1:]))


def test_halfwidth_unsupported():
    with pytest.raises(UnsupportedError):
        domain_halfwidth(CatalogSpec("s2-helicoid", 1.0))


def test_h2_helicoid_halfwidth_matches_closed_form():
    # phi = ln tan(u/2 + pi/4) blows up at u = pi/2
    assert math.isclose(domain_halfwidth(CatalogSpec("h2-helicoid", 1.0)), math.pi / 2, abs_tol=1e-9)


@pytest.mark.parametrize("a,b", CONJUGATE_PAIRS)
def test_conjugate_pairs(a, b):
    rep = conjugate_pair_check(CatalogSpec.parse(a), CatalogSpec.parse(b))
    assert rep["max"] <= 1e-8
    assert max(rep["ode_a"], rep["ode_b"]) <= 1e-6


def test_conjugate_pair_preconditions():
    with pytest.raises(PreconditionError):
        conjugate_pair_check(CatalogSpec("s2-unduloid", 1.5), CatalogSpec("s2-helicoid", 1.0))
    with pytest.raises(PreconditionError):
        conjugate_pair_check(CatalogSpec("s2-unduloid", math.sqrt(2)), CatalogSpec("s2-helicoid", -1.0))
    with pytest.raises(PreconditionError):
        conjugate_pair_check(CatalogSpec("s2-helicoid", 1.0), CatalogSpec("s2-unduloid", math.sqrt(2)))


def test_helicoid_partner():
    assert catalog.helicoid_partner(CatalogSpec("h2-gencatenoid", -0.6)).param == pytest.approx(-0.8)
    assert catalog.helicoid_partner(CatalogSpec("h2-horocycle")) == CatalogSpec("h2-helicoid", 1.0)
