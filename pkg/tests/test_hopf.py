import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mxrgeom import catalog
from mxrgeom.ambient import S2R, H2R
from mxrgeom.errors import ConsistencyError, HypothesisError
from mxrgeom.fundamental import Chart, ParameterGrid
from mxrgeom.hopf import (abresch_rosenberg, conjugate_route, height_pair, holomorphy_residual,
                          hopf_differential, rotation_law_check)

from conftest import surface

HELICOIDS = ("s2-helicoid:1", "h2-helicoid:1")


def expected_qphi(text):
    # h = v gives dh/dz = -i/2, h = u gives 1/2
    return 1.0 if "helicoid" in text else -1.0


def mercator_slice(t=0.25, height=None):
    """Conformal chart of a slice of S^2 x R."""
    height = (lambda U, V: t + 0 * U) if height is None else height

    def ev(U, V):
        return np.stack([np.cos(V) / np.cosh(U), np.sin(V) / np.cosh(U), np.tanh(U), height(U, V)], -1)

    def d1(U, V):
        s, c = np.tanh(U), 1 / np.cosh(U)
        xu = np.stack([-s * c * np.cos(V), -s * c * np.sin(V), c * c, 0 * U], -1)
        xv = np.stack([-c * np.sin(V), c * np.cos(V), 0 * U, 0 * U], -1)
        return xu, xv

    return Chart(S2R, ev, d1=d1, conformal=True, name="mercator-slice")


def disk_slice(t=-0.5):
    """Conformal (Poincare disk) chart of a slice of H^2 x R."""

    def ev(U, V):
        r2 = U * U + V * V
        d = 1 - r2
        return np.stack([(1 + r2) / d, 2 * U / d, 2 * V / d, t + 0 * U], -1)

    def d1(U, V):
        d = 1 - U * U - V * V
        z = 0 * U
        xu = np.stack([4 * U / d**2, 2 / d + 4 * U * U / d**2, 4 * U * V / d**2, z], -1)
        xv = np.stack([4 * V / d**2, 4 * U * V / d**2, 2 / d + 4 * V * V / d**2, z], -1)
        return xu, xv

    return Chart(H2R, ev, d1=d1, conformal=True, name="disk-slice")


# ---------------------------------------------------------------------------
# height pair


@pytest.mark.parametrize("text", HELICOIDS)
def test_helicoid_conjugate_height(text):
    _, grid, chart = surface(text)
    U, V = grid.mesh()
    pair = height_pair(chart, grid)
    assert np.max(np.abs(pair.h - V)) <= 1e-12
    assert np.max(np.abs(pair.h_star + U)) <= 1e-12
    assert pair.h_star[grid.center] == 0.0


@pytest.mark.parametrize("text", ["s2-unduloid:1.4142135623730951", "h2-catenoid:1", "h2-horocycle"])
def test_profile_surface_conjugate_height(text):
    _, grid, chart = surface(text)
    _, V = grid.mesh()
    pair = height_pair(chart, grid)
    assert np.max(np.abs(pair.h_star - V)) <= 1e-12


def test_slice_conjugate_height_is_constant():
    _, grid, _ = surface("s2-slice")
    pair = height_pair(mercator_slice(), grid)
    assert np.all(pair.h == 0.25)
    assert np.all(pair.h_star == 0.0)


def test_cauchy_riemann_from_samples(main_surface):
    _, grid, chart = main_surface
    pair = height_pair(chart.sample(grid))
    assert pair.cauchy_riemann <= 10 * grid.h**2
    assert pair.harmonicity <= 10 * grid.h**2


def test_nonharmonic_height_rejected():
    _, grid, _ = surface("s2-slice")
    x = mercator_slice(height=lambda U, V: U * U).sample(grid)
    with pytest.raises(HypothesisError) as exc:
        height_pair(x)
    assert exc.value.node is not None


def test_nonconformal_chart_rejected():
    _, grid, chart = surface("s2-slice")
    with pytest.raises(HypothesisError):
        height_pair(chart, grid)
    with pytest.raises(HypothesisError):
        hopf_differential(chart, grid)


# ---------------------------------------------------------------------------
# Hopf differential


def test_qphi_closed_form_values(main_surface):
    spec, grid, chart = main_surface
    q = hopf_differential(chart, grid)
    assert np.max(np.abs(q.values - expected_qphi(str(spec)))) <= 1e-12
    assert q.cross_route <= 1e-12


def test_qphi_from_samples(main_surface):
    spec, grid, chart = main_surface
    q = hopf_differential(chart.sample(grid))
    assert np.max(np.abs(q.values - expected_qphi(str(spec)))) <= 10 * grid.h**2
    assert q.cross_route <= 10 * grid.h**2


@pytest.mark.parametrize("make", [mercator_slice, disk_slice])
def test_slice_qphi_vanishes(make):
    grid = ParameterGrid.square(0.3, 0.3, 1e-2)
    chart = make()
    q = hopf_differential(chart, grid)
    assert np.max(np.abs(q.values)) <= 1e-12 and q.cross_route <= 1e-12
    # constant height: the h-route is exactly zero; the phi-route only carries FD error
    assert np.max(np.abs(hopf_differential(chart.sample(grid), tol=1e-2).values)) <= 1e-12


def test_route_disagreement_raises():
    _, grid, chart = surface("s2-slice")
    with pytest.raises(ConsistencyError):
        hopf_differential(chart.sample(grid))


def test_holomorphy(main_surface):
    _, grid, chart = main_surface
    assert holomorphy_residual(hopf_differential(chart.sample(grid))) <= 10 * grid.h**2


def test_qphi_is_minus_square_of_d_h_plus_i_hstar(main_surface):
    _, grid, chart = main_surface
    x = chart.sample(grid)
    q = hopf_differential(x).values
    c = conjugate_route(height_pair(x)).values
    assert np.max(np.abs(q - c)) <= 10 * grid.h**2


# ---------------------------------------------------------------------------
# Abresch-Rosenberg form


def test_ar_vanishes_on_slice():
    spec, grid, _ = surface("h2-slice")
    q = abresch_rosenberg(catalog.fundamental_closed_form(spec, grid))
    assert np.all(q.values == 0)


def test_ar_helicoid_sphere_is_half():
    spec, grid, _ = surface("s2-helicoid:1")
    q = abresch_rosenberg(catalog.fundamental_closed_form(spec, grid))
    assert np.max(np.abs(q.values - 0.5)) <= 1e-12


def test_ar_is_half_kappa_qphi(main_surface):
    spec, grid, chart = main_surface
    kappa = spec.sig.kappa
    q = abresch_rosenberg(catalog.fundamental_closed_form(spec, grid)).values
    qphi = hopf_differential(chart, grid).values
    assert np.max(np.abs(q - 0.5 * kappa * qphi)) <= 1e-6


# ---------------------------------------------------------------------------
# rotation laws


def test_rotation_law_at_zero(main_surface):
    _, grid, chart = main_surface
    rep = rotation_law_check(chart, 0.0, grid)
    assert rep.height_dev <= 1e-8
    assert rep.hopf_dev <= 1e-8


def test_rotation_law_unduloid_half_pi():
    _, grid, chart = surface("s2-unduloid:1.4142135623730951")
    rep = rotation_law_check(chart, np.pi / 2, grid)
    assert rep.hopf_dev <= 1e-5
    assert rep.height_dev <= 1e-5


def test_rotation_law_helicoid_third_pi():
    from mxrgeom.associate import associate_immersion

    _, grid, chart = surface("h2-helicoid:1")
    theta = np.pi / 3
    xt = associate_immersion(chart, theta, grid=grid)
    q = hopf_differential(xt).values
    assert np.max(np.abs(q - np.exp(-2j * theta))) <= 1e-5
    assert rotation_law_check(chart, theta, grid).hopf_dev <= 1e-5


@settings(max_examples=6, deadline=None)
@given(st.floats(-np.pi, np.pi))
def test_rotation_law_modulus(theta):
    _, grid, chart = surface("h2-gencatenoid:0.6", 2e-2)
    rep = rotation_law_check(chart, theta, grid)
    assert rep.modulus_dev <= 1e-5
    assert [k for k, _ in rep.rows()] == ["height_law", "hopf_law", "hopf_modulus"]
