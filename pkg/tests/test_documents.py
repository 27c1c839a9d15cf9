import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mxrgeom import catalog
from mxrgeom.ambient import S2R, H2R
from mxrgeom.documents import (COMPONENTS, data_from_dict, data_to_dict, mesh_from_surface,
                               read_data, read_mesh, to_3d, write_data, write_mesh)
from mxrgeom.errors import StructuralError, ValidationError
from mxrgeom.fundamental import FundamentalData, ParameterGrid

from conftest import surface


def closed(text, h=5e-2):
    spec, grid, _ = surface(text, h)
    return catalog.fundamental_closed_form(spec, grid)


def assert_same(a, b):
    assert a.sig == b.sig and a.grid == b.grid
    for name in COMPONENTS:
        x, y = getattr(a, name), getattr(b, name)
        assert (x is None) == (y is None), name
        if x is not None:
            assert x.dtype == y.dtype and x.shape == y.shape
            assert np.array_equal(x.view(np.uint64), y.view(np.uint64)), name


@pytest.mark.parametrize("text", ["s2-helicoid:1", "h2-gencatenoid:0.6", "h2-slice"])
def test_data_round_trip_bitwise(text, tmp_path):
    data = closed(text)
    path = tmp_path / "d.json"
    write_data(data, path)
    back = read_data(path)
    assert_same(data, back)
    assert back.analytic == data.analytic and back.label == data.label


def test_round_trip_without_jets(tmp_path):
    spec, grid, chart = surface("s2-unduloid:1.4142135623730951", 5e-2)
    from mxrgeom.fundamental import fundamental_from_chart

    data = fundamental_from_chart(chart, grid, metric_jet=False)
    write_data(data, tmp_path / "d.json")
    back = read_data(tmp_path / "d.json")
    assert back.dg is None and back.ddg is None
    assert_same(data, back)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (3, 4, 2), elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_arbitrary_floats_survive(T):
    grid = ParameterGrid(0.0, 1.0, 0.0, 1.0, 3, 4)
    g = np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy()
    data = FundamentalData(S2R, grid, g, np.zeros_like(g), T, np.ones(grid.shape))
    back = data_from_dict(json.loads(json.dumps(data_to_dict(data))))
    assert np.array_equal(back.T.view(np.uint64), T.view(np.uint64))


def test_document_layout():
    data = closed("s2-helicoid:1")
    doc = data_to_dict(data)
    nu, nv = data.grid.shape
    assert doc["version"] == "1"
    assert doc["signature"] == {"kappa": 1, "n": 2}
    for name, comp in COMPONENTS.items():
        assert len(doc["arrays"][name]) == nu * nv * int(np.prod(comp, dtype=int))
    # row-major over (i, j, components)
    assert doc["arrays"]["g"][:4] == list(data.g[0, 0].ravel())
    assert doc["arrays"]["nu"][1] == data.nu[0, 1]


@pytest.mark.parametrize("edit, word", [
    (lambda d: d.update(format="other"), "format"),
    (lambda d: d.update(version="2"), "version"),
    (lambda d: d["arrays"].pop("S"), "'S'"),
    (lambda d: d["arrays"]["T"].pop(), "'T'"),
    (lambda d: d["grid"].pop("nu"), "grid"),
    (lambda d: d["signature"].update(kappa=0), "signature"),
])
def test_invalid_documents(edit, word):
    doc = data_to_dict(closed("s2-helicoid:1"))
    edit(doc)
    with pytest.raises(ValidationError) as exc:
        data_from_dict(doc)
    assert word in str(exc.value)


def test_non_finite_value_names_node():
    data = closed("s2-helicoid:1")
    doc = data_to_dict(data)
    nv = data.grid.n_v
    doc["arrays"]["nu"][2 * nv + 3] = float("nan")
    with pytest.raises(ValidationError) as exc:
        data_from_dict(doc)
    assert exc.value.node == (2, 3)


def test_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        read_data(path)


# ---------------------------------------------------------------------------
# meshes


@pytest.mark.parametrize("text", catalog.MAIN_SIX)
def test_mesh_vertex_count(text, tmp_path):
    _, grid, chart = surface(text, 5e-2)
    x = chart.sample(grid)
    path = tmp_path / "m.obj"
    mesh = write_mesh(x, path)
    back = read_mesh(path)
    nu, nv = grid.shape
    assert len(back.vertices) == nu * nv == len(mesh.vertices)
    assert len(back.faces) == (nu - 1) * (nv - 1)
    assert back.faces.min() == 0 and back.faces.max() == nu * nv - 1
    assert back.model == mesh.model and back.shape == (nu, nv)
    assert np.array_equal(back.vertices, mesh.vertices)


def test_horocycle_disk_mesh(tmp_path):
    spec = catalog.CatalogSpec("h2-horocycle")
    a = catalog.default_halfwidth(spec)
    grid = ParameterGrid(-a, a, -0.5, 0.5, 60, 60)
    mesh = write_mesh(catalog.chart(spec, a).sample(grid), tmp_path / "c0.obj", "poincare-disk")
    assert mesh.vertices.shape == (3600, 3)
    assert np.all(np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1]) < 1)


@pytest.mark.parametrize("text, model", [("s2-slice", "stereographic"), ("h2-slice", "poincare-disk")])
def test_slice_mesh_constant_height(text, model):
    _, grid, chart = surface(text, 5e-2)
    x = chart.sample(grid)
    mesh = mesh_from_surface(x, model)
    assert np.ptp(mesh.vertices[:, 2]) == 0.0


def test_model_must_match_ambient():
    P = np.array([[1.0, 0.0, 0.0, 0.0]])
    with pytest.raises(ValidationError):
        to_3d(P, S2R, "poincare-disk")
    with pytest.raises(ValidationError):
        to_3d(P, H2R, "stereographic")
    with pytest.raises(ValidationError):
        to_3d(P, S2R, "wireframe")


def test_stereographic_pole():
    with pytest.raises(ValidationError):
        to_3d(np.array([0.0, 0.0, -1.0, 0.0]), S2R, "stereographic")


def test_drop_coordinate_model():
    P = np.array([[1.0, 2.0, 3.0, 4.0]])
    assert np.array_equal(to_3d(P, S2R, "embed4d-drop-coordinate", drop=0), [[2.0, 3.0, 4.0]])
    assert np.array_equal(to_3d(P, H2R, "embed4d-drop-coordinate", drop=2), [[1.0, 2.0, 4.0]])


def test_disk_model_formula():
    P = np.array([np.cosh(0.3), np.sinh(0.3), 0.0, 0.7])
    x, y, t = to_3d(P, H2R, "poincare-disk")
    assert x == pytest.approx(np.tanh(0.15), abs=1e-15)
    assert y == 0.0 and t == 0.7


def test_face_index_check():
    from mxrgeom.documents import MeshDocument

    with pytest.raises(StructuralError):
        MeshDocument(np.zeros((4, 3)), np.array([[0, 1, 2, 4]]), "stereographic")


def test_mesh_grid_header_checked(tmp_path):
    path = tmp_path / "m.obj"
    path.write_text("# grid 2 2\nv 0 0 0\nv 1 0 0\nv 0 1 0\n")
    with pytest.raises(ValidationError):
        read_mesh(path)
