"""File formats: the JSON fundamental-data document and ASCII OBJ meshes.

Data document (version "1")::

    {
      "format": "mxrgeom-fundamental-data",
      "version": "1",
      "signature": {"kappa": 1, "n": 2},
      "grid": {"u_min": .., "u_max": .., "v_min": .., "v_max": .., "nu": .., "nv": ..},
      "label": "...",
      "analytic": false,
      "arrays": {"g": [...], "S": [...], "T": [...], "nu": [...], "dg": [...], ...}
    }

Each array is flattened in row-major order over (node i, node j, components...);
its length must be nu * nv * (component count). Jets ("dg", "ddg", "dS",
"dT", "dnu") are optional. Floats are written with Python's shortest
round-trip representation, so write followed by read is bit-exact.
"""
import json
from dataclasses import dataclass

import numpy as np

from .ambient import Signature
from .errors import StructuralError, ValidationError
from .fundamental import FundamentalData, ParameterGrid

FORMAT = "mxrgeom-fundamental-data"
VERSION = "1"
COMPONENTS = {"g": (2, 2), "S": (2, 2), "T": (2,), "nu": (), "dg": (2, 2, 2),
              "ddg": (2, 2, 2, 2), "dS": (2, 2, 2), "dT": (2, 2), "dnu": (2,)}
REQUIRED = ("g", "S", "T", "nu")


def data_to_dict(data):
    arrays = {}
    for name in COMPONENTS:
        a = getattr(data, name)
        if a is not None:
            arrays[name] = [float(x) for x in np.asarray(a, dtype=float).ravel()]
    return {"format": FORMAT, "version": VERSION,
            "signature": {"kappa": data.sig.kappa, "n": data.sig.n},
            "grid": data.grid.to_dict(), "label": data.label,
            "analytic": bool(data.analytic), "arrays": arrays}


def data_from_dict(doc):
    if doc.get("format") != FORMAT:
        raise ValidationError(f"not a fundamental-data document (format {doc.get('format')!r})")
    if str(doc.get("version")) != VERSION:
        raise ValidationError(f"unsupported document version {doc.get('version')!r}")
    try:
        sig = Signature(int(doc["signature"]["kappa"]), int(doc["signature"]["n"]))
        grid = ParameterGrid.from_dict(doc["grid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad signature or grid: {exc}") from exc
    arrays = doc.get("arrays", {})
    kw = {}
    for name, comp in COMPONENTS.items():
        if name not in arrays:
            if name in REQUIRED:
                raise ValidationError(f"array {name!r} missing")
            continue
        flat = np.asarray(arrays[name], dtype=float)
        expected = grid.n_u * grid.n_v * int(np.prod(comp, dtype=int))
        if flat.ndim != 1 or flat.size != expected:
            raise ValidationError(f"array {name!r} has {flat.size} values, expected {expected}")
        if not np.all(np.isfinite(flat)):
            bad = np.argwhere(~np.isfinite(flat))[0][0] // max(1, int(np.prod(comp, dtype=int)))
            raise ValidationError(f"array {name!r} has a non-finite value", node=divmod(int(bad), grid.n_v))
        kw[name] = flat.reshape(grid.shape + comp)
    return FundamentalData(sig, grid, kw.pop("g"), kw.pop("S"), kw.pop("T"), kw.pop("nu"),
                           analytic=bool(doc.get("analytic", False)),
                           label=str(doc.get("label", "")), **kw)


def write_data(data, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data_to_dict(data), fh, allow_nan=False)
        fh.write("\n")


def read_data(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return data_from_dict(doc)


# ---------------------------------------------------------------------------
# meshes

MODELS = ("embed4d-drop-coordinate", "stereographic", "poincare-disk")


def default_model(sig):
    return "stereographic" if sig.kappa == 1 else "poincare-disk"


def to_3d(positions, sig, model, drop=0):
    """Map ambient points to R^3 for display; the height is always kept as the last coordinate."""
    P = np.asarray(positions, dtype=float)
    if model not in MODELS:
        raise ValidationError(f"unknown mesh model {model!r}")
    if model == "poincare-disk":
        if sig.kappa != -1:
            raise ValidationError("poincare-disk model needs kappa = -1")
        d = 1.0 + P[..., 0]
        return np.stack([P[..., 1] / d, P[..., 2] / d, P[..., 3]], axis=-1)
    if model == "stereographic":
        if sig.kappa != 1:
            raise ValidationError("stereographic model needs kappa = +1")
        d = 1.0 + P[..., 2]
        if np.any(np.abs(d) < 1e-12):
            raise ValidationError("stereographic projection hits the pole (0, 0, -1)")
        return np.stack([P[..., 0] / d, P[..., 1] / d, P[..., 3]], axis=-1)
    keep = [k for k in range(4) if k != drop]
    if len(keep) != 3:
        raise ValidationError(f"drop index {drop} out of range")
    return P[..., keep]


@dataclass(frozen=True, eq=False)
class MeshDocument:
    vertices: np.ndarray   # (nu * nv, 3)
    faces: np.ndarray      # (F, 4), 0-based
    model: str
    shape: tuple = None

    def __post_init__(self):
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise StructuralError("face index out of range")


def mesh_from_surface(surface, model=None, drop=0):
    model = default_model(surface.sig) if model is None else model
    V = to_3d(surface.positions, surface.sig, model, drop).reshape(-1, 3)
    nu, nv = surface.grid.shape
    i, j = np.meshgrid(np.arange(nu - 1), np.arange(nv - 1), indexing="ij")
    k = (i * nv + j).ravel()
    faces = np.stack([k, k + nv, k + nv + 1, k + 1], axis=-1)
    return MeshDocument(V, faces, model, (nu, nv))


def write_mesh(surface, path, model=None, drop=0, name=""):
    mesh = mesh_from_surface(surface, model, drop)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# mxrgeom mesh {name}\n# model {mesh.model}\n# grid {mesh.shape[0]} {mesh.shape[1]}\n")
        for x, y, z in mesh.vertices:
            fh.write(f"v {float(x)!r} {float(y)!r} {float(z)!r}\n")
        for f in mesh.faces + 1:
            fh.write("f " + " ".join(str(int(k)) for k in f) + "\n")
    return mesh


def read_mesh(path):
    verts, faces, model, shape = [], [], None, None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
            elif parts[:2] == ["#", "model"]:
                model = parts[2]
            elif parts[:2] == ["#", "grid"]:
                shape = (int(parts[2]), int(parts[3]))
    V = np.asarray(verts, dtype=float).reshape(-1, 3)
    F = np.asarray(faces, dtype=int).reshape(len(faces), -1) if faces else np.zeros((0, 4), int)
    if shape is not None and shape[0] * shape[1] != len(V):
        raise ValidationError(f"mesh has {len(V)} vertices, grid says {shape[0]}x{shape[1]}")
    return MeshDocument(V, F, model, shape)
