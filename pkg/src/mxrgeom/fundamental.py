"""Fundamental data (ds^2, S, T, nu) of a surface in M^2 x R on a parameter grid.

Storage is in the coordinate frame (d/du, d/dv):

* ``g[i, j]``   induced metric,
* ``S[i, j]``   shape operator, ``S d_j = sum_i S[i, j] d_i``,
* ``T[i]``      coordinate components of the tangent projection of d/dt,
* ``nu``        normal component of d/dt.

Derivatives can be supplied as "jets" (analytic values on the nodes). Any
jet that is missing is replaced by second-order finite differences.
"""
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from . import _fd
from .ambient import Signature, g_inner, model_residual
from .errors import DomainError, StructuralError, ValidationError, UnsupportedError

MODEL_TOL = 1e-8
DEGENERACY = 1e-12


@dataclass(frozen=True)
class ParameterGrid:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    n_u: int
    n_v: int

    def __post_init__(self):
        if self.n_u < 3 or self.n_v < 3:
            raise ValueError("a grid needs at least 3 nodes per direction")
        if not (self.u_max > self.u_min and self.v_max > self.v_min):
            raise ValueError("empty parameter rectangle")

    @classmethod
    def square(cls, halfwidth_u, halfwidth_v, h):
        """Grid on [-a, a] x [-b, b] with spacing as close to ``h`` as the node count allows."""
        n_u = int(round(2 * halfwidth_u / h)) + 1
        n_v = int(round(2 * halfwidth_v / h)) + 1
        return cls(-halfwidth_u, halfwidth_u, -halfwidth_v, halfwidth_v, n_u, n_v)

    @property
    def hu(self):
        return (self.u_max - self.u_min) / (self.n_u - 1)

    @property
    def hv(self):
        return (self.v_max - self.v_min) / (self.n_v - 1)

    @property
    def h(self):
        return max(self.hu, self.hv)

    @property
    def shape(self):
        return (self.n_u, self.n_v)

    @property
    def u(self):
        return np.linspace(self.u_min, self.u_max, self.n_u)

    @property
    def v(self):
        return np.linspace(self.v_min, self.v_max, self.n_v)

    def mesh(self):
        return np.meshgrid(self.u, self.v, indexing="ij")

    @property
    def center(self):
        return (self.n_u // 2, self.n_v // 2)

    @property
    def diameter(self):
        return float(np.hypot(self.u_max - self.u_min, self.v_max - self.v_min))

    def refined(self):
        """Same rectangle with the spacing halved (nodes of ``self`` are kept)."""
        return ParameterGrid(self.u_min, self.u_max, self.v_min, self.v_max,
                             2 * self.n_u - 1, 2 * self.n_v - 1)

    def to_dict(self):
        return {"u_min": self.u_min, "u_max": self.u_max, "v_min": self.v_min,
                "v_max": self.v_max, "nu": self.n_u, "nv": self.n_v}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["u_min"]), float(d["u_max"]), float(d["v_min"]),
                   float(d["v_max"]), int(d["nu"]), int(d["nv"]))


@dataclass(frozen=True)
class SampledSurface:
    """Positions of a surface in M^2 x R (ambient coordinates) on every grid node."""
    sig: Signature
    grid: ParameterGrid
    positions: np.ndarray

    @property
    def heights(self):
        return self.positions[..., -1]


@dataclass(frozen=True)
class Chart:
    """A parametrised surface (u, v) -> M^2 x R inside E^4.

    ``d1(U, V)`` returns ``(x_u, x_v)`` and ``d2(U, V)`` returns
    ``(x_uu, x_uv, x_vv)`` when analytic derivatives are known.
    """
    sig: Signature
    evaluate: object
    d1: object = None
    d2: object = None
    conformal: bool = False
    name: str = "chart"

    def sample(self, grid):
        U, V = grid.mesh()
        return SampledSurface(self.sig, grid, np.asarray(self.evaluate(U, V), dtype=float))


@dataclass(frozen=True, eq=False)
class FundamentalData:
    sig: Signature
    grid: ParameterGrid
    g: np.ndarray
    S: np.ndarray
    T: np.ndarray
    nu: np.ndarray
    dg: np.ndarray = None     # [..., m, i, j] = d_m g_ij
    ddg: np.ndarray = None    # [..., m, l, i, j] = d_m d_l g_ij
    dS: np.ndarray = None     # [..., m, i, j] = d_m S[i, j]
    dT: np.ndarray = None     # [..., m, i] = d_m T^i
    dnu: np.ndarray = None    # [..., m] = d_m nu
    analytic: bool = False    # node values exact (not finite-difference estimates)
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sig.n != 2:
            raise UnsupportedError("fundamental data is implemented for surfaces (n = 2) only")
        s = self.grid.shape
        expected = {"g": s + (2, 2), "S": s + (2, 2), "T": s + (2,), "nu": s,
                    "dg": s + (2, 2, 2), "ddg": s + (2, 2, 2, 2), "dS": s + (2, 2, 2),
                    "dT": s + (2, 2), "dnu": s + (2,)}
        for name, shp in expected.items():
            a = getattr(self, name)
            if a is None:
                continue
            a = np.array(a, dtype=float)
            if a.shape != shp:
                raise StructuralError(f"{name} has shape {a.shape}, expected {shp}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        _check_metric(self.g)

    @property
    def has_exact_derivatives(self):
        return all(getattr(self, k) is not None for k in ("dg", "ddg", "dS", "dT", "dnu"))

    def default_tol(self):
        """1e-8 when every derivative is analytic, 10 h^2 otherwise."""
        return 1e-8 if self.has_exact_derivatives else 10.0 * self.grid.h**2

    def replace(self, **changes):
        kw = {k: getattr(self, k) for k in self.__dataclass_fields__}
        kw["meta"] = dict(self.meta)
        kw.update(changes)
        return FundamentalData(**kw)

    @property
    def eta(self):
        """eta(d_i) = g(T, d_i), the differential of the height."""
        return np.einsum("...ij,...j->...i", self.g, self.T)


def _check_metric(g):
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    tr = g[..., 0, 0] + g[..., 1, 1]
    bad = ~((det > DEGENERACY * tr**2) & (g[..., 0, 0] > 0))
    if np.any(bad):
        raise DomainError("degenerate or indefinite metric", node=np.argwhere(bad)[0])


# ---------------------------------------------------------------------------
# chart -> data

def _normal(Xu, Xv, Nbar, sig):
    """Unit vector G-orthogonal to Xu, Xv, Nbar, oriented so (Nbar, Xu, Xv, N) has det > 0."""
    d = sig.diagonal
    M = np.stack([Xu * d, Xv * d, Nbar * d], axis=-2)          # covectors, (..., 3, 4)
    w = np.empty(Xu.shape)
    for k in range(4):
        cols = [c for c in range(4) if c != k]
        w[..., k] = (-1) ** k * np.linalg.det(M[..., cols])
    nrm2 = g_inner(w, w, sig)
    if np.any(nrm2 <= 0):
        raise DomainError("normal is not spacelike", node=np.argwhere(nrm2 <= 0)[0])
    w = w / np.sqrt(nrm2)[..., None]
    A = np.stack([Nbar, Xu, Xv, w], axis=-1)
    sign = np.sign(np.linalg.det(A))
    return w * sign[..., None]


def _chart_jets(chart, grid):
    U, V = grid.mesh()
    X = np.asarray(chart.evaluate(U, V), dtype=float)
    sig = chart.sig
    if X.shape != grid.shape + (sig.dim,):
        raise StructuralError(f"chart returned shape {X.shape}")
    res = model_residual(X, sig)
    if np.any(res > MODEL_TOL):
        raise ValidationError(f"chart leaves the model (residual {np.max(res):.3g})",
                              node=np.unravel_index(np.argmax(res), res.shape))
    hu, hv = grid.hu, grid.hv
    if chart.d1 is not None:
        Xu, Xv = (np.asarray(a, dtype=float) for a in chart.d1(U, V))
    else:
        Xu, Xv = _fd.d1(X, hu, 0), _fd.d1(X, hv, 1)
    if chart.d2 is not None:
        Xuu, Xuv, Xvv = (np.asarray(a, dtype=float) for a in chart.d2(U, V))
    elif chart.d1 is not None:
        Xuu, Xuv, Xvv = _fd.d1(Xu, hu, 0), 0.5 * (_fd.d1(Xu, hv, 1) + _fd.d1(Xv, hu, 0)), _fd.d1(Xv, hv, 1)
    else:
        Xuu, Xuv, Xvv = _fd.d2(X, hu, 0), _fd.d_uv(X, hu, hv), _fd.d2(X, hv, 1)
    return X, Xu, Xv, Xuu, Xuv, Xvv


def adapted_frames(chart, grid):
    """Frame field (Nbar, e1, e2, N) of a chart; e1, e2 by G-Gram-Schmidt of (x_u, x_v)."""
    X, Xu, Xv, *_ = _chart_jets(chart, grid)
    return _frames_from_tangents(X, Xu, Xv, chart.sig)


def _frames_from_tangents(X, Xu, Xv, sig):
    Nbar = X.copy()
    Nbar[..., -1] = 0.0
    N = _normal(Xu, Xv, Nbar, sig)
    e1 = Xu / np.sqrt(g_inner(Xu, Xu, sig))[..., None]
    w = Xv - g_inner(Xv, e1, sig)[..., None] * e1
    e2 = w / np.sqrt(g_inner(w, w, sig))[..., None]
    return np.stack([Nbar, e1, e2, N], axis=-1)


def fundamental_from_chart(chart, grid, sig=None, metric_jet=True):
    """Derive (g, S, T, nu) from a chart; analytic chart derivatives are used when supplied.

    With analytic second derivatives the first metric derivatives are also
    exact (d_k g_ij = <x_ik, x_j> + <x_i, x_jk>) and are stored as a jet
    unless ``metric_jet`` is False, in which case every derivative of the
    data is left to finite differences.
    """
    if sig is not None and sig != chart.sig:
        raise StructuralError("signature does not match the chart")
    sig = chart.sig
    X, Xu, Xv, Xuu, Xuv, Xvv = _chart_jets(chart, grid)
    ip = lambda a, b: g_inner(a, b, sig)
    g = np.empty(grid.shape + (2, 2))
    g[..., 0, 0] = ip(Xu, Xu)
    g[..., 0, 1] = g[..., 1, 0] = ip(Xu, Xv)
    g[..., 1, 1] = ip(Xv, Xv)
    _check_metric(g)
    Nbar = X.copy()
    Nbar[..., -1] = 0.0
    N = _normal(Xu, Xv, Nbar, sig)
    b = np.empty_like(g)
    b[..., 0, 0] = ip(Xuu, N)
    b[..., 0, 1] = b[..., 1, 0] = ip(Xuv, N)
    b[..., 1, 1] = ip(Xvv, N)
    ginv = np.linalg.inv(g)
    S = ginv @ b
    T = np.einsum("...ij,...j->...i", ginv, np.stack([Xu[..., -1], Xv[..., -1]], axis=-1))
    nu = N[..., -1].copy()
    dg = None
    if chart.d2 is not None and metric_jet:
        D = {(0, 0): Xuu, (0, 1): Xuv, (1, 0): Xuv, (1, 1): Xvv}
        Xi = (Xu, Xv)
        dg = np.empty(grid.shape + (2, 2, 2))
        for m in range(2):
            for i in range(2):
                for j in range(2):
                    dg[..., m, i, j] = ip(D[i, m], Xi[j]) + ip(Xi[i], D[j, m])
    return FundamentalData(sig, grid, g, S, T, nu, dg=dg,
                           analytic=chart.d1 is not None and chart.d2 is not None,
                           label=chart.name)


# ---------------------------------------------------------------------------
# derivatives and curvature

def _christoffel(ginv, dg):
    """Gam[..., k, i, j] = Gamma^k_ij from the metric and its first derivatives."""
    a = dg                                   # d_i g_jl  -> [i, j, l]
    b = np.swapaxes(dg, -3, -2)              # d_j g_il  -> [i, j, l]
    c = np.moveaxis(dg, -3, -1)              # d_l g_ij  -> [i, j, l]
    return 0.5 * np.einsum("...kl,...ijl->...kij", ginv, a + b - c)


def geometry(data):
    """Metric inverse, Christoffel symbols and all first derivatives needed by the residuals."""
    hu, hv = data.grid.hu, data.grid.hv
    g = data.g
    ginv = np.linalg.inv(g)
    dg = data.dg if data.dg is not None else _fd.grad(g, hu, hv)
    Gam = _christoffel(ginv, dg)
    # second metric derivatives by compact stencils, never by differencing Gamma
    ddg = data.ddg if data.ddg is not None else _fd.hessian(g, hu, hv)
    dginv = -np.einsum("...ab,...mbc,...cd->...mad", ginv, dg, ginv)
    comb = dg + np.swapaxes(dg, -3, -2) - np.moveaxis(dg, -3, -1)
    dcomb = ddg + np.swapaxes(ddg, -3, -2) - np.moveaxis(ddg, -3, -1)
    dGam = 0.5 * (np.einsum("...mkl,...ijl->...mkij", dginv, comb)
                  + np.einsum("...kl,...mijl->...mkij", ginv, dcomb))
    dS = data.dS if data.dS is not None else _fd.grad(data.S, hu, hv)
    dT = data.dT if data.dT is not None else _fd.grad(data.T, hu, hv)
    dnu = data.dnu if data.dnu is not None else _fd.grad(data.nu, hu, hv)
    if data.dg is not None and data.dT is not None:
        deta = (np.einsum("...mij,...j->...mi", dg, data.T)
                + np.einsum("...ij,...mj->...mi", g, dT))
    else:
        deta = _fd.grad(data.eta, hu, hv)
    return SimpleNamespace(ginv=ginv, dg=dg, Gam=Gam, dGam=dGam, dS=dS, dT=dT,
                           dnu=dnu, deta=deta)


def gaussian_curvature(data, geo=None):
    """K = <R(d_u, d_v) d_v, d_u> / det g with R built from Christoffel symbols."""
    geo = geo or geometry(data)
    Gam, dGam = geo.Gam, geo.dGam
    # R(d0, d1) d1 = (d0 Gam^l_11 - d1 Gam^l_01 + Gam^m_11 Gam^l_0m - Gam^m_01 Gam^l_1m) d_l
    R = (dGam[..., 0, :, 1, 1] - dGam[..., 1, :, 0, 1]
         + np.einsum("...m,...lm->...l", Gam[..., :, 1, 1], Gam[..., :, 0, :])
         - np.einsum("...m,...lm->...l", Gam[..., :, 0, 1], Gam[..., :, 1, :]))
    det = np.linalg.det(data.g)
    return np.einsum("...l,...l->...", data.g[..., 0, :], R) / det


def _gnorm(g, w):
    return np.sqrt(np.abs(np.einsum("...i,...ij,...j->...", w, g, w)))


def gauss_residual(data, geo=None):
    """K - det S - kappa (1 - g(T, T)) per node."""
    geo = geo or geometry(data)
    K = gaussian_curvature(data, geo)
    TT = np.einsum("...i,...ij,...j->...", data.T, data.g, data.T)
    return K - np.linalg.det(data.S) - data.sig.kappa * (1.0 - TT)


def codazzi_residual(data, geo=None):
    """g-norm of nabla_u S d_v - nabla_v S d_u - kappa nu (<d_v,T> d_u - <d_u,T> d_v)."""
    geo = geo or geometry(data)
    S, Gam, dS = data.S, geo.Gam, geo.dS
    kappa = data.sig.kappa
    lhs = (dS[..., 0, :, 1] + np.einsum("...ia,...a->...i", Gam[..., :, 0, :], S[..., :, 1])
           - dS[..., 1, :, 0] - np.einsum("...ia,...a->...i", Gam[..., :, 1, :], S[..., :, 0]))
    eta = data.eta
    rhs = np.stack([kappa * data.nu * eta[..., 1], -kappa * data.nu * eta[..., 0]], axis=-1)
    return _gnorm(data.g, lhs - rhs)


def structure_residuals(data, geo=None):
    """(nabla_T, d_nu, unit_norm, d_eta) residual fields."""
    geo = geo or geometry(data)
    g, S, T, nu = data.g, data.S, data.T, data.nu
    nabla_T = np.zeros(data.grid.shape)
    d_nu = np.zeros(data.grid.shape)
    gT = np.einsum("...ij,...j->...i", g, T)
    for m in range(2):
        r = geo.dT[..., m, :] + np.einsum("...ab,...b->...a", geo.Gam[..., :, m, :], T) - nu[..., None] * S[..., :, m]
        nabla_T = np.maximum(nabla_T, _gnorm(g, r))
        d_nu = np.maximum(d_nu, np.abs(geo.dnu[..., m] + np.einsum("...a,...a->...", S[..., :, m], gT)))
    unit_norm = np.abs(np.einsum("...i,...i->...", gT, T) + nu**2 - 1.0)
    d_eta = geo.deta[..., 0, 1] - geo.deta[..., 1, 0]
    return nabla_T, d_nu, unit_norm, d_eta


EQUATIONS = ("gauss", "codazzi", "nabla_T", "d_nu", "unit_norm", "d_eta")


def residual_fields(data):
    geo = geometry(data)
    nabla_T, d_nu, unit_norm, d_eta = structure_residuals(data, geo)
    return {"gauss": gauss_residual(data, geo), "codazzi": codazzi_residual(data, geo),
            "nabla_T": nabla_T, "d_nu": d_nu, "unit_norm": unit_norm, "d_eta": d_eta}


@dataclass
class ResidualReport:
    max: dict
    rms: dict
    worst_node: dict
    tol: float
    passed: bool

    @property
    def violations(self):
        return [k for k in EQUATIONS if self.max[k] > self.tol]

    def rows(self):
        for k in EQUATIONS:
            yield (k, self.max[k], self.rms[k], self.worst_node[k], self.max[k] <= self.tol)

    def __str__(self):
        lines = [f"{'equation':<10} {'max':>12} {'rms':>12}  node       ok"]
        for k, mx, rms, node, ok in self.rows():
            lines.append(f"{k:<10} {mx:12.4e} {rms:12.4e}  {str(node):<10} {'yes' if ok else 'NO'}")
        lines.append(f"tol={self.tol:.3e} -> {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def check_compatibility(data, tol=None):
    """Evaluate every compatibility equation on the interior nodes."""
    tol = data.default_tol() if tol is None else float(tol)
    fields = residual_fields(data)
    mx, rms, worst = {}, {}, {}
    for k in EQUATIONS:
        a = np.abs(_fd.interior(fields[k]))
        idx = np.unravel_index(np.argmax(a), a.shape)
        mx[k] = float(a[idx])
        rms[k] = float(np.sqrt(np.mean(a**2)))
        worst[k] = (int(idx[0]) + 1, int(idx[1]) + 1)
    passed = all(mx[k] <= tol for k in EQUATIONS)
    return ResidualReport(mx, rms, worst, tol, passed)
