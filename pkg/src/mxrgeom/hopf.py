"""Height function, harmonic conjugate and Hopf differentials of conformal minimal surfaces.

All complex fields are dz^2 coefficients in the fixed chart z = u + iv,
with d/dz = (d/du - i d/dv) / 2.
"""
from dataclasses import dataclass

import numpy as np

from . import _fd
from .ambient import g_inner
from .associate import associate_immersion, rotation_field
from .errors import ConsistencyError, HypothesisError
from .fundamental import Chart, SampledSurface
from .frames import _trapz_line


def _jets(obj, grid=None):
    """(positions, x_u, x_v, grid, analytic) for a Chart (on ``grid``) or a SampledSurface."""
    if isinstance(obj, Chart):
        if not obj.conformal:
            raise HypothesisError(f"{obj.name}: the chart is not conformal")
        P = obj.sample(grid).positions
        if obj.d1 is not None:
            U, V = grid.mesh()
            Xu, Xv = (np.asarray(a, dtype=float) for a in obj.d1(U, V))
            return P, Xu, Xv, grid, True
    else:
        P, grid = obj.positions, obj.grid
    return P, _fd.d1(P, grid.hu, 0), _fd.d1(P, grid.hv, 1), grid, False


@dataclass(frozen=True, eq=False)
class HeightPair:
    grid: object
    h: np.ndarray
    h_star: np.ndarray
    base: tuple
    harmonicity: float        # max |discrete Laplacian of h| over interior nodes
    cauchy_riemann: float     # max of the discrete CR residuals of (h, h*)


def height_pair(obj, grid=None, base=None, gate=None):
    """h and its harmonic conjugate h* (h*(base) = 0) by path integration of (-h_v, h_u)."""
    P, Xu, Xv, grid, _ = _jets(obj, grid)
    base = grid.center if base is None else tuple(base)
    h = P[..., 3]
    hu, hv = Xu[..., 3], Xv[..., 3]
    lap = _fd.d2(h, grid.hu, 0) + _fd.d2(h, grid.hv, 1)
    harm = float(np.max(np.abs(_fd.interior(lap))))
    gate = 10.0 * grid.h**2 if gate is None else gate
    if harm > gate:
        worst = np.unravel_index(np.argmax(np.abs(_fd.interior(lap))), _fd.interior(lap).shape)
        raise HypothesisError(f"height is not harmonic (Laplacian {harm:.3e} > {gate:.1e})",
                              node=(worst[0] + 1, worst[1] + 1))
    i0, j0 = base
    row = _trapz_line(0.0, -hv[:, j0], i0, grid.hu)
    hs = np.swapaxes(_trapz_line(row, np.swapaxes(hu, 0, 1), j0, grid.hv), 0, 1)
    cr = max(np.max(np.abs(_fd.interior(_fd.d1(hs, grid.hu, 0) + _fd.d1(h, grid.hv, 1)))),
             np.max(np.abs(_fd.interior(_fd.d1(hs, grid.hv, 1) - _fd.d1(h, grid.hu, 0)))))
    return HeightPair(grid, h, hs, base, harm, float(cr))


@dataclass(frozen=True, eq=False)
class ComplexField:
    grid: object
    values: np.ndarray
    cross_route: float = 0.0   # max |h-route - phi-route|


def hopf_differential(obj, grid=None, tol=None):
    """Q_phi = -4 (h_z)^2, cross-checked against 4 <phi_z, phi_z> of the horizontal part."""
    P, Xu, Xv, grid, _ = _jets(obj, grid)
    sig = obj.sig
    hu, hv = Xu[..., 3], Xv[..., 3]
    q_h = hv**2 - hu**2 + 2j * hu * hv
    pu, pv = Xu.copy(), Xv.copy()
    pu[..., 3] = pv[..., 3] = 0.0
    q_phi = g_inner(pu, pu, sig) - g_inner(pv, pv, sig) - 2j * g_inner(pu, pv, sig)
    diff = np.abs(q_h - q_phi)
    tol = 10.0 * grid.h**2 if tol is None else tol
    if np.max(diff) > tol:
        raise ConsistencyError(f"Hopf differential routes disagree by {np.max(diff):.3e}",
                               node=np.unravel_index(np.argmax(diff), diff.shape))
    return ComplexField(grid, q_h, float(np.max(diff)))


def holomorphy_residual(field):
    """max over interior nodes of |Q_u + i Q_v| (twice the d/dzbar derivative)."""
    g = field.grid
    r = _fd.d1(field.values, g.hu, 0) + 1j * _fd.d1(field.values, g.hv, 1)
    return float(np.max(np.abs(_fd.interior(r))))


def conjugate_route(pair):
    """-(d(h + i h*))^2 coefficient computed from the height pair."""
    g = pair.grid
    f = pair.h + 1j * pair.h_star
    fz = 0.5 * (_fd.d1(f, g.hu, 0) - 1j * _fd.d1(f, g.hv, 1))
    return ComplexField(g, -(fz**2))


def abresch_rosenberg(data):
    """Q(d_u, d_u) of the minimal-surface Hopf differential of Abresch and Rosenberg."""
    kappa = data.sig.kappa
    J = rotation_field(data)
    eta = data.eta                                   # <T, d_i>
    x = eta[..., 0]                                  # <T, X>, X = d_u
    JX = J[..., :, 0]
    jx = np.einsum("...i,...ij,...j->...", data.T, data.g, JX)   # <T, JX>
    Q = -0.5 * kappa * (x * x - jx * jx) + 0.5j * kappa * (jx * x + x * jx)
    return ComplexField(data.grid, Q)


@dataclass
class RotationLawReport:
    theta: float
    height_dev: float       # max |h_theta - (cos h + sin h*)| after removing base values
    hopf_dev: float         # max |Q_theta - e^{-2 i theta} Q|
    modulus_dev: float      # max ||Q_theta| - |Q||

    def rows(self):
        yield ("height_law", self.height_dev)
        yield ("hopf_law", self.hopf_dev)
        yield ("hopf_modulus", self.modulus_dev)


def rotation_law_check(chart, theta, grid, base=None):
    """Deviations of x_theta from h_theta = cos h + sin h* and Q_theta = e^{-2 i theta} Q.

    h* is only defined up to a constant, so heights are compared after
    subtracting their values at the base node.
    """
    base = grid.center if base is None else tuple(base)
    xt = associate_immersion(chart, theta, base=base, grid=grid)
    pair = height_pair(chart, grid, base)
    ht = xt.positions[..., 3]
    pred = np.cos(theta) * pair.h + np.sin(theta) * pair.h_star
    dh = (ht - ht[base]) - (pred - pred[base])
    q = hopf_differential(chart, grid).values
    qt = hopf_differential(xt).values
    return RotationLawReport(float(theta), float(np.max(np.abs(dh))),
                             float(np.max(np.abs(qt - np.exp(-2j * theta) * q))),
                             float(np.max(np.abs(np.abs(qt) - np.abs(q)))))
