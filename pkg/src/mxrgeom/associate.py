"""Associate family of minimal surfaces in M^2 x R.

For minimal data (trace S = 0) the rotated data S_theta = e^{theta J} S,
T_theta = e^{theta J} T (with the same metric and nu) again satisfy the
compatibility equations; integrating them gives the associate immersion
x_theta. theta = pi/2 is the conjugate surface, theta = pi the opposite one.
"""
import numpy as np

from .errors import HypothesisError, UnsupportedError
from .fundamental import adapted_frames, fundamental_from_chart
from .frames import connection_from_data, integrate_frame, reconstruct_immersion


def rotation_field(data):
    """J = (1/sqrt(det g)) [[-g12, -g22], [g11, g12]] in the coordinate frame."""
    if data.sig.n != 2:
        raise UnsupportedError("J is defined for surfaces only")
    return _J(data.g)


def _J(g):
    d = np.linalg.det(g)
    M = np.stack([np.stack([-g[..., 0, 1], -g[..., 1, 1]], -1),
                  np.stack([g[..., 0, 0], g[..., 0, 1]], -1)], -2)
    return M / np.sqrt(d)[..., None, None]


def _dJ(g, dg):
    """d_m J from the metric jet, [..., m, :, :]."""
    d = np.linalg.det(g)
    M = np.stack([np.stack([-g[..., 0, 1], -g[..., 1, 1]], -1),
                  np.stack([g[..., 0, 0], g[..., 0, 1]], -1)], -2)
    dM = np.stack([np.stack([-dg[..., 0, 1], -dg[..., 1, 1]], -1),
                   np.stack([dg[..., 0, 0], dg[..., 0, 1]], -1)], -2)
    dd = (dg[..., 0, 0] * g[..., None, 1, 1] + g[..., None, 0, 0] * dg[..., 1, 1]
          - 2 * g[..., None, 0, 1] * dg[..., 0, 1])
    sd = np.sqrt(d)[..., None, None, None]
    return dM / sd - 0.5 * M[..., None, :, :] * dd[..., None, None] / sd**3


def minimality_tol(data):
    return 1e-8 if data.analytic else 10.0 * data.grid.h**2


def rotate_data(data, theta, tol=None):
    """(g, S_theta, T_theta, nu) with S_theta = cos S + sin JS and T_theta = cos T + sin JT."""
    tol = minimality_tol(data) if tol is None else tol
    tr = np.abs(np.trace(data.S, axis1=-2, axis2=-1))
    if np.max(tr) > tol:
        raise HypothesisError(f"surface is not minimal: |trace S| = {np.max(tr):.3e} > {tol:.1e}",
                              node=np.unravel_index(np.argmax(tr), tr.shape))
    c, s = np.cos(theta), np.sin(theta)
    J = rotation_field(data)
    S = c * data.S + s * (J @ data.S)
    T = c * data.T + s * np.einsum("...ij,...j->...i", J, data.T)
    dS = dT = None
    if data.dg is not None and (data.dS is not None or data.dT is not None):
        dJ = _dJ(data.g, data.dg)
        if data.dS is not None:
            dS = c * data.dS + s * (dJ @ data.S[..., None, :, :] + J[..., None, :, :] @ data.dS)
        if data.dT is not None:
            dT = c * data.dT + s * (np.einsum("...mij,...j->...mi", dJ, data.T)
                                    + np.einsum("...ij,...mj->...mi", J, data.dT))
    out = data.replace(S=S, T=T, dS=dS, dT=dT, label=f"{data.label} theta={theta:g}")
    out.meta["theta"] = float(data.meta.get("theta", 0.0)) + float(theta)
    return out


def associate_immersion(chart, theta, base=None, grid=None, data=None):
    """x_theta sampled on ``grid``, normalised at ``base`` by the adapted frame and height of x.

    The base frame is the adapted frame of x with its tangent pair rotated by
    -theta, which is the element of SO+ that agrees with x at the base point,
    spans the same tangent plane and satisfies the last-row condition for
    the rotated T.
    """
    if not chart.conformal:
        raise HypothesisError("associate family needs a conformal chart")
    data = fundamental_from_chart(chart, grid) if data is None else data
    grid = data.grid
    base = grid.center if base is None else tuple(base)
    rot = rotate_data(data, theta)
    Ax = adapted_frames(chart, grid)[base]
    c, s = np.cos(theta), np.sin(theta)
    Rm = np.eye(4)
    Rm[1:3, 1:3] = [[c, s], [-s, c]]
    conn = connection_from_data(rot)
    fr = integrate_frame(conn, rot, base=base, A0=Ax @ Rm)
    t0 = chart.evaluate(grid.u[base[0]], grid.v[base[1]])[3]
    return reconstruct_immersion(fr, rot, t0=float(t0))
