"""Moving frames: connection form, flatness, frame transport and reconstruction.

The frame matrix ``A`` has columns (Nbar, e1, e2, N) expressed in the
canonical basis of E^4, with ``A^t G A = G``; along the surface it solves
dA = A Omega, where Omega is the so(E^4)-valued connection 1-form assembled
from the fundamental data. Omega is stored through its values on d/du and
d/dv at every node.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _fd
from .ambient import (GROUP_TOL_TRANSPORTED, group_defect,
                      model_residual, project_to_model, reorthonormalize)
from .errors import (DomainError, IntegrabilityError, IntegrityError, PreconditionError,
                     StructuralError)
from .fundamental import SampledSurface, _christoffel, _frames_from_tangents, geometry

Z_ROW_TOL = 1e-8
DISPLACEMENT_LIMIT = 1e-4


@dataclass(frozen=True, eq=False)
class ConnectionField:
    """Omega[..., m, :, :] = Omega(d_m) with m = 0 (u), 1 (v)."""
    sig: object
    grid: object
    Omega: np.ndarray
    coframe: np.ndarray     # R[..., k, m] = omega^k(d_m); g = R^t R, R upper triangular
    zrow: np.ndarray        # (0, T^1, T^2, nu) in the orthonormal frame
    dOmega: np.ndarray = None   # [..., l, m] = d_l (Omega(d_m)), exact when the data carry jets

    @property
    def Omega_u(self):
        return self.Omega[..., 0, :, :]

    @property
    def Omega_v(self):
        return self.Omega[..., 1, :, :]


def _coframe(g, dg):
    """Cholesky factor R (g = R^t R) and its derivatives dR[..., m] (from dg)."""
    R = np.zeros_like(g)
    r11 = np.sqrt(g[..., 0, 0])
    r12 = g[..., 0, 1] / r11
    r22 = np.sqrt(g[..., 1, 1] - r12**2)
    R[..., 0, 0], R[..., 0, 1], R[..., 1, 1] = r11, r12, r22
    dR = np.zeros(g.shape[:-2] + (2, 2, 2), dtype=g.dtype)
    for m in range(2):
        d11 = dg[..., m, 0, 0] / (2 * r11)
        d12 = (dg[..., m, 0, 1] - r12 * d11) / r11
        d22 = (dg[..., m, 1, 1] - 2 * r12 * d12) / (2 * r22)
        dR[..., m, 0, 0], dR[..., m, 0, 1], dR[..., m, 1, 1] = d11, d12, d22
    return R, dR


def _omega(kappa, g, dg, S, T, nu):
    """Connection matrices Omega(d_u), Omega(d_v), coframe and last row, node by node.

    Written without real-only operations so that it can be evaluated at
    complex-perturbed arguments (complex-step differentiation).
    """
    R, dR = _coframe(g, dg)
    P = np.linalg.inv(R)
    Gam = _christoffel(np.linalg.inv(g), dg)
    S_on = R @ S @ P
    T_on = np.einsum("...ij,...j->...i", R, T)
    eta = np.einsum("...ij,...j->...i", g, T)
    Om = np.zeros(g.shape[:-2] + (2, 4, 4), dtype=g.dtype)
    for m in range(2):
        dP = -P @ dR[..., m, :, :] @ P
        W = R @ (dP + Gam[..., :, m, :] @ P)
        W = 0.5 * (W - np.swapaxes(W, -1, -2))
        Om[..., m, 1:3, 1:3] = W
        # omega^3_j(d_m) = <S d_m, e_j>
        om3 = (S_on @ R)[..., :, m]
        Om[..., m, 3, 1:3] = om3
        Om[..., m, 1:3, 3] = -om3
        om0 = kappa * (T_on * eta[..., m, None] - R[..., :, m])
        Om[..., m, 0, 1:3] = om0
        Om[..., m, 1:3, 0] = -kappa * om0
        om03 = kappa * nu * eta[..., m]
        Om[..., m, 0, 3] = om03
        Om[..., m, 3, 0] = -kappa * om03
    zrow = np.zeros(g.shape[:-2] + (4,), dtype=g.dtype)
    zrow[..., 1:3] = T_on
    zrow[..., 3] = nu
    return Om, R, zrow


_STEP = 1e-30


def connection_from_data(data):
    """Assemble Omega(d_u), Omega(d_v) from (g, S, T, nu) and the Levi-Civita connection of g.

    When the data carry every derivative jet, d Omega is also computed
    (complex-step differentiation of the assembly, exact to rounding).
    """
    kappa = data.sig.kappa
    dg = geometry(data).dg
    Om, R, zrow = _omega(kappa, data.g, dg, data.S, data.T, data.nu)
    dOm = None
    if data.has_exact_derivatives:
        dOm = np.empty(data.grid.shape + (2, 2, 4, 4))
        for l in range(2):
            e = 1j * _STEP
            Oc, _, _ = _omega(kappa, data.g + e * dg[..., l, :, :], dg + e * data.ddg[..., l, :, :, :],
                              data.S + e * data.dS[..., l, :, :], data.T + e * data.dT[..., l, :],
                              data.nu + e * data.dnu[..., l])
            dOm[..., l, :, :, :] = Oc.imag / _STEP
    return ConnectionField(data.sig, data.grid, Om, R, zrow, dOm)


def flatness_residual(conn, method="auto"):
    """max-norm of d_u Omega_v - d_v Omega_u + [Omega_u, Omega_v] per node.

    ``method`` "fd" uses central differences of the node values, "jet" the
    exact derivatives stored on the connection; "auto" prefers the jet.
    """
    Ou, Ov = conn.Omega_u, conn.Omega_v
    if method == "jet" or (method == "auto" and conn.dOmega is not None):
        if conn.dOmega is None:
            raise ValueError("connection has no derivative jet")
        curl = conn.dOmega[..., 0, 1, :, :] - conn.dOmega[..., 1, 0, :, :]
    else:
        curl = _fd.d1(Ov, conn.grid.hu, 0) - _fd.d1(Ou, conn.grid.hv, 1)
    F = curl + Ou @ Ov - Ov @ Ou
    return np.max(np.abs(F), axis=(-2, -1))


# ---------------------------------------------------------------------------
# transport

def _midpoints(O, axis, cubic=True):
    """Omega at edge midpoints along ``axis`` (length n-1 on that axis)."""
    O = np.moveaxis(O, axis, 0)
    n = O.shape[0]
    if not cubic or n < 4:
        mid = 0.5 * (O[:-1] + O[1:])
    else:
        mid = np.empty((n - 1,) + O.shape[1:])
        mid[1:-1] = (-O[:-3] + 9 * O[1:-2] + 9 * O[2:-1] - O[3:]) / 16
        mid[0] = 0.3125 * O[0] + 0.9375 * O[1] - 0.3125 * O[2] + 0.0625 * O[3]
        mid[-1] = 0.3125 * O[-1] + 0.9375 * O[-2] - 0.3125 * O[-3] + 0.0625 * O[-4]
    return np.moveaxis(mid, 0, axis)


def _rk4_step(A, O0, Om, O1, dt, sig):
    k1 = A @ O0
    k2 = (A + 0.5 * dt * k1) @ Om
    k3 = (A + 0.5 * dt * k2) @ Om
    k4 = (A + dt * k3) @ O1
    return reorthonormalize(A + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), sig)


def _transport_line(A0, O, mid, start, h, sig):
    """Transport along axis 0 of ``O`` (shape (n, ..., 4, 4)) from index ``start`` both ways."""
    n = O.shape[0]
    out = np.empty(O.shape[:1] + A0.shape)
    out[start] = A0
    A = A0
    for k in range(start, n - 1):
        A = _rk4_step(A, O[k], mid[k], O[k + 1], h, sig)
        out[k + 1] = A
    A = A0
    for k in range(start, 0, -1):
        A = _rk4_step(A, O[k], mid[k - 1], O[k - 1], -h, sig)
        out[k - 1] = A
    return out


def _trapz_line(f0, eta, start, h):
    """Cumulative trapezoid of eta along axis 0 anchored with value f0 at ``start``."""
    n = eta.shape[0]
    out = np.empty(eta.shape[:1] + np.shape(f0))
    out[start] = f0
    for k in range(start, n - 1):
        out[k + 1] = out[k] + 0.5 * h * (eta[k] + eta[k + 1])
    for k in range(start, 0, -1):
        out[k - 1] = out[k] - 0.5 * h * (eta[k] + eta[k - 1])
    return out


def transport(conn, base, A0, order="uv", cubic=True):
    """Frame field obtained from A0 at ``base`` along the lattice paths of ``order``."""
    if order not in ("uv", "vu"):
        raise ValueError("order must be 'uv' or 'vu'")
    sig = conn.sig
    i0, j0 = base
    Ou, Ov = conn.Omega_u, conn.Omega_v
    hu, hv = conn.grid.hu, conn.grid.hv
    mid_u = _midpoints(Ou, 0, cubic)
    mid_v = _midpoints(Ov, 1, cubic)
    if order == "uv":
        row = _transport_line(A0, Ou[:, j0], mid_u[:, j0], i0, hu, sig)      # (nu, 4, 4)
        cols = _transport_line(row, np.swapaxes(Ov, 0, 1), np.swapaxes(mid_v, 0, 1), j0, hv, sig)
        return np.swapaxes(cols, 0, 1)
    col = _transport_line(A0, Ov[i0], mid_v[i0], j0, hv, sig)                # (nv, 4, 4)
    return _transport_line(col, Ou, mid_u, i0, hu, sig)


def integrate_heights(data, base, t0, order="uv"):
    """Height function by trapezoidal integration of eta along the transport paths."""
    i0, j0 = base
    eta = data.eta
    hu, hv = data.grid.hu, data.grid.hv
    if order == "uv":
        row = _trapz_line(t0, eta[:, j0, 0], i0, hu)
        return np.swapaxes(_trapz_line(row, np.swapaxes(eta[..., 1], 0, 1), j0, hv), 0, 1)
    col = _trapz_line(t0, eta[i0, :, 1], j0, hv)
    return _trapz_line(col, eta[..., 0], i0, hu)


def canonical_frame(zrow, sig):
    """A completion of the last row ``zrow`` = (0, T1, T2, nu) to an element of SO+.

    Row 0 is E0; rows 1, 2 come from Gram-Schmidt of E1, E2, E3 against zrow
    in coordinates 1..3; row 1 is flipped if needed to make det = +1.
    """
    r = np.asarray(zrow, dtype=float)
    A = np.zeros((4, 4))
    A[0, 0] = 1.0
    A[3] = r
    rows = []
    for k in range(1, 4):
        w = np.zeros(4)
        w[k] = 1.0
        for q in [r] + rows:
            w = w - np.dot(w, q) * q
        if np.linalg.norm(w) > 1e-6:
            rows.append(w / np.linalg.norm(w))
        if len(rows) == 2:
            break
    A[1], A[2] = rows
    if np.linalg.det(A) < 0:
        A[1] = -A[1]
    return A


@dataclass(frozen=True, eq=False)
class FrameField:
    sig: object
    grid: object
    A: np.ndarray
    base: tuple
    A0: np.ndarray
    order: str = "uv"

    def row_drift(self, conn):
        """max |last row of A - (0, T, nu)| over all nodes."""
        return float(np.max(np.abs(self.A[..., 3, :] - conn.zrow)))

    def group_defect(self):
        return float(np.max(group_defect(self.A, self.sig)))


def integrate_frame(conn, data=None, base=None, A0=None, gate=None, order="uv", cubic=True):
    """Solve dA = A Omega from A0 at ``base`` along the lattice; see ``transport``.

    ``gate`` bounds the interior flatness residual (default 10 h^2). The
    edge midpoint value of Omega uses 4-point cubic interpolation of the node
    values; ``cubic=False`` falls back to the plain average.
    """
    grid = conn.grid
    base = grid.center if base is None else tuple(int(k) for k in base)
    if not (0 <= base[0] < grid.n_u and 0 <= base[1] < grid.n_v):
        raise StructuralError(f"base node {base} outside the grid")
    gate = 10.0 * grid.h**2 if gate is None else float(gate)
    flat = _fd.interior(flatness_residual(conn))
    if np.max(flat) > gate:
        worst = np.unravel_index(np.argmax(flat), flat.shape)
        raise IntegrabilityError(f"flatness residual {np.max(flat):.3e} exceeds the gate {gate:.3e}",
                                 node=(worst[0] + 1, worst[1] + 1))
    z = conn.zrow[base]
    if A0 is None:
        A0 = canonical_frame(z, conn.sig)
    A0 = np.asarray(A0, dtype=float)
    if group_defect(A0, conn.sig) > GROUP_TOL_TRANSPORTED or np.linalg.det(A0) < 0 or (
            conn.sig.kappa == -1 and A0[0, 0] <= 0):
        raise PreconditionError("A0 is not in SO+")
    if np.max(np.abs(A0[3] - z)) > Z_ROW_TOL:
        raise PreconditionError(f"last row of A0 differs from (0, T, nu) by {np.max(np.abs(A0[3] - z)):.3e}",
                                node=base)
    A = transport(conn, base, reorthonormalize(A0, conn.sig), order, cubic)
    return FrameField(conn.sig, grid, A, base, A0, order)


def holonomy(conn, rect=None, cubic=True):
    """||A_loop - I||_max for transport of I around the grid rectangle (i0, j0, i1, j1)."""
    g = conn.grid
    i0, j0, i1, j1 = rect if rect is not None else (0, 0, g.n_u - 1, g.n_v - 1)
    sig = conn.sig
    Ou, Ov = conn.Omega_u, conn.Omega_v
    mid_u = _midpoints(Ou, 0, cubic)
    mid_v = _midpoints(Ov, 1, cubic)
    A = np.eye(4)
    for k in range(i0, i1):
        A = _rk4_step(A, Ou[k, j0], mid_u[k, j0], Ou[k + 1, j0], g.hu, sig)
    for k in range(j0, j1):
        A = _rk4_step(A, Ov[i1, k], mid_v[i1, k], Ov[i1, k + 1], g.hv, sig)
    for k in range(i1, i0, -1):
        A = _rk4_step(A, Ou[k, j1], mid_u[k - 1, j1], Ou[k - 1, j1], -g.hu, sig)
    for k in range(j1, j0, -1):
        A = _rk4_step(A, Ov[i0, k], mid_v[i0, k - 1], Ov[i0, k - 1], -g.hv, sig)
    return float(np.max(np.abs(A - np.eye(4))))


def path_discrepancy(conn, base=None, cubic=True):
    """max over nodes of |A_uv - A_vu| for transport of I along the two lattice orders."""
    base = conn.grid.center if base is None else base
    a = transport(conn, base, np.eye(4), "uv", cubic)
    b = transport(conn, base, np.eye(4), "vu", cubic)
    return float(np.max(np.abs(a - b)))


# ---------------------------------------------------------------------------
# reconstruction

@dataclass(frozen=True, eq=False)
class ReconstructedChart(SampledSurface):
    frames: FrameField = None
    t0: float = 0.0
    displacement: float = 0.0


def reconstruct_immersion(frames, data, t0=0.0):
    """Positions f = (A^0_0, A^1_0, A^2_0, height) with height from the integral of eta."""
    sig = frames.sig
    if frames.A.shape[:2] != data.grid.shape:
        raise StructuralError("frame field and data live on different grids")
    f = np.empty(data.grid.shape + (4,))
    f[..., :3] = frames.A[..., :3, 0]
    f[..., 3] = integrate_heights(data, frames.base, float(t0), frames.order)
    p = project_to_model(f, sig)
    disp = np.max(np.abs(p - f))
    if disp > DISPLACEMENT_LIMIT:
        worst = np.unravel_index(np.argmax(np.max(np.abs(p - f), axis=-1)), data.grid.shape)
        raise IntegrityError(f"model projection displaced a node by {disp:.3e}", node=worst)
    return ReconstructedChart(sig, data.grid, p, frames=frames, t0=float(t0), displacement=float(disp))


def reconstruct(data, base=None, A0=None, t0=0.0, gate=None, order="uv"):
    """data -> connection -> frames -> immersion in one call."""
    conn = connection_from_data(data)
    fr = integrate_frame(conn, data, base=base, A0=A0, gate=gate, order=order)
    return reconstruct_immersion(fr, data, t0)


def _tangent_at(P, grid, node, axis):
    """Second-order FD derivative of positions at ``node`` along ``axis`` (one-sided at edges)."""
    h = grid.hu if axis == 0 else grid.hv
    line = np.moveaxis(P, axis, 0)
    k = node[axis]
    other = node[1 - axis]
    n = line.shape[0]
    if 0 < k < n - 1:
        return (line[k + 1, other] - line[k - 1, other]) / (2 * h)
    if k == 0:
        return (-3 * line[0, other] + 4 * line[1, other] - line[2, other]) / (2 * h)
    return (3 * line[-1, other] - 4 * line[-2, other] + line[-3, other]) / (2 * h)


def frame_from_positions(surface, node):
    """Adapted frame (Nbar, e1, e2, N) at ``node`` from finite-difference tangents."""
    P = surface.positions
    Xu = _tangent_at(P, surface.grid, node, 0)
    Xv = _tangent_at(P, surface.grid, node, 1)
    return _frames_from_tangents(P[node], Xu, Xv, surface.sig)


def _horizontal_tangent(surface, node, axis):
    """Horizontal part of the ``axis`` tangent, projected onto T_p M, and its G-norm squared."""
    sig = surface.sig
    d = sig.diagonal[:3]
    p = surface.positions[node][:3]
    w = _tangent_at(surface.positions, surface.grid, node, axis)[:3]
    w = w - sig.kappa * np.dot(d * w, p) * p
    return w, float(np.dot(d * w, w))


def _horizontal_frame(surface, node, axis):
    """G-orthonormal basis (p, w, c) of E^3: the point, the unit horizontal tangent and the completion."""
    d = surface.sig.diagonal[:3]
    p = surface.positions[node][:3]
    w, nw = _horizontal_tangent(surface, node, axis)
    if not np.isfinite(nw) or nw <= 1e-24:
        raise DomainError("horizontal tangent degenerate at the base node", node=node)
    w = w / np.sqrt(nw)
    c = d * np.cross(p, w)
    c = c / np.sqrt(abs(np.dot(d * c, c)))
    H = np.stack([p, w, c], axis=-1)
    if np.linalg.det(H) < 0:
        H[:, 2] = -H[:, 2]
    return H


def compare_up_to_isometry(a, b, base=None):
    """Max coordinate distance between a and the image of b under the isometry aligning them at ``base``.

    The isometry is (x, t) -> (B x, t + tau) with B in SO+ of the horizontal
    form; B carries b's point and the horizontal part of one coordinate
    tangent onto a's, and tau matches the heights.
    """
    if a.grid.shape != b.grid.shape:
        raise StructuralError("surfaces sampled on different grids")
    sig = a.sig
    base = a.grid.center if base is None else tuple(base)
    # G-norms are isometry invariant, so congruent inputs select the same axis
    size = np.array([[_horizontal_tangent(s, base, k)[1] for k in (0, 1)] for s in (a, b)])
    if not np.all(np.isfinite(size)):
        raise DomainError("surface not finite at the base node", node=base)
    shared = int(np.argmax(size.min(axis=0)))
    if size[:, shared].min() > 1e-12:
        axes = (shared, shared)
    else:
        axes = tuple(int(np.argmax(row)) for row in size)
    Ha = _horizontal_frame(a, base, axes[0])
    Hb = _horizontal_frame(b, base, axes[1])
    D = np.diag(sig.diagonal[:3])
    B = Ha @ D @ Hb.T @ D
    tau = a.positions[base][3] - b.positions[base][3]
    pb = b.positions.copy()
    pb[..., :3] = np.einsum("ij,...j->...i", B, b.positions[..., :3])
    pb[..., 3] += tau
    return float(np.max(np.abs(pb - a.positions)))


def apply_isometry(surface, B=None, tau=0.0, flip_t=False):
    """Image of a sampled surface under (x, t) -> (B x, +-t + tau)."""
    P = np.array(surface.positions, dtype=float)
    if B is not None:
        P[..., :3] = np.einsum("ij,...j->...i", np.asarray(B, float), P[..., :3])
    if flip_t:
        P[..., 3] = -P[..., 3]
    P[..., 3] += tau
    return SampledSurface(surface.sig, surface.grid, P)


# ---------------------------------------------------------------------------
# sign flips

SIGN_FLIPS = {
    1: {"S": -1, "T": 1, "nu": -1, "reverses": ("M",)},
    2: {"S": -1, "T": -1, "nu": 1, "reverses": ("R",)},
    3: {"S": 1, "T": -1, "nu": -1, "reverses": ("M", "R")},
}


def sign_flip_isometry(case):
    """(B, flip_t) of the ambient isometry realising a sign-flip case: reflection of x^2 and/or t -> -t."""
    rev = SIGN_FLIPS[case]["reverses"]
    B = np.diag([1.0, 1.0, -1.0]) if "M" in rev else np.eye(3)
    return B, "R" in rev


def apply_sign_flip(data, case):
    """Data with the sign pattern of ``case``: 1 (-S, T, -nu), 2 (-S, -T, nu), 3 (S, -T, -nu)."""
    if case not in SIGN_FLIPS:
        raise ValueError(f"sign-flip case must be 1, 2 or 3, got {case}")
    s = SIGN_FLIPS[case]
    neg = lambda a, k: None if a is None else s[k] * a
    out = data.replace(S=s["S"] * data.S, T=s["T"] * data.T, nu=s["nu"] * data.nu,
                       dS=neg(data.dS, "S"), dT=neg(data.dT, "T"), dnu=neg(data.dnu, "nu"))
    # the cases form a Klein four-group; with 0 as identity, composition is xor
    new = int(data.meta.get("sign_flip", 0)) ^ case
    out.meta.pop("sign_flip", None)
    out.meta.pop("reverses", None)
    if new:
        out.meta["sign_flip"] = new
        out.meta["reverses"] = SIGN_FLIPS[new]["reverses"]
    return out
