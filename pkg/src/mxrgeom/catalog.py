"""Explicit minimal surfaces of S^2 x R and H^2 x R.

Families (spec strings ``kind[:parameter]``):

=====================  =========  ===========================================
kind                   parameter  surface
=====================  =========  ===========================================
``s2-helicoid``        beta != 0  helicoid H_beta in S^2 x R
``s2-unduloid``        |a| > 1    unduloid U_alpha in S^2 x R
``h2-helicoid``        beta != 0  helicoid H_beta in H^2 x R
``h2-catenoid``        a != 0     catenoid C_alpha in H^2 x R
``h2-horocycle``       --         C_0, foliated by horocycles
``h2-gencatenoid``     0<|g|<1    generalized catenoid G_gamma
``s2-slice``           t          horizontal sphere S^2 x {t}
``h2-slice``           t          horizontal plane H^2 x {t}
``s2-cylinder``        --         vertical cylinder over a great circle
``h2-vertical-plane``  --         vertical plane over a geodesic
=====================  =========  ===========================================

Profiles are integrated in second-order form with classical RK4 from the
normalisation at u = 0; the first integral is monitored as a drift check.
Chart derivatives are assembled from (p, p', p'') with p'' taken from the
ODE itself, so no numerical differentiation of a profile ever happens.
"""
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .ambient import Signature, S2R, H2R
from .errors import DomainError, NumericalError, PreconditionError, StepSizeError, UnsupportedError
from .fundamental import Chart, FundamentalData, ParameterGrid

PROFILE_STEP = 1e-4
DRIFT_LIMIT = 1e-6
DEFAULT_HALFWIDTH = 0.5

KINDS = ("s2-helicoid", "s2-unduloid", "h2-helicoid", "h2-catenoid", "h2-horocycle",
         "h2-gencatenoid", "s2-slice", "h2-slice", "s2-cylinder", "h2-vertical-plane")

DEFAULT_PARAMS = {"s2-helicoid": 1.0, "s2-unduloid": math.sqrt(2.0), "h2-helicoid": 1.0,
                  "h2-catenoid": 1.0, "h2-horocycle": None, "h2-gencatenoid": 0.6,
                  "s2-slice": 0.0, "h2-slice": 0.0, "s2-cylinder": None,
                  "h2-vertical-plane": None}

# the six minimal surfaces with non-trivial profiles, default parameters
MAIN_SIX = ("s2-helicoid:1", "s2-unduloid:1.4142135623730951", "h2-helicoid:1",
            "h2-catenoid:1", "h2-horocycle", "h2-gencatenoid:0.6")

_SHORT = {"h": "helicoid", "u": "unduloid", "c": "catenoid", "c0": "horocycle",
          "g": "gencatenoid"}


@dataclass(frozen=True)
class CatalogSpec:
    kind: str
    param: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedError(f"unknown surface kind {self.kind!r}")
        p = self.param
        if p is None and DEFAULT_PARAMS[self.kind] is not None:
            object.__setattr__(self, "param", float(DEFAULT_PARAMS[self.kind]))
            p = self.param
        if p is not None:
            object.__setattr__(self, "param", float(p))
        k = self.kind
        ok = {"s2-helicoid": lambda: p != 0, "h2-helicoid": lambda: p != 0,
              "s2-unduloid": lambda: abs(p) > 1, "h2-catenoid": lambda: p != 0,
              "h2-gencatenoid": lambda: 0 < abs(p) < 1}.get(k, lambda: True)()
        if not ok or (p is not None and not math.isfinite(p)):
            raise PreconditionError(f"parameter {p} outside the admissible range of {k}")

    @classmethod
    def parse(cls, text, space=None):
        """``"s2-helicoid:1"``, ``"h2-horocycle"`` or, with ``space``, short forms ``"u:1.41"``."""
        name, _, value = text.strip().partition(":")
        name = name.strip().lower()
        if name in _SHORT or name in ("slice",):
            if space not in ("s2", "h2"):
                raise PreconditionError(f"short surface name {name!r} needs --space s2|h2")
            name = f"{space}-{_SHORT.get(name, name)}"
        return cls(name, float(value) if value.strip() else None)

    @property
    def sig(self):
        return S2R if self.kind.startswith("s2") else H2R

    @property
    def has_profile(self):
        return self.kind in _PROFILES

    @property
    def is_minimal(self):
        return True

    def __str__(self):
        return self.kind if self.param is None else f"{self.kind}:{self.param:g}"


# ---------------------------------------------------------------------------
# profile ODEs  p'' = F(p)

@dataclass(frozen=True)
class _Profile:
    force: object          # F(p, c)
    dforce: object         # F'(p, c)
    first_integral: object  # I(p, p', c), zero on solutions
    initial: object        # (p(0), p'(0))


_PROFILES = {
    "s2-helicoid": _Profile(lambda p, b: b * b * np.sin(p) * np.cos(p),
                            lambda p, b: b * b * np.cos(2 * p),
                            lambda p, q, b: q * q - 1 - b * b * np.sin(p) ** 2,
                            lambda b: (0.0, 1.0)),
    "s2-unduloid": _Profile(lambda p, a: a * a * np.sin(p) * np.cos(p),
                            lambda p, a: a * a * np.cos(2 * p),
                            lambda p, q, a: 1 + q * q - a * a * np.sin(p) ** 2,
                            lambda a: (math.asin(1 / abs(a)), 0.0)),
    "h2-helicoid": _Profile(lambda p, b: b * b * np.sinh(p) * np.cosh(p),
                            lambda p, b: b * b * np.cosh(2 * p),
                            lambda p, q, b: q * q - 1 - b * b * np.sinh(p) ** 2,
                            lambda b: (0.0, 1.0)),
    "h2-catenoid": _Profile(lambda p, a: a * a * np.sinh(p) * np.cosh(p),
                            lambda p, a: a * a * np.cosh(2 * p),
                            lambda p, q, a: 1 + q * q - a * a * np.sinh(p) ** 2,
                            lambda a: (math.asinh(1 / abs(a)), 0.0)),
    "h2-gencatenoid": _Profile(lambda p, c: c * c * np.cosh(p) * np.sinh(p),
                               lambda p, c: c * c * np.cosh(2 * p),
                               lambda p, q, c: 1 + q * q - c * c * np.cosh(p) ** 2,
                               lambda c: (math.acosh(1 / abs(c)), 0.0)),
}


def _rk4(p, q, dt, F, c):
    k1p, k1q = q, F(p, c)
    k2p, k2q = q + 0.5 * dt * k1q, F(p + 0.5 * dt * k1p, c)
    k3p, k3q = q + 0.5 * dt * k2q, F(p + 0.5 * dt * k2p, c)
    k4p, k4q = q + dt * k3q, F(p + dt * k3p, c)
    return (p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p),
            q + dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q))


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    spec: CatalogSpec
    step: float
    u: np.ndarray
    p: np.ndarray
    dp: np.ndarray
    drift: float

    @property
    def halfspan(self):
        return float(self.u[-1])

    def evaluate(self, u):
        """(p, p', p'', p''') at arbitrary ``u`` within the span (one partial RK4 step from the nearest sample)."""
        u = np.asarray(u, dtype=float)
        if np.any(np.abs(u) > self.halfspan + 1e-12):
            raise DomainError(f"u={np.max(np.abs(u)):.6g} outside the integrated span {self.halfspan:.6g}")
        prof = _PROFILES[self.spec.kind]
        c = self.spec.param
        k = np.clip(np.rint((u - self.u[0]) / self.step).astype(int), 0, len(self.u) - 1)
        dt = u - self.u[k]
        p, q = _rk4(self.p[k], self.dp[k], dt, prof.force, c)
        pp = prof.force(p, c)
        return p, q, pp, prof.dforce(p, c) * q


def domain_halfwidth(spec):
    """Half-width u0 of the maximal profile domain in H^2 x R (improper integral by quadrature)."""
    c = spec.param
    if spec.kind == "h2-catenoid":
        q = lambda s: np.cosh(s) ** 2 + c * c
    elif spec.kind == "h2-gencatenoid":
        q = lambda s: np.cosh(s) ** 2 - c * c
    elif spec.kind == "h2-helicoid":
        q = lambda s: 1.0 + c * c * np.sinh(s) ** 2
    elif spec.kind == "h2-horocycle":
        return math.pi / 2
    else:
        raise UnsupportedError(f"{spec.kind} has no finite profile domain")
    # x = cosh s turns int_1^inf dx / sqrt(q(x)(x^2-1)) into int_0^inf ds / sqrt(q(cosh s))
    with np.errstate(over="ignore"):
        val, err = integrate.quad(lambda s: 1.0 / np.sqrt(q(s)), 0.0, np.inf,
                                  epsabs=1e-11, epsrel=1e-12, limit=200)
    if err > 1e-9:
        raise NumericalError(f"quadrature for u0 did not reach 1e-9 (estimate {err:.2e})")
    return val


def default_halfwidth(spec):
    if spec.kind in ("h2-helicoid", "h2-catenoid", "h2-gencatenoid", "h2-horocycle"):
        return min(DEFAULT_HALFWIDTH, 0.9 * domain_halfwidth(spec))
    return DEFAULT_HALFWIDTH


def default_grid(spec, h=1e-2):
    a = default_halfwidth(spec)
    return ParameterGrid.square(a, DEFAULT_HALFWIDTH, h)


@functools.lru_cache(maxsize=64)
def _solve_cached(kind, param, step, n_steps):
    spec = CatalogSpec(kind, param)
    prof = _PROFILES[kind]
    p0, q0 = prof.initial(param)
    p = np.empty(2 * n_steps + 1)
    q = np.empty_like(p)
    p[n_steps], q[n_steps] = p0, q0
    pf, qf, pb, qb = p0, q0, p0, q0
    for k in range(1, n_steps + 1):
        pf, qf = _rk4(pf, qf, step, prof.force, param)
        pb, qb = _rk4(pb, qb, -step, prof.force, param)
        p[n_steps + k], q[n_steps + k] = pf, qf
        p[n_steps - k], q[n_steps - k] = pb, qb
    u = step * np.arange(-n_steps, n_steps + 1)
    drift = float(np.max(np.abs(prof.first_integral(p, q, param))))
    for a in (u, p, q):
        a.setflags(write=False)
    return ProfileSolution(spec, step, u, p, q, drift)


def solve_profile(spec, step=PROFILE_STEP, halfspan=DEFAULT_HALFWIDTH):
    if not spec.has_profile:
        raise UnsupportedError(f"{spec.kind} has no profile ODE")
    n_steps = int(math.ceil(halfspan / step - 1e-9))
    if spec.kind.startswith("h2"):
        u0 = domain_halfwidth(spec)
        if n_steps * step >= u0:
            raise DomainError(f"halfspan {halfspan} reaches the profile domain boundary u0={u0:.6f}")
    sol = _solve_cached(spec.kind, spec.param, float(step), n_steps)
    if sol.drift > DRIFT_LIMIT:
        raise StepSizeError(f"first-integral drift {sol.drift:.2e} exceeds {DRIFT_LIMIT:g}; reduce the step")
    return sol


# ---------------------------------------------------------------------------
# charts

def _s2_rot(p, dp, ddp, k, U, V, height_u):
    """Chart (sin p cos kv, sin p sin kv, cos p, u or v) with first and second derivatives."""
    s, c = np.sin(p), np.cos(p)
    ck, sk = np.cos(k * V), np.sin(k * V)
    z = np.zeros_like(p * V)
    one = np.ones_like(z)
    h = 1 if height_u else 0
    X = np.stack([s * ck, s * sk, c + z, (U if height_u else V) + z], axis=-1)
    Xp = np.stack([c * ck, c * sk, -s + z, z], axis=-1)       # d/dp of the horizontal part
    Xpp = np.stack([-s * ck, -s * sk, -c + z, z], axis=-1)
    Xu = dp[..., None] * Xp
    Xu[..., 3] = h * one
    Xv = np.stack([-k * s * sk, k * s * ck, z, (1 - h) * one], axis=-1)
    Xuu = ddp[..., None] * Xp + (dp**2)[..., None] * Xpp
    Xuv = (dp * k)[..., None] * np.stack([-c * sk, c * ck, z, z], axis=-1)
    Xvv = -k * k * np.stack([s * ck, s * sk, z, z], axis=-1)
    return X, (Xu, Xv), (Xuu, Xuv, Xvv)


def _h2_rot(p, dp, ddp, k, U, V, height_u):
    """Chart (cosh p, sinh p cos kv, sinh p sin kv, u or v)."""
    s, c = np.sinh(p), np.cosh(p)
    ck, sk = np.cos(k * V), np.sin(k * V)
    z = np.zeros_like(p * V)
    one = np.ones_like(z)
    h = 1 if height_u else 0
    X = np.stack([c + z, s * ck, s * sk, (U if height_u else V) + z], axis=-1)
    Xp = np.stack([s + z, c * ck, c * sk, z], axis=-1)
    Xpp = np.stack([c + z, s * ck, s * sk, z], axis=-1)
    Xu = dp[..., None] * Xp
    Xu[..., 3] = h * one
    Xv = np.stack([z, -k * s * sk, k * s * ck, (1 - h) * one], axis=-1)
    Xuu = ddp[..., None] * Xp + (dp**2)[..., None] * Xpp
    Xuv = (dp * k)[..., None] * np.stack([z, -c * sk, c * ck, z], axis=-1)
    Xvv = -k * k * np.stack([z, s * ck, s * sk, z], axis=-1)
    return X, (Xu, Xv), (Xuu, Xuv, Xvv)


def _gencat(p, dp, ddp, k, U, V):
    """Chart (cosh p cosh kv, sinh p, cosh p sinh kv, u)."""
    s, c = np.sinh(p), np.cosh(p)
    C, Sh = np.cosh(k * V), np.sinh(k * V)
    z = np.zeros_like(p * V)
    X = np.stack([c * C, s + z, c * Sh, U + z], axis=-1)
    Xp = np.stack([s * C, c + z, s * Sh, z], axis=-1)
    Xpp = np.stack([c * C, s + z, c * Sh, z], axis=-1)
    Xu = dp[..., None] * Xp
    Xu[..., 3] = 1.0
    Xv = k * np.stack([c * Sh, z, c * C, z], axis=-1)
    Xuu = ddp[..., None] * Xp + (dp**2)[..., None] * Xpp
    Xuv = (dp * k)[..., None] * np.stack([s * Sh, z, s * C, z], axis=-1)
    Xvv = k * k * np.stack([c * C, z, c * Sh, z], axis=-1)
    return X, (Xu, Xv), (Xuu, Xuv, Xvv)


def _horocycle(U, V):
    c, s = np.cos(U), np.sin(U)
    sec = 1.0 / c
    tan = s / c
    d_sec = sec * tan
    dd_sec = sec * (tan**2 + sec**2)
    z = np.zeros_like(U * V)
    one = np.ones_like(z)
    ap, am = (V**2 + 1) / 2, (V**2 - 1) / 2
    X = np.stack([ap * sec + c / 2, V * sec, am * sec + c / 2, U + z], axis=-1)
    Xu = np.stack([ap * d_sec - s / 2, V * d_sec, am * d_sec - s / 2, one], axis=-1)
    Xv = np.stack([V * sec, sec + z, V * sec, z], axis=-1)
    Xuu = np.stack([ap * dd_sec - c / 2, V * dd_sec, am * dd_sec - c / 2, z], axis=-1)
    Xuv = np.stack([V * d_sec, d_sec + z, V * d_sec, z], axis=-1)
    Xvv = np.stack([sec + z, z, sec + z, z], axis=-1)
    return X, (Xu, Xv), (Xuu, Xuv, Xvv)


def _slice(U, V, t, kappa):
    z = np.zeros_like(U * V)
    if kappa == 1:
        cu, su, cv, sv = np.cos(U), np.sin(U), np.cos(V), np.sin(V)
        X = np.stack([cu * cv, cu * sv, su + z, t + z], axis=-1)
        Xu = np.stack([-su * cv, -su * sv, cu + z, z], axis=-1)
        Xv = np.stack([-cu * sv, cu * cv, z, z], axis=-1)
        Xuu = np.stack([-cu * cv, -cu * sv, -su + z, z], axis=-1)
        Xuv = np.stack([su * sv, -su * cv, z, z], axis=-1)
        Xvv = np.stack([-cu * cv, -cu * sv, z, z], axis=-1)
    else:
        cu, su, cv, sv = np.cosh(U), np.sinh(U), np.cosh(V), np.sinh(V)
        X = np.stack([cu * cv, su + z, cu * sv, t + z], axis=-1)
        Xu = np.stack([su * cv, cu + z, su * sv, z], axis=-1)
        Xv = np.stack([cu * sv, z, cu * cv, z], axis=-1)
        Xuu = np.stack([cu * cv, su + z, cu * sv, z], axis=-1)
        Xuv = np.stack([su * sv, z, su * cv, z], axis=-1)
        Xvv = np.stack([cu * cv, z, cu * sv, z], axis=-1)
    return X, (Xu, Xv), (Xuu, Xuv, Xvv)


def _vertical(U, V, kappa):
    z = np.zeros_like(U * V)
    one = np.ones_like(z)
    if kappa == 1:
        c, s = np.cos(U), np.sin(U)
        X = np.stack([c + z, s + z, z, V + z], axis=-1)
        Xu = np.stack([-s + z, c + z, z, z], axis=-1)
        Xuu = np.stack([-c + z, -s + z, z, z], axis=-1)
    else:
        c, s = np.cosh(U), np.sinh(U)
        X = np.stack([c + z, s + z, z, V + z], axis=-1)
        Xu = np.stack([s + z, c + z, z, z], axis=-1)
        Xuu = np.stack([c + z, s + z, z, z], axis=-1)
    Xv = np.stack([z, z, z, one], axis=-1)
    return X, (Xu, Xv), (Xuu, z[..., None] * np.zeros(4), z[..., None] * np.zeros(4))


def _chart_jets_fn(spec, halfspan, step):
    k, c = spec.kind, spec.param
    if spec.has_profile:
        prof = solve_profile(spec, step, halfspan)

        def jets(U, V):
            U = np.asarray(U, dtype=float)
            V = np.asarray(V, dtype=float)
            p, dp, ddp, _ = prof.evaluate(U)
            if k == "s2-helicoid":
                return _s2_rot(p, dp, ddp, c, U, V, height_u=False)
            if k == "s2-unduloid":
                return _s2_rot(p, dp, ddp, c, U, V, height_u=True)
            if k == "h2-helicoid":
                return _h2_rot(p, dp, ddp, c, U, V, height_u=False)
            if k == "h2-catenoid":
                return _h2_rot(p, dp, ddp, c, U, V, height_u=True)
            return _gencat(p, dp, ddp, c, U, V)
        return jets
    if k == "h2-horocycle":
        return _horocycle
    if k in ("s2-slice", "h2-slice"):
        return lambda U, V: _slice(np.asarray(U, float), np.asarray(V, float), c, spec.sig.kappa)
    return lambda U, V: _vertical(np.asarray(U, float), np.asarray(V, float), spec.sig.kappa)


def chart(spec, halfspan=None, step=PROFILE_STEP):
    """Closed-form chart of ``spec`` with analytic first and second derivatives."""
    if halfspan is None:
        halfspan = default_halfwidth(spec)
    jets = _chart_jets_fn(spec, halfspan, step)
    conformal = spec.kind not in ("s2-slice", "h2-slice")
    return Chart(spec.sig, lambda U, V: jets(U, V)[0], lambda U, V: jets(U, V)[1],
                 lambda U, V: jets(U, V)[2], conformal=conformal, name=str(spec))


# ---------------------------------------------------------------------------
# closed-form fundamental data

_OFF = np.array([[0.0, 1.0], [1.0, 0.0]])
_DIAG = np.array([[1.0, 0.0], [0.0, -1.0]])


def _u_functions(spec, u, step):
    """All u-dependent closed forms: (g, g', g'', S, S', T, T', nu, nu') as arrays over u."""
    k, c = spec.kind, spec.param
    n = len(u)
    I = np.eye(2)
    if spec.has_profile:
        p, dp, ddp, dddp = solve_profile(spec, step, float(np.max(np.abs(u)))).evaluate(u)
        if k in ("s2-helicoid", "h2-helicoid"):
            lam, dlam = dp**2, 2 * dp * ddp
            ddlam = 2 * ddp**2 + 2 * dp * dddp
        else:
            lam, dlam = 1 + dp**2, 2 * dp * ddp
            ddlam = 2 * ddp**2 + 2 * dp * dddp
        if k == "s2-helicoid":
            a = -c * np.cos(p) / lam
            da = c * np.sin(p) * dp / lam + c * np.cos(p) * dlam / lam**2
            M = _OFF
            T = np.stack([0 * u, 1 / lam], -1)
            dT = np.stack([0 * u, -dlam / lam**2], -1)
            nu = c * np.sin(p) / dp
            dnu = c * np.cos(p) - c * np.sin(p) * ddp / dp**2
        elif k == "h2-helicoid":
            a = -c * np.cosh(p) / lam
            da = -c * np.sinh(p) * dp / lam + c * np.cosh(p) * dlam / lam**2
            M = _OFF
            T = np.stack([0 * u, 1 / lam], -1)
            dT = np.stack([0 * u, -dlam / lam**2], -1)
            nu = c * np.sinh(p) / dp
            dnu = c * np.cosh(p) - c * np.sinh(p) * ddp / dp**2
        elif k == "s2-unduloid":
            a = -c * np.cos(p) / lam
            da = c * np.sin(p) * dp / lam + c * np.cos(p) * dlam / lam**2
            M = _DIAG
            T = np.stack([1 / lam, 0 * u], -1)
            dT = np.stack([-dlam / lam**2, 0 * u], -1)
            nu = dp / (c * np.sin(p))
            dnu = ddp / (c * np.sin(p)) - dp**2 * np.cos(p) / (c * np.sin(p) ** 2)
        elif k == "h2-catenoid":
            a = -c * np.cosh(p) / lam
            da = -c * np.sinh(p) * dp / lam + c * np.cosh(p) * dlam / lam**2
            M = _DIAG
            T = np.stack([1 / lam, 0 * u], -1)
            dT = np.stack([-dlam / lam**2, 0 * u], -1)
            nu = dp / (c * np.sinh(p))
            dnu = ddp / (c * np.sinh(p)) - dp**2 * np.cosh(p) / (c * np.sinh(p) ** 2)
        else:  # h2-gencatenoid
            a = -c * np.sinh(p) / lam
            da = -c * np.cosh(p) * dp / lam + c * np.sinh(p) * dlam / lam**2
            M = _DIAG
            T = np.stack([1 / lam, 0 * u], -1)
            dT = np.stack([-dlam / lam**2, 0 * u], -1)
            nu = dp / (c * np.cosh(p))
            dnu = ddp / (c * np.cosh(p)) - dp**2 * np.sinh(p) / (c * np.cosh(p) ** 2)
        g, dg, ddg = lam[:, None, None] * I, dlam[:, None, None] * I, ddlam[:, None, None] * I
        S, dS = a[:, None, None] * M, da[:, None, None] * M
        return g, dg, ddg, S, dS, T, dT, nu, dnu
    zero2 = np.zeros((n, 2, 2))
    zero1 = np.zeros((n, 2))
    if k == "h2-horocycle":
        cu, su = np.cos(u), np.sin(u)
        lam = 1 / cu**2
        dlam = 2 * su / cu**3
        ddlam = 2 / cu**2 + 6 * su**2 / cu**4
        g, dg, ddg = lam[:, None, None] * I, dlam[:, None, None] * I, ddlam[:, None, None] * I
        S, dS = (-cu)[:, None, None] * _DIAG, su[:, None, None] * _DIAG
        T = np.stack([cu**2, 0 * u], -1)
        dT = np.stack([-2 * cu * su, 0 * u], -1)
        return g, dg, ddg, S, dS, T, dT, su, cu
    if k in ("s2-slice", "h2-slice"):
        if spec.sig.kappa == 1:
            gvv, dgvv, ddgvv, nuval = np.cos(u) ** 2, -np.sin(2 * u), -2 * np.cos(2 * u), -1.0
        else:
            gvv, dgvv, ddgvv, nuval = np.cosh(u) ** 2, np.sinh(2 * u), 2 * np.cosh(2 * u), 1.0
        g = np.zeros((n, 2, 2))
        g[:, 0, 0], g[:, 1, 1] = 1.0, gvv
        dg, ddg = np.zeros_like(g), np.zeros_like(g)
        dg[:, 1, 1], ddg[:, 1, 1] = dgvv, ddgvv
        return g, dg, ddg, zero2, zero2, zero1, zero1, np.full(n, nuval), np.zeros(n)
    # vertical cylinder / plane: flat metric, N constant
    g = np.broadcast_to(I, (n, 2, 2)).copy()
    T = np.stack([0 * u, 1 + 0 * u], -1)
    return g, zero2, zero2, zero2, zero2, T, zero1, np.zeros(n), np.zeros(n)


def fundamental_closed_form(spec, grid, step=PROFILE_STEP):
    """FundamentalData from the displayed formulas, with exact derivative jets."""
    g, dg1, ddg1, S, dS1, T, dT1, nu, dnu1 = _u_functions(spec, grid.u, step)
    nv = grid.n_v
    rep = lambda a: np.repeat(a[:, None], nv, axis=1)
    shp = grid.shape
    dg = np.zeros(shp + (2, 2, 2))
    dg[:, :, 0] = rep(dg1)
    ddg = np.zeros(shp + (2, 2, 2, 2))
    ddg[:, :, 0, 0] = rep(ddg1)
    dS = np.zeros(shp + (2, 2, 2))
    dS[:, :, 0] = rep(dS1)
    dT = np.zeros(shp + (2, 2))
    dT[:, :, 0] = rep(dT1)
    dnu = np.zeros(shp + (2,))
    dnu[:, :, 0] = rep(dnu1)
    return FundamentalData(spec.sig, grid, rep(g), rep(S), rep(T), rep(nu), dg=dg, ddg=ddg,
                           dS=dS, dT=dT, dnu=dnu, analytic=True, label=str(spec))


# ---------------------------------------------------------------------------
# conjugate pairs

def helicoid_partner(spec):
    """The helicoid conjugate to ``spec`` (same sign convention), per family."""
    k, c = spec.kind, spec.param
    if k == "s2-unduloid":
        return CatalogSpec("s2-helicoid", math.copysign(math.sqrt(c * c - 1), c))
    if k == "h2-catenoid":
        return CatalogSpec("h2-helicoid", math.copysign(math.sqrt(1 + c * c), c))
    if k == "h2-horocycle":
        return CatalogSpec("h2-helicoid", 1.0)
    if k == "h2-gencatenoid":
        return CatalogSpec("h2-helicoid", math.copysign(math.sqrt(1 - c * c), c))
    raise UnsupportedError(f"{k} has no helicoid conjugate in the catalog")


def _pair_relation(a, b):
    """Defect of the parameter relation, or None when (a, b) is not a known pair."""
    if b.kind not in ("s2-helicoid", "h2-helicoid"):
        return None
    al, be = a.param, b.param
    if a.kind == "s2-unduloid" and b.kind == "s2-helicoid":
        return abs(al * al - 1 - be * be), al * be > 0
    if a.kind == "h2-catenoid" and b.kind == "h2-helicoid":
        return abs(be * be - 1 - al * al), al * be > 0
    if a.kind == "h2-horocycle" and b.kind == "h2-helicoid":
        return abs(be - 1), True
    if a.kind == "h2-gencatenoid" and b.kind == "h2-helicoid":
        return abs(be * be + al * al - 1), al * be > 0
    return None


def _shared_y(spec, prof_vals, u):
    """The function y of the shared first-order ODE, with y' (analytic)."""
    k, c = spec.kind, spec.param
    if k == "h2-horocycle":
        return 1 / np.cos(u), np.sin(u) / np.cos(u) ** 2
    p, dp = prof_vals[0], prof_vals[1]
    if k == "s2-unduloid" or k == "s2-helicoid":
        return c * np.cos(p), -c * np.sin(p) * dp
    if k in ("h2-catenoid", "h2-helicoid"):
        return c * np.cosh(p), c * np.sinh(p) * dp
    return c * np.sinh(p), c * np.cosh(p) * dp


def conjugate_pair_check(a, b, grid=None, step=PROFILE_STEP):
    """Verify that b is the conjugate of a on a common grid (algebraic route).

    Returns a dict of max deviations: shared ODE quantity y, its ODE residual
    on both sides, conformal factors, S_b - J S_a, T_b - J T_a, nu_b - nu_a.
    """
    from .associate import rotation_field

    rel = _pair_relation(a, b)
    if rel is None:
        raise PreconditionError(f"({a}, {b}) is not one of the conjugate pair families")
    defect, same_sign = rel
    if defect > 1e-12:
        raise PreconditionError(f"parameter relation for ({a}, {b}) violated by {defect:.3e}")
    if not same_sign:
        raise PreconditionError(f"parameters of ({a}, {b}) must have the same sign")
    if grid is None:
        ha = min(default_halfwidth(a), default_halfwidth(b))
        grid = ParameterGrid.square(ha, DEFAULT_HALFWIDTH, 1e-2)
    u = grid.u
    span = float(np.max(np.abs(u)))
    va = solve_profile(a, step, span).evaluate(u) if a.has_profile else None
    vb = solve_profile(b, step, span).evaluate(u)
    ya, dya = _shared_y(a, va, u)
    yb, dyb = _shared_y(b, vb, u)
    if a.kind == "h2-gencatenoid":
        ode = lambda y, dy: dy**2 - (y**2 + a.param**2) * (y**2 - b.param**2)
    elif a.kind == "h2-horocycle":
        # the degenerate member: y = 1/cos u = cosh(phi) of H_1
        ode = lambda y, dy: dy**2 - y**2 * (y**2 - 1.0)
    else:
        ode = lambda y, dy: dy**2 - (y**2 - a.param**2) * (y**2 - b.param**2)
    da = fundamental_closed_form(a, grid, step)
    db = fundamental_closed_form(b, grid, step)
    J = rotation_field(da)
    out = {
        "y": float(np.max(np.abs(ya - yb))),
        "ode_a": float(np.max(np.abs(ode(ya, dya)))),
        "ode_b": float(np.max(np.abs(ode(yb, dyb)))),
        "metric": float(np.max(np.abs(da.g - db.g))),
        "S": float(np.max(np.abs(db.S - J @ da.S))),
        "T": float(np.max(np.abs(db.T - np.einsum("...ij,...j->...i", J, da.T)))),
        "nu": float(np.max(np.abs(db.nu - da.nu))),
    }
    out["max"] = max(out.values())
    return out


CONJUGATE_PAIRS = (("s2-unduloid:1.4142135623730951", "s2-helicoid:1"),
                   ("h2-catenoid:1", "h2-helicoid:1.4142135623730951"),
                   ("h2-horocycle", "h2-helicoid:1"),
                   ("h2-gencatenoid:0.6", "h2-helicoid:0.8"))


def spec_from_string(text):
    return CatalogSpec.parse(text)
