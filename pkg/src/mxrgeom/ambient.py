"""Linear algebra of the ambient space E^{n+2}.

E^{n+2} is R^{n+2} (kappa=+1, S^n x R) or the Lorentz space L^{n+2}
(kappa=-1, H^n x R), with bilinear form G = diag(kappa, 1, ..., 1).
Coordinates are indexed 0..n+1; coordinate n+1 is the vertical direction.

All functions broadcast over leading axes, so a whole grid of vectors
(shape ``(..., n+2)``) or frames (shape ``(..., n+2, n+2)``) can be passed.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, StructuralError

GROUP_TOL_CONSTRUCTED = 1e-10
GROUP_TOL_TRANSPORTED = 1e-6


@dataclass(frozen=True)
class Signature:
    kappa: int
    n: int = 2

    def __post_init__(self):
        if self.kappa not in (1, -1):
            raise ValueError(f"kappa must be +1 or -1, got {self.kappa}")
        if self.n < 2 or self.n + 2 > 16:
            raise ValueError(f"n must satisfy 2 <= n <= 14, got {self.n}")

    @property
    def dim(self):
        return self.n + 2

    @property
    def G(self):
        return np.diag(self.diagonal)

    @property
    def diagonal(self):
        d = np.ones(self.dim)
        d[0] = self.kappa
        return d

    @property
    def name(self):
        return ("S" if self.kappa == 1 else "H") + f"{self.n}xR"


S2R = Signature(1, 2)
H2R = Signature(-1, 2)


def _check_dim(x, sig, what="vector"):
    if np.shape(x)[-1] != sig.dim:
        raise StructuralError(
            f"{what} has trailing dimension {np.shape(x)[-1]}, expected {sig.dim} for {sig.name}")


def g_inner(u, v, sig):
    """kappa*u0*v0 + sum_{i>=1} ui*vi, broadcast over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_dim(u, sig)
    _check_dim(v, sig)
    return np.sum(u * v * sig.diagonal, axis=-1)


def horizontal_form(p, sig):
    """G-quadratic form of the first n+1 coordinates (equals kappa on the model)."""
    p = np.asarray(p, dtype=float)
    h = p[..., : sig.n + 1]
    return np.sum(h * h * sig.diagonal[: sig.n + 1], axis=-1)


def model_residual(p, sig):
    """|horizontal_form - kappa|; for kappa=-1 points with x0 <= 0 count as inf."""
    r = np.abs(horizontal_form(p, sig) - sig.kappa)
    if sig.kappa == -1:
        r = np.where(np.asarray(p)[..., 0] > 0, r, np.inf)
    return r


def project_to_model(p, sig):
    """Rescale the horizontal part of ``p`` onto M^n, leaving the height untouched."""
    p = np.array(p, dtype=float)
    _check_dim(p, sig, "point")
    q = horizontal_form(p, sig)
    if sig.kappa == 1:
        bad = ~(q > 0)
        scale = np.sqrt(np.where(bad, 1.0, q))
    else:
        bad = ~((q < 0) & (p[..., 0] > 0))
        scale = np.sqrt(np.where(bad, 1.0, -q))
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0]
        raise DomainError(f"point cannot be rescaled onto {sig.name[:2]}", node=idx if p.ndim > 1 else None)
    out = p.copy()
    out[..., : sig.n + 1] /= scale[..., None]
    return out


def group_defect(A, sig):
    """max-norm of A^t G A - G (per leading index)."""
    A = np.asarray(A, dtype=float)
    G = sig.G
    D = np.swapaxes(A, -1, -2) @ G @ A - G
    return np.max(np.abs(D), axis=(-2, -1))


def in_group(A, sig, tol=GROUP_TOL_CONSTRUCTED):
    """Membership test for SO+(E^{n+2}); for kappa=-1 the branch test is A00 > 0."""
    A = np.asarray(A, dtype=float)
    ok = (group_defect(A, sig) <= tol) & (np.abs(np.linalg.det(A) - 1.0) <= tol)
    if sig.kappa == -1:
        ok &= A[..., 0, 0] > 0
    return ok


def g_inverse(A, sig):
    """Inverse of a G-orthogonal matrix: G A^t G."""
    G = sig.G
    return G @ np.swapaxes(A, -1, -2) @ G


def is_so(H, sig, tol=0.0):
    H = np.asarray(H, dtype=float)
    G = sig.G
    return np.max(np.abs(np.swapaxes(H, -1, -2) @ G + G @ H)) <= tol


def gram_schmidt(A, diagonal, max_defect=0.1):
    """Gram-Schmidt over the columns of ``A`` (in order) for the form diag(diagonal).

    Columns are normalised so that <c_k, c_k> = diagonal[k]. Raises
    NumericalError when the input is further than ``max_defect`` from the group
    or a Gram step degenerates.
    """
    A = np.array(A, dtype=float)
    d = np.asarray(diagonal, dtype=float)
    G = np.diag(d)
    defect = np.max(np.abs(np.swapaxes(A, -1, -2) @ G @ A - G), axis=(-2, -1))
    if np.any(defect > max_defect):
        raise NumericalError(f"frame too far from the group (defect {np.max(defect):.3g})")
    m = A.shape[-1]
    Q = np.empty_like(A)
    for k in range(m):
        v = A[..., :, k].copy()
        for j in range(k):
            qj = Q[..., :, j]
            c = np.sum(v * qj * d, axis=-1) / d[j]
            v -= c[..., None] * qj
        nrm2 = np.sum(v * v * d, axis=-1) * d[k]
        if np.any(nrm2 <= 1e-12):
            raise NumericalError(f"degenerate Gram-Schmidt step at column {k}")
        Q[..., :, k] = v / np.sqrt(nrm2)[..., None]
    return Q


def reorthonormalize(A, sig):
    """Project a near-group frame back onto SO+(E^{n+2}) by G-Gram-Schmidt on columns 0..n+1."""
    A = np.asarray(A, dtype=float)
    _check_dim(A, sig, "frame")
    return gram_schmidt(A, sig.diagonal)
