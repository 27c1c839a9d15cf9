import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from mxrgeom.ambient import (H2R, S2R, Signature, g_inner, group_defect, in_group, is_so,
                             project_to_model, reorthonormalize)
from mxrgeom.errors import DomainError, NumericalError, StructuralError

vec4 = st.lists(st.floats(-10, 10), min_size=4, max_size=4).map(np.array)


def random_so(sig, rng, scale=1.0):
    X = rng.normal(size=(4, 4)) * scale
    G = sig.G
    return X - G @ X.T @ G        # H^t G + G H = 0


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature(0)
    with pytest.raises(ValueError):
        Signature(1, 1)
    with pytest.raises(ValueError):
        Signature(1, 15)
    assert S2R.name == "S2xR" and H2R.name == "H2xR"
    assert np.array_equal(H2R.G @ H2R.G, np.eye(4))


def test_g_inner_examples():
    E0 = np.array([1.0, 0, 0, 0])
    assert g_inner(E0, E0, H2R) == -1
    assert g_inner(E0, E0, S2R) == 1
    null = np.array([1.0, 1, 0, 0])
    assert g_inner(null, null, H2R) == 0


def test_g_inner_dimension_mismatch():
    with pytest.raises(StructuralError):
        g_inner(np.zeros(3), np.zeros(4), S2R)


@given(vec4, vec4, vec4, st.floats(-3, 3))
def test_g_inner_bilinear_symmetric(u, v, w, a):
    for sig in (S2R, H2R):
        assert np.isclose(g_inner(u, v, sig), g_inner(v, u, sig))
        assert np.isclose(g_inner(a * u + w, v, sig), a * g_inner(u, v, sig) + g_inner(w, v, sig),
                          atol=1e-9 * (1 + np.abs(u).max() * np.abs(v).max() * (1 + abs(a))))
    assert np.isclose(g_inner(u, u, S2R), np.dot(u, u))


def test_project_to_model_examples():
    assert np.allclose(project_to_model([2.0, 0, 0, 5], S2R), [1, 0, 0, 5])
    assert np.allclose(project_to_model([2.0, 0, 0, 3], H2R), [1, 0, 0, 3])
    with pytest.raises(DomainError):
        project_to_model([-2.0, 0, 0, 0], H2R)
    with pytest.raises(DomainError):
        project_to_model([1.0, 1.0, 0, 0], H2R)


def test_reorthonormalize_examples():
    assert np.allclose(reorthonormalize(np.eye(4), S2R), np.eye(4))
    c, s = np.cos(0.3), np.sin(0.3)
    R = np.eye(4)
    R[:2, :2] = [[c, -s], [s, c]]
    assert np.allclose(reorthonormalize(R, S2R), R, atol=1e-15)
    rng = np.random.default_rng(0)
    for sig in (S2R, H2R):
        A = expm(1e-3 * random_so(sig, rng))
        A = A + 1e-9 * rng.normal(size=(4, 4))
        B = reorthonormalize(A, sig)
        assert group_defect(B, sig) <= 1e-14
        assert np.max(np.abs(reorthonormalize(B, sig) - B)) <= 1e-14
        assert in_group(B, sig)


def test_reorthonormalize_rejects_far_input():
    with pytest.raises(NumericalError):
        reorthonormalize(2 * np.eye(4), S2R)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([S2R, H2R]))
def test_group_closed_under_products(seed, sig):
    rng = np.random.default_rng(seed)
    A = expm(random_so(sig, rng, 0.5))
    B = expm(random_so(sig, rng, 0.5))
    assert is_so(random_so(sig, rng), sig, 1e-12)
    assert group_defect(A @ B, sig) <= 1e-9 * max(1, np.abs(A @ B).max() ** 2)


def test_lorentz_branch():
    flip = np.diag([-1.0, -1.0, 1.0, 1.0])     # det 1, but A00 < 0
    assert not in_group(flip, H2R)
    assert in_group(flip, S2R)
