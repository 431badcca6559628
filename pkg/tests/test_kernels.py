"""The jit and numpy kernel paths must agree (to summation-order noise)."""
import numpy as np
import pytest

from consensus_hulls import _kernels as K
from consensus_hulls.warps import norm_rotation

rng = np.random.default_rng(123)


def _polygon_fixture():
    verts = np.array([[0.0, 0.0], [4.0, 0.0], [5.0, 3.0], [2.0, 5.0], [-1.0, 2.0]])
    edges = np.roll(verts, -1, axis=0) - verts
    normals = np.stack((edges[:, 1], -edges[:, 0]), axis=1)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = (normals * verts).sum(axis=1)
    return verts, normals, offsets


def test_pairwise_max_dist_paths_agree():
    pts = rng.uniform(-7, 7, size=(80, 2))
    jit = K._pairwise_max_dist_loops(np.ascontiguousarray(pts))
    ref = K._pairwise_max_dist_np(pts)
    assert jit == pytest.approx(ref, abs=1e-12)


def test_pullback_length_paths_agree():
    u0 = np.array([2.0, 1.0])
    u1 = np.array([-3.0, 4.0])
    jit = K._pullback_length_loops(u0[0], u0[1], u1[0], u1[1], 0.04, 500)
    ref = K._pullback_length_np(u0[0], u0[1], u1[0], u1[1], 0.04, 500)
    assert jit == pytest.approx(ref, rel=1e-12)


def test_pullback_length_matches_warp_inverse():
    # the kernel's inline inverse must match the WarpMap inverse
    warp = norm_rotation(0.04)
    u0 = np.array([2.0, 1.0])
    u1 = np.array([-3.0, 4.0])
    n = 400
    lams = np.linspace(0, 1, n + 1)[:, None]
    seg = u0 * (1 - lams) + u1 * lams
    pulled = warp.inverse(seg)
    expect = np.linalg.norm(np.diff(pulled, axis=0), axis=1).sum()
    got = K.pullback_length(u0, u1, 0.04, n)
    assert got == pytest.approx(expect, rel=1e-12)


def test_pullback_max_paths_agree():
    samples = rng.uniform(-5, 5, size=(40, 2))
    jit = K._pullback_max_loops(np.ascontiguousarray(samples), 0.04, 64)
    ref = K._pullback_max_np(samples, 0.04, 64)
    assert jit == pytest.approx(ref, rel=1e-12)


def test_polygon_distance_paths_agree():
    verts, normals, offsets = _polygon_fixture()
    queries = rng.uniform(-4, 8, size=(500, 2))
    jit = K._polygon_distance_loops(
        verts,
        np.ascontiguousarray(normals[:, 0]),
        np.ascontiguousarray(normals[:, 1]),
        offsets,
        queries,
    )
    ref = K._polygon_distance_np(verts, normals[:, 0], normals[:, 1], offsets, queries)
    assert np.allclose(jit, ref, atol=1e-12)


def test_polygon_margin_paths_agree():
    verts, normals, offsets = _polygon_fixture()
    queries = rng.uniform(-4, 8, size=(500, 2))
    jit = K._polygon_margin_loops(
        np.ascontiguousarray(normals[:, 0]),
        np.ascontiguousarray(normals[:, 1]),
        offsets,
        queries,
    )
    ref = K._polygon_margin_np(normals[:, 0], normals[:, 1], offsets, queries)
    assert np.allclose(jit, ref, atol=1e-12)


def test_public_kernels_smoke():
    pts = rng.uniform(-3, 3, size=(30, 2))
    assert K.pairwise_max_dist(pts) > 0
    verts, normals, offsets = _polygon_fixture()
    d = K.polygon_distance(verts, normals, offsets, np.array([[1.0, 1.0]]))
    assert d[0] == 0.0
    m = K.polygon_margin(normals, offsets, np.array([[1.0, 1.0]]))
    assert m[0] > 0
