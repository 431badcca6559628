"""Property suites for the hull-map assumptions, plus the ball non-example."""
import numpy as np
import pytest

from consensus_hulls.hulls import (
    BoxSpec,
    ConvexSpec,
    DirectionalSpec,
    IntersectionSpec,
    WarpedSpec,
    build_hull,
)
from consensus_hulls.property_suite import (
    ball_monotonicity_violations,
    ball_subset,
    check_idempotence,
    check_inclusion,
    check_interior_and_boundary,
    check_monotonicity,
    enclosing_ball,
    monotonicity_witness_triangle,
    random_point_set,
    run_assumption_suite,
)
from consensus_hulls.warps import norm_rotation

ALL_SPECS = [
    ConvexSpec(),
    BoxSpec(),
    DirectionalSpec(),
    WarpedSpec(ConvexSpec(), norm_rotation(0.04)),
    IntersectionSpec(BoxSpec(), DirectionalSpec()),
]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind)
def test_suite_passes_per_kind(spec):
    report = run_assumption_suite(spec, instances=120, seed=19, interior_instances=60)
    assert report.passed, report.failures[:5]


def test_box_p3_properties():
    rng = np.random.default_rng(4)
    for i in range(60):
        m = int(rng.integers(1, 8))
        pts = rng.uniform(-5, 5, size=(m, 3))
        assert not check_inclusion(BoxSpec(), pts)
        assert not check_monotonicity(BoxSpec(), pts, rng)
        assert not check_interior_and_boundary(BoxSpec(), pts)


def test_idempotence_collinear_and_singleton():
    for pts in ([(1.0, 1.0)], [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]):
        for spec in ALL_SPECS:
            assert not check_idempotence(spec, np.asarray(pts))


def test_warped_idempotence_is_checked_in_warp_space():
    spec = WarpedSpec(ConvexSpec(), norm_rotation(0.04))
    pts = np.array([(2.0, 0.0), (1.0, 5.0), (0.0, -1.0)])
    assert not check_idempotence(spec, pts)


class TestEnclosingBallNonExample:
    def test_ball_is_tight(self):
        pts = np.array([[0.0, 0.0], [2.0, 0.0]])
        center, radius = enclosing_ball(pts)
        assert np.allclose(center, [1.0, 0.0], atol=1e-12)
        assert radius == pytest.approx(1.0, abs=1e-12)

    def test_ball_contains_points(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            pts = rng.uniform(-5, 5, size=(rng.integers(2, 9), 2))
            center, radius = enclosing_ball(pts)
            dists = np.linalg.norm(pts - center, axis=1)
            assert dists.max() <= radius + 1e-9

    def test_witness_triangle_violates_monotonicity(self):
        # the ball of the shortest edge escapes the ball of the triangle,
        # so the monotonicity suite must flag the enclosing ball
        tri = monotonicity_witness_triangle()
        problems = ball_monotonicity_violations(tri)
        assert problems
        edges = [(0, 1), (0, 2), (1, 2)]
        lengths = [np.linalg.norm(tri[i] - tri[j]) for i, j in edges]
        i, j = edges[int(np.argmin(lengths))]
        assert not ball_subset(enclosing_ball(tri[[i, j]]), enclosing_ball(tri))

    def test_hull_kinds_pass_same_witness(self):
        tri = monotonicity_witness_triangle()
        rng = np.random.default_rng(0)
        for spec in ALL_SPECS:
            for _ in range(20):
                assert not check_monotonicity(spec, tri, rng)


class TestDiameterContinuityUnderPerturbation:
    """Statistical surrogate for continuity of the hull diameter map:
    perturbing the source by delta moves the diameter by O(delta)."""

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind)
    def test_proportional_response(self, spec):
        rng = np.random.default_rng(31)
        ratios = []
        for delta in (1e-3, 1e-4, 1e-5):
            worst = 0.0
            for _ in range(8):
                pts = rng.uniform(-5, 5, size=(rng.integers(2, 7), 2))
                base = build_hull(spec, pts).geodesic_diameter(8, 128)
                for _ in range(3):
                    noise = rng.uniform(-delta, delta, size=pts.shape)
                    moved = build_hull(spec, pts + noise).geodesic_diameter(8, 128)
                    worst = max(worst, abs(moved - base))
            ratios.append(worst / delta)
        # bounded response ratio at every scale: no blow-up as delta shrinks
        assert max(ratios) < 50.0


def test_random_point_set_shapes():
    rng = np.random.default_rng(0)
    sizes = set()
    for _ in range(200):
        pts = random_point_set(rng)
        assert pts.ndim == 2 and pts.shape[1] == 2
        sizes.add(pts.shape[0])
    assert 1 in sizes and max(sizes) >= 8
