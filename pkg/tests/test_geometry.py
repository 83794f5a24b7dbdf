import numpy as np
import pytest

from borefield.errors import DegenerateDomainError, ValidationError
from borefield.geometry import DomainPolygon, nearest_point_in_domain, sample_domain

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


@pytest.fixture()
def unit_square():
    return DomainPolygon(UNIT_SQUARE)


@pytest.fixture()
def square_with_hole():
    # Centered square hole with half the side length (25% of the area).
    return DomainPolygon(
        [[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]],
        holes=[[[1.0, 1.0], [3.0, 1.0], [3.0, 3.0], [1.0, 3.0]]],
    )


def lshape_domain():
    # 60 x 40 L-shape (upper-right 30 x 20 notch) with an 8 x 6 interior hole.
    outer = [[0, 0], [60, 0], [60, 20], [30, 20], [30, 40], [0, 40]]
    hole = [[10, 8], [18, 8], [18, 14], [10, 14]]
    return DomainPolygon(outer, holes=[hole])


class TestDomainValidation:
    def test_area(self, square_with_hole):
        assert square_with_hole.area == pytest.approx(12.0)

    def test_rejects_self_intersecting_ring(self):
        with pytest.raises(ValidationError, match="self-intersecting"):
            DomainPolygon([[0, 0], [1, 1], [1, 0], [0, 1]])

    def test_rejects_hole_outside(self):
        with pytest.raises(ValidationError, match="not inside"):
            DomainPolygon(UNIT_SQUARE, holes=[[[2, 2], [3, 2], [3, 3], [2, 3]]])

    def test_rejects_overlapping_holes(self):
        with pytest.raises(ValidationError, match="overlap"):
            DomainPolygon(
                [[0, 0], [10, 0], [10, 10], [0, 10]],
                holes=[
                    [[1, 1], [5, 1], [5, 5], [1, 5]],
                    [[4, 4], [6, 4], [6, 6], [4, 6]],
                ],
            )

    def test_rejects_too_few_vertices(self):
        with pytest.raises(ValidationError):
            DomainPolygon([[0, 0], [1, 0]])


class TestContainment:
    def test_inside_outside(self, unit_square):
        pts = np.array([[0.5, 0.5], [1.5, 0.5], [-0.1, 0.5], [0.99, 0.01]])
        assert list(unit_square.contains(pts)) == [True, False, False, True]

    def test_boundary_counts_as_inside(self, unit_square):
        pts = np.array([[0.0, 0.5], [1.0, 1.0], [0.3, 0.0], [1.0, 0.25]])
        assert unit_square.contains(pts).all()
        # Raw parity has no boundary contract; points on the right edge fall
        # outside under the half-open crossing convention.
        assert not unit_square.contains(
            np.array([[1.0, 0.25]]), include_boundary=False
        )[0]

    def test_hole_is_outside(self, square_with_hole):
        assert not square_with_hole.contains(np.array([[2.0, 2.0]]))[0]
        assert square_with_hole.contains(np.array([[0.5, 0.5]]))[0]

    def test_lshape_notch_is_outside(self):
        dom = lshape_domain()
        assert not dom.contains(np.array([[45.0, 30.0]]))[0]
        assert dom.contains(np.array([[15.0, 30.0]]))[0]
        assert not dom.contains(np.array([[14.0, 11.0]]))[0]


class TestNearestPoint:
    def test_identity_inside(self, unit_square):
        p = nearest_point_in_domain([0.3, 0.3], unit_square)
        assert np.allclose(p, [0.3, 0.3])

    def test_axis_aligned_projection(self, unit_square):
        p = nearest_point_in_domain([2.0, 0.5], unit_square)
        assert np.allclose(p, [1.0, 0.5])

    def test_projection_lands_inside(self, unit_square):
        p = nearest_point_in_domain([1.7, 1.9], unit_square)
        assert np.allclose(p, [1.0, 1.0])
        assert unit_square.contains(p[None, :])[0]

    def test_hole_center_projects_to_hole_wall(self, square_with_hole):
        # Center of the hole: nearest boundary is the hole ring, half a side
        # (1.0 m) away. Verified against dense boundary sampling.
        p = nearest_point_in_domain([2.0, 2.0], square_with_hole)
        d = np.hypot(p[0] - 2.0, p[1] - 2.0)
        assert d == pytest.approx(1.0, abs=1e-12)

        ts = np.linspace(0.0, 1.0, 20001)[:, None]
        best = np.inf
        for ring in square_with_hole.rings:
            for a, b in zip(ring, np.roll(ring, -1, axis=0)):
                pts = a[None, :] * (1 - ts) + b[None, :] * ts
                best = min(best, np.hypot(pts[:, 0] - 2.0, pts[:, 1] - 2.0).min())
        assert d == pytest.approx(best, abs=1e-8)

    def test_projected_point_passes_containment(self, square_with_hole):
        rng = np.random.default_rng(3)
        for _ in range(200):
            q = rng.uniform(-2.0, 6.0, size=2)
            p = nearest_point_in_domain(q, square_with_hole)
            assert square_with_hole.contains(p[None, :])[0]


class TestSampling:
    def test_deterministic_and_inside(self, unit_square):
        a = sample_domain(unit_square, 4, seed=11)
        b = sample_domain(unit_square, 4, seed=11)
        assert np.array_equal(a, b)
        assert a.shape == (4, 2)
        assert unit_square.contains(a).all()

    def test_no_samples_in_hole(self, square_with_hole):
        pts = sample_domain(square_with_hole, 5000, seed=1)
        inside_hole = (
            (pts[:, 0] > 1.0) & (pts[:, 0] < 3.0) & (pts[:, 1] > 1.0) & (pts[:, 1] < 3.0)
        )
        assert inside_hole.sum() == 0

    def test_monte_carlo_centroid(self, unit_square):
        # Empirical mean of uniform samples: 3 sigma ~ 3/sqrt(12 n) < 0.005.
        pts = sample_domain(unit_square, 100_000, seed=5)
        assert np.allclose(pts.mean(axis=0), [0.5, 0.5], atol=0.005)

    def test_degenerate_domain_raises(self):
        # A sliver occupying ~2e-7 of its bounding box.
        sliver = DomainPolygon([[0, 0], [1e6, 0], [1e6, 0.2], [0, 0.2]])
        needle = DomainPolygon(
            [[0.0, 0.0], [1e6, 0.0], [1e6, 0.2], [0.0, 0.2], [0.0, 1e6 * 0.0 + 0.2]][:4]
        )
        # rotate the sliver so the bbox is huge relative to the area
        theta = np.pi / 4
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        pts = (np.asarray(needle.outer) @ rot.T)
        slanted = DomainPolygon(pts)
        with pytest.raises(DegenerateDomainError):
            sample_domain(slanted, 10, seed=0)
