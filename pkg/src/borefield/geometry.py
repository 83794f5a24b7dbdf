"""Polygonal placement domains: containment, projection, uniform sampling.

A domain is an outer ring plus optional hole rings under the even-odd fill
rule. All routines are vectorized over points and treat the boundary as part
of the domain, which is what the centroid projection step of the placement
algorithm relies on.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDomainError, ValidationError
from .validation import as_points_array

# Boundary membership tolerance, relative to the domain diameter.
_BOUNDARY_RTOL = 1e-9


def _ring_area(ring):
    """Signed shoelace area of a closed ring given without repeated vertex."""
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments(ring):
    return ring, np.roll(ring, -1, axis=0)


def _segments_intersect(p1, p2, q1, q2):
    """Proper or improper intersection test for two closed segments."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_segment(a, b, c):
        return (
            orient(a, b, c) == 0
            and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    return (
        on_segment(q1, q2, p1)
        or on_segment(q1, q2, p2)
        or on_segment(p1, p2, q1)
        or on_segment(p1, p2, q2)
    )


def _ring_self_intersects(ring):
    a, b = _segments(ring)
    n = len(ring)
    for i in range(n):
        for j in range(i + 1, n):
            # Neighbouring segments share an endpoint by construction.
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(a[i], b[i], a[j], b[j]):
                return True
    return False


def _rings_cross(ring_a, ring_b):
    sa, ea = _segments(ring_a)
    sb, eb = _segments(ring_b)
    for i in range(len(ring_a)):
        for j in range(len(ring_b)):
            if _segments_intersect(sa[i], ea[i], sb[j], eb[j]):
                return True
    return False


def _ring_parity(ring, points):
    """Odd crossing parity of a horizontal ray per point (half-open rule)."""
    px, py = points[:, 0][:, None], points[:, 1][:, None]
    start, end = _segments(ring)
    x1, y1 = start[:, 0][None, :], start[:, 1][None, :]
    x2, y2 = end[:, 0][None, :], end[:, 1][None, :]
    straddles = (y1 > py) != (y2 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
    hits = straddles & (px < x_cross)
    return (np.sum(hits, axis=1) % 2).astype(bool)


@dataclass(frozen=True)
class DomainPolygon:
    """Property boundary with optional interior exclusion holes."""

    outer: np.ndarray
    holes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        outer = as_points_array(self.outer, "outer")
        holes = tuple(as_points_array(h, f"holes[{i}]") for i, h in enumerate(self.holes))
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)
        failures = []
        if len(outer) < 3:
            failures.append("outer ring needs at least 3 vertices")
        for i, h in enumerate(holes):
            if len(h) < 3:
                failures.append(f"holes[{i}] needs at least 3 vertices")
        if failures:
            raise ValidationError(failures)
        if _ring_self_intersects(outer):
            failures.append("outer ring is self-intersecting")
        for i, h in enumerate(holes):
            if _ring_self_intersects(h):
                failures.append(f"holes[{i}] is self-intersecting")
        if not failures:
            for i, h in enumerate(holes):
                if not np.all(_ring_parity(outer, h)):
                    failures.append(f"holes[{i}] is not inside the outer ring")
                elif _rings_cross(outer, h):
                    failures.append(f"holes[{i}] crosses the outer ring")
            for i in range(len(holes)):
                for j in range(i + 1, len(holes)):
                    if _rings_cross(holes[i], holes[j]) or np.any(
                        _ring_parity(holes[i], holes[j])
                    ):
                        failures.append(f"holes[{i}] and holes[{j}] overlap")
        if not failures and self.area <= 0.0:
            failures.append("domain area must be > 0")
        if failures:
            raise ValidationError(failures)

    @property
    def rings(self):
        return (self.outer, *self.holes)

    @property
    def area(self):
        return abs(_ring_area(self.outer)) - sum(abs(_ring_area(h)) for h in self.holes)

    @property
    def bounds(self):
        return (
            float(self.outer[:, 0].min()),
            float(self.outer[:, 1].min()),
            float(self.outer[:, 0].max()),
            float(self.outer[:, 1].max()),
        )

    @property
    def _diameter(self):
        x0, y0, x1, y1 = self.bounds
        return float(np.hypot(x1 - x0, y1 - y0))

    def contains(self, points, include_boundary=True):
        """Even-odd membership test, vectorized over points.

        Points on any ring edge count as inside when ``include_boundary``
        (within a tolerance tied to the domain diameter). With
        ``include_boundary=False`` the raw crossing parity decides and
        boundary membership follows the half-open edge convention.
        """
        pts = as_points_array(points)
        inside = np.zeros(len(pts), dtype=bool)
        for ring in self.rings:
            inside ^= _ring_parity(ring, pts)
        if include_boundary:
            on_edge = self.boundary_distance(pts) <= _BOUNDARY_RTOL * self._diameter
            inside |= on_edge
        return inside

    def boundary_distance(self, points):
        """Euclidean distance from each point to the nearest ring edge."""
        pts = as_points_array(points)
        best = np.full(len(pts), np.inf)
        for ring in self.rings:
            start, end = _segments(ring)
            d = _point_segment_distance(pts, start, end)
            best = np.minimum(best, d.min(axis=1))
        return best

    def nearest_boundary_point(self, point):
        """Closest point on the domain boundary (any minimizer on ties)."""
        pt = as_points_array(point)[0]
        best_d = np.inf
        best_p = None
        for ring in self.rings:
            start, end = _segments(ring)
            proj = _project_on_segments(pt, start, end)
            d = np.hypot(proj[:, 0] - pt[0], proj[:, 1] - pt[1])
            k = int(np.argmin(d))
            if d[k] < best_d:
                best_d = float(d[k])
                best_p = proj[k]
        return np.array(best_p)


def _point_segment_distance(points, start, end):
    """Distances of shape (n_points, n_segments)."""
    p = points[:, None, :]
    a = start[None, :, :]
    b = end[None, :, :]
    ab = b - a
    denom = np.sum(ab * ab, axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sum((p - a) * ab, axis=2) / denom
    t = np.where(denom > 0, np.clip(t, 0.0, 1.0), 0.0)
    closest = a + t[:, :, None] * ab
    diff = p - closest
    return np.sqrt(np.sum(diff * diff, axis=2))


def _project_on_segments(point, start, end):
    """Per-segment closest point to ``point``, shape (n_segments, 2)."""
    ab = end - start
    denom = np.sum(ab * ab, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sum((point[None, :] - start) * ab, axis=1) / denom
    t = np.where(denom > 0, np.clip(t, 0.0, 1.0), 0.0)
    return start + t[:, None] * ab


def nearest_point_in_domain(point, domain):
    """The point itself when inside the (closed) domain, else the nearest
    boundary point."""
    pt = as_points_array(point)[0]
    if bool(domain.contains(pt[None, :])[0]):
        return pt
    return domain.nearest_boundary_point(pt)


def sample_domain(domain, n_samples, seed=None, rng=None):
    """Uniform i.i.d. samples inside the domain by bounding-box rejection.

    Deterministic for a fixed seed. Raises :class:`DegenerateDomainError`
    when the acceptance rate stays below 1e-4 after a million trials.
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = domain.bounds
    out = np.empty((n_samples, 2))
    got = 0
    trials = 0
    chunk = max(4096, 2 * n_samples)
    while got < n_samples:
        pts = rng.uniform((x0, y0), (x1, y1), size=(chunk, 2))
        keep = pts[domain.contains(pts)]
        take = min(len(keep), n_samples - got)
        out[got : got + take] = keep[:take]
        got += take
        trials += chunk
        if trials >= 1_000_000 and got / trials < 1e-4:
            raise DegenerateDomainError(
                f"acceptance rate {got / trials:.2e} after {trials} trials; "
                "the domain is degenerate relative to its bounding box"
            )
    return out
