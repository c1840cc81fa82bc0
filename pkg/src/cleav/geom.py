"""Exact low-tolerance geometry kernel.

Oriented hyperplanes, convex bodies inside the closed unit ball, sphere
traces, centroids, and segment-boundary intersection. Dimension 2 (circle
cleaving) is handled exactly with arc and chord arithmetic; higher ambient
dimensions fall back to seeded sampling with documented budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TOL = 1e-9
TWO_PI = 2.0 * math.pi

MC_SAMPLES = 100_000
MC_SEED = 0
TRACE_BUDGET = 2048
INTERIOR_BUDGET = 20_000


class GeometryError(ValueError):
    pass


class DimensionMismatch(GeometryError):
    pass


class EmptyBodyError(GeometryError):
    pass


class BoundaryHitError(GeometryError):
    pass


def _as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise GeometryError(f"expected a flat coordinate vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("coordinates must be finite")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    return v


@dataclass(frozen=True, eq=False)
class OrientedHyperplane:
    """Affine hyperplane {x : <normal, x> = offset} with a chosen side.

    The normal is stored normalized; the offset is rescaled to match, so it
    equals the signed distance of the plane from the origin. A plane used to
    cleave the unit sphere must satisfy |offset| < 1; that is enforced at
    validation time, not here, so general clipping remains available.
    """

    normal: np.ndarray
    offset: float

    def __init__(self, normal, offset: float):
        v = _as_vector(normal)
        norm = float(np.linalg.norm(v))
        if norm <= TOL:
            raise GeometryError("hyperplane normal must be nonzero")
        unit = v / norm
        unit.setflags(write=False)
        object.__setattr__(self, "normal", unit)
        object.__setattr__(self, "offset", float(offset) / norm)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def to_json(self) -> dict:
        return {"normal": [float(c) for c in self.normal], "offset": self.offset}

    @staticmethod
    def from_json(doc: dict) -> "OrientedHyperplane":
        return OrientedHyperplane(doc["normal"], doc["offset"])


def signed_eval(h: OrientedHyperplane, x) -> float:
    """<normal, x> - offset; positive on the normal side."""
    v = _as_vector(x, h.dim)
    return float(h.normal @ v) - h.offset


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Intersection of the closed unit ball with signed half-spaces.

    constraints holds (hyperplane, side) pairs, side in {+1, -1}; membership
    means side * signed_eval >= 0 for every pair plus |x| <= 1. The ball
    constraint is implicit and always last in face indexing.
    """

    constraints: tuple = ()
    dim: int = 2

    def __post_init__(self):
        for h, side in self.constraints:
            if side not in (-1, 1):
                raise GeometryError(f"constraint side must be +1 or -1, got {side}")
            if h.dim != self.dim:
                raise DimensionMismatch("constraint dimension differs from body dimension")

    def contains(self, x, tol: float = TOL) -> bool:
        v = _as_vector(x, self.dim)
        if float(np.linalg.norm(v)) > 1.0 + tol:
            return False
        return all(side * signed_eval(h, v) >= -tol for h, side in self.constraints)

    def margins(self, x) -> np.ndarray:
        """Signed slack of each plane constraint at x (>= 0 means satisfied)."""
        v = _as_vector(x, self.dim)
        return np.array([side * signed_eval(h, v) for h, side in self.constraints])


def unit_disk(dim: int = 2) -> ConvexBody:
    return ConvexBody((), dim)


def clip(body: ConvexBody, h: OrientedHyperplane, side: int) -> ConvexBody:
    if h.dim != body.dim:
        raise DimensionMismatch("clip plane dimension differs from body dimension")
    if side not in (-1, 1):
        raise GeometryError(f"clip side must be +1 or -1, got {side}")
    return ConvexBody(body.constraints + ((h, side),), body.dim)


# ---------------------------------------------------------------------------
# Circle arc arithmetic (ambient dimension 2).


def _norm_angle(a: float) -> float:
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return r


class ArcSet:
    """Union of closed arcs on the unit circle.

    Canonical form: arcs (start, end) with start in [0, 2*pi), start < end
    <= start + 2*pi, pairwise disjoint, sorted by start. The full circle is
    ((0, 2*pi),) and the empty set is ().
    """

    __slots__ = ("arcs",)

    def __init__(self, intervals=()):
        self.arcs = _canonical_arcs(intervals)

    @staticmethod
    def full() -> "ArcSet":
        return ArcSet(((0.0, TWO_PI),))

    @staticmethod
    def empty() -> "ArcSet":
        return ArcSet(())

    def is_empty(self) -> bool:
        return not self.arcs

    def is_full(self) -> bool:
        return self.measure() >= TWO_PI - 1e-15

    def measure(self) -> float:
        return sum(e - s for s, e in self.arcs)

    def contains(self, theta: float, tol: float = TOL) -> bool:
        t = _norm_angle(theta)
        for s, e in self.arcs:
            if s - tol <= t <= e + tol or s - tol <= t + TWO_PI <= e + tol:
                return True
        return False

    def intersect(self, other: "ArcSet") -> "ArcSet":
        pieces = []
        for s1, e1 in self.arcs:
            for s2, e2 in other.arcs:
                for shift in (-TWO_PI, 0.0, TWO_PI):
                    lo = max(s1, s2 + shift)
                    hi = min(e1, e2 + shift)
                    if hi > lo:
                        pieces.append((lo, hi))
        return ArcSet(pieces)

    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(self.arcs + other.arcs)

    def complement(self) -> "ArcSet":
        if not self.arcs:
            return ArcSet.full()
        if self.is_full():
            return ArcSet.empty()
        gaps = []
        n = len(self.arcs)
        for i in range(n):
            cur_end = self.arcs[i][1]
            nxt_start = self.arcs[(i + 1) % n][0] + (TWO_PI if i == n - 1 else 0.0)
            if nxt_start > cur_end:
                gaps.append((cur_end, nxt_start))
        return ArcSet(gaps)

    def sym_diff_measure(self, other: "ArcSet") -> float:
        inter = self.intersect(other).measure()
        return self.measure() + other.measure() - 2.0 * inter

    def distance(self, theta: float) -> float:
        """Circular distance from the angle theta to this set (0 if inside)."""
        if not self.arcs:
            return math.pi
        t = _norm_angle(theta)
        best = math.pi
        for s, e in self.arcs:
            for shift in (-TWO_PI, 0.0, TWO_PI):
                ts = t + shift
                if s <= ts <= e:
                    return 0.0
                best = min(best, abs(ts - s), abs(ts - e))
        return best

    def __repr__(self):
        return f"ArcSet({list(self.arcs)!r})"


def _canonical_arcs(intervals) -> tuple:
    raw = []
    for s, e in intervals:
        length = e - s
        if length <= 0.0:
            continue
        if length >= TWO_PI:
            return ((0.0, TWO_PI),)
        s0 = _norm_angle(s)
        raw.append((s0, s0 + length))
    if not raw:
        return ()
    raw.sort()
    merged = [list(raw[0])]
    for s, e in raw[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    # Fold leading arcs into the last one while it wraps past them.
    while len(merged) > 1 and merged[-1][1] >= merged[0][0] + TWO_PI:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[1] + TWO_PI)
        if merged[-1][1] - merged[-1][0] >= TWO_PI:
            return ((0.0, TWO_PI),)
    if merged[0][1] - merged[0][0] >= TWO_PI:
        return ((0.0, TWO_PI),)
    return tuple((s, e) for s, e in merged)


# ---------------------------------------------------------------------------
# Sphere traces.


@dataclass(frozen=True, eq=False)
class SphereRegion:
    """Intersection of a convex body with the unit sphere.

    dim 2: exact arc list. dim >= 3: a deterministic point cloud on the
    sphere with a membership mask; budget and seed are recorded so results
    are reproducible.
    """

    body: ConvexBody
    arcs: ArcSet | None = None
    points: np.ndarray | None = None
    mask: np.ndarray | None = None
    budget: int = TRACE_BUDGET
    seed: int = 0

    def is_nonempty(self, tol: float = TOL) -> bool:
        if self.arcs is not None:
            return any(e - s > tol for s, e in self.arcs.arcs)
        return bool(self.mask.any())

    def measure_fraction(self) -> float:
        if self.arcs is not None:
            return self.arcs.measure() / TWO_PI
        return float(self.mask.mean())


def _constraint_arcs(h: OrientedHyperplane, side: int) -> ArcSet:
    # {theta : side * (cos(theta - phi) - offset) >= 0} with phi the normal angle.
    phi = math.atan2(h.normal[1], h.normal[0])
    if side == 1:
        if h.offset >= 1.0:
            return ArcSet.empty()
        if h.offset <= -1.0:
            return ArcSet.full()
        a = math.acos(h.offset)
        return ArcSet(((phi - a, phi + a),))
    if h.offset <= -1.0:
        return ArcSet.empty()
    if h.offset >= 1.0:
        return ArcSet.full()
    a = math.acos(h.offset)
    return ArcSet(((phi + a, phi - a + TWO_PI),))


def sphere_points(dim: int, budget: int = TRACE_BUDGET, seed: int = 0) -> np.ndarray:
    """Deterministic unit-sphere point cloud in R^dim."""
    if dim == 3:
        # Fibonacci lattice; no RNG involved.
        i = np.arange(budget) + 0.5
        z = 1.0 - 2.0 * i / budget
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        golden = math.pi * (3.0 - math.sqrt(5.0))
        phi = golden * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(budget, dim))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def sphere_trace(body: ConvexBody, budget: int = TRACE_BUDGET, seed: int = 0) -> SphereRegion:
    if body.dim == 2:
        arcs = ArcSet.full()
        for h, side in body.constraints:
            arcs = arcs.intersect(_constraint_arcs(h, side))
        return SphereRegion(body, arcs=arcs)
    pts = sphere_points(body.dim, budget, seed)
    mask = np.ones(len(pts), dtype=bool)
    for h, side in body.constraints:
        mask &= side * (pts @ h.normal - h.offset) >= 0.0
    return SphereRegion(body, points=pts, mask=mask, budget=budget, seed=seed)


# ---------------------------------------------------------------------------
# Interior tests.


def is_nonempty_interior(body: ConvexBody, tol: float = TOL,
                         budget: int = INTERIOR_BUDGET, seed: int = MC_SEED) -> bool:
    """True iff some point clears every plane and the sphere by more than tol.

    dim 2: exact. The tol-shrunk feasible set is the intersection of
    half-planes {margin >= tol} with the disk of radius 1 - tol; its
    minimum-norm point is the origin, a projection onto one boundary line,
    or an intersection of two boundary lines, so testing those candidates
    decides feasibility.

    dim >= 3: seeded rejection sampling, `budget` points in the ball.
    """
    if tol <= 0.0:
        raise GeometryError("tol must be positive")
    if body.dim != 2:
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(budget, body.dim))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        radii = rng.random(budget) ** (1.0 / body.dim)
        pts *= radii[:, None] * (1.0 - tol)
        ok = np.ones(budget, dtype=bool)
        for h, side in body.constraints:
            ok &= side * (pts @ h.normal - h.offset) > tol
        return bool(ok.any())

    radius = 1.0 - tol
    if radius <= 0.0:
        return False
    normals = []
    offsets = []
    for h, side in body.constraints:
        # side * (n.x - c) >= tol  <=>  (side*n).x >= side*c + tol
        normals.append(side * h.normal)
        offsets.append(side * h.offset + tol)
    normals = np.array(normals).reshape(-1, 2)
    offsets = np.array(offsets)

    def feasible(p: np.ndarray) -> bool:
        if normals.size == 0:
            return True
        return bool(np.all(normals @ p - offsets >= -1e-15))

    origin = np.zeros(2)
    candidates = []
    if feasible(origin):
        candidates.append(origin)
    else:
        m = len(offsets)
        for j in range(m):
            # Projection of the origin onto the shifted line n.x = c.
            candidates.append(normals[j] * offsets[j])
        for j in range(m):
            for l in range(j + 1, m):
                a = np.array([normals[j], normals[l]])
                det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
                if abs(det) <= 1e-14:
                    continue
                rhs = np.array([offsets[j], offsets[l]])
                candidates.append(np.linalg.solve(a, rhs))
    for p in candidates:
        if feasible(p) and float(np.linalg.norm(p)) <= radius:
            return True
    return False


# ---------------------------------------------------------------------------
# Centroids.


def _face_interval(body: ConvexBody, j: int, tol: float = 0.0):
    """Chord of constraint plane j inside the body, or None.

    Returns (p0, d, lo, hi): points p0 + s*d for s in [lo, hi], with d the
    unit direction making the traversal counterclockwise around the body.
    """
    h, side = body.constraints[j]
    if abs(h.offset) >= 1.0:
        return None
    p0 = h.offset * np.array(h.normal)
    outward = -side * np.array(h.normal)
    d = np.array([-outward[1], outward[0]])  # rot90ccw(outward)
    half = math.sqrt(max(0.0, 1.0 - h.offset * h.offset))
    lo, hi = -half, half
    for l, (h2, side2) in enumerate(body.constraints):
        if l == j:
            continue
        a = side2 * float(h2.normal @ d)
        b = side2 * (float(h2.normal @ p0) - h2.offset)
        # Need a*s + b >= -tol.
        if abs(a) <= 1e-14:
            if b < -tol:
                return None
            continue
        bound = (-tol - b) / a
        if a > 0.0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    if hi - lo <= 1e-14:
        return None
    return p0, d, lo, hi


def active_constraints(body: ConvexBody, tol: float = TOL) -> list:
    """Per-constraint flag: does the plane support a genuine boundary face?

    Exact for dim 2 via chord clipping. A constraint whose face interval is
    empty or degenerate is redundant for the body's geometry.
    """
    if body.dim != 2:
        raise GeometryError("active_constraints requires ambient dimension 2")
    out = []
    for j in range(len(body.constraints)):
        fi = _face_interval(body, j, tol=0.0)
        out.append(fi is not None and fi[3] - fi[2] > tol)
    return out


def reduce(body: ConvexBody, tol: float = TOL) -> ConvexBody:
    """Drop constraints that contribute no boundary face.

    The result describes the same point set with only supporting planes
    kept. Requires ambient dimension 2, where face intervals are exact.
    """
    flags = active_constraints(body, tol)
    kept = tuple(c for c, keep in zip(body.constraints, flags) if keep)
    return ConvexBody(kept, body.dim)


def centroid(body: ConvexBody, samples: int = MC_SAMPLES, seed: int = MC_SEED) -> np.ndarray:
    """Center of mass of the body, uniform density.

    dim 2 is exact: the boundary decomposes into chord segments and circle
    arcs, and area plus first moments come from Green's theorem applied to
    each oriented piece. dim >= 3 defers to centroid_mc.
    """
    if body.dim != 2:
        point, _ = centroid_mc(body, samples, seed)
        return point
    if not is_nonempty_interior(body, TOL):
        raise EmptyBodyError("centroid of a body with empty interior")

    area = 0.0
    sx = 0.0
    sy = 0.0
    for j in range(len(body.constraints)):
        fi = _face_interval(body, j)
        if fi is None:
            continue
        p0, d, lo, hi = fi
        p = p0 + lo * d
        q = p0 + hi * d
        # Green's theorem with A = integral x dy, oriented ccw.
        area += (q[1] - p[1]) * (p[0] + q[0]) / 2.0
        sx += (q[1] - p[1]) * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0]) / 6.0
        sy += -(q[0] - p[0]) * (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]) / 6.0
    trace = sphere_trace(body)
    for a, b in trace.arcs.arcs:
        area += ((b + math.sin(b) * math.cos(b)) - (a + math.sin(a) * math.cos(a))) / 2.0
        sx += ((math.sin(b) - math.sin(b) ** 3 / 3.0)
               - (math.sin(a) - math.sin(a) ** 3 / 3.0)) / 2.0
        sy += ((-math.cos(b) + math.cos(b) ** 3 / 3.0)
               - (-math.cos(a) + math.cos(a) ** 3 / 3.0)) / 2.0
    if area <= TOL * TOL:
        raise EmptyBodyError("centroid of a body with vanishing area")
    return np.array([sx / area, sy / area])


def centroid_mc(body: ConvexBody, samples: int = MC_SAMPLES, seed: int = MC_SEED):
    """Monte Carlo centroid estimate: (point, per-coordinate standard error)."""
    rng = np.random.default_rng(seed)
    d = body.dim
    pts = rng.normal(size=(samples, d))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= (rng.random(samples) ** (1.0 / d))[:, None]
    ok = np.ones(samples, dtype=bool)
    for h, side in body.constraints:
        ok &= side * (pts @ h.normal - h.offset) >= 0.0
    hits = pts[ok]
    if len(hits) < 10:
        raise EmptyBodyError("Monte Carlo centroid: body acceptance rate too low")
    mean = hits.mean(axis=0)
    stderr = hits.std(axis=0, ddof=1) / math.sqrt(len(hits))
    return mean, stderr


# ---------------------------------------------------------------------------
# Segment-boundary intersection.


@dataclass(frozen=True)
class BoundaryHit:
    point: np.ndarray
    face: OrientedHyperplane | None
    face_index: int  # -1 when the crossing lies on the sphere
    corner: bool
    t: float


def segment_boundary_hit(body: ConvexBody, src, dst, tol: float = TOL) -> BoundaryHit:
    """Unique crossing of segment [src, dst] with the body boundary.

    src must be exterior (or on the boundary), dst interior. The crossing is
    the latest entry parameter among violated constraints; for a convex body
    that is the single boundary point of the segment. Ties within tol are
    corners: the lowest-index plane wins and the corner flag is set.
    """
    a = _as_vector(src, body.dim)
    b = _as_vector(dst, body.dim)
    seg = b - a
    seg_len = float(np.linalg.norm(seg))
    if seg_len <= tol:
        raise BoundaryHitError("segment is degenerate")
    margins_dst = body.margins(b) if body.constraints else np.zeros(0)
    if float(np.linalg.norm(b)) >= 1.0 - tol or (margins_dst.size and margins_dst.min() <= tol):
        raise BoundaryHitError("destination point must be interior to the body")

    entries = []  # (t, face_index)
    for j, (h, side) in enumerate(body.constraints):
        g0 = side * signed_eval(h, a)
        g1 = side * signed_eval(h, b)
        if g0 < 0.0:
            entries.append((g0 / (g0 - g1), j))
    na = float(np.linalg.norm(a))
    if na > 1.0:
        # Entry root of |a + t seg|^2 = 1.
        qa = seg @ seg
        qb = 2.0 * (a @ seg)
        qc = a @ a - 1.0
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            raise BoundaryHitError("segment never enters the unit ball")
        root = (-qb - math.sqrt(disc)) / (2.0 * qa)
        entries.append((root, -1))

    if not entries:
        if na < 1.0 - tol:
            raise BoundaryHitError("source point is interior to the body")
        # src sits on the sphere with every plane constraint satisfied.
        return BoundaryHit(point=a.copy(), face=None, face_index=-1, corner=False, t=0.0)

    t_star = max(t for t, _ in entries)
    tie = [idx for t, idx in entries if (t_star - t) * seg_len <= tol]
    plane_ties = sorted(i for i in tie if i >= 0)
    corner = len(tie) > 1
    if plane_ties:
        face_index = plane_ties[0]
        face = body.constraints[face_index][0]
    else:
        face_index = -1
        face = None
    point = a + t_star * seg
    return BoundaryHit(point=point, face=face, face_index=face_index, corner=corner, t=float(t_star))
