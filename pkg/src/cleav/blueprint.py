"""Cut loci of circle cleavages.

The cuts of a validated tree draw a diagram of chords inside the disk: one
maximal segment per internal node, clipped to the region that node
inherits.  This module builds that diagram, groups its pieces into
connected components, collapses outside sphere points onto it, and walks
the collapse backwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import (
    TOL,
    OrientedHyperplane,
    _face_interval,
    active_constraints,
    centroid,
    clip,
    segment_boundary_hit,
    signed_eval,
)
from .operad import Cleavage


class BlueprintError(ValueError):
    """Bad input to cut-locus analysis."""


class AlphaDomainError(BlueprintError):
    """Query point sits inside the timber's own sphere trace."""


def _require_circle(c: Cleavage) -> None:
    if c.n != 1:
        raise BlueprintError(
            f"cut-locus analysis is implemented for the circle only, got n = {c.n}"
        )


def _point_seg_distance(p, a, b) -> float:
    d = b - a
    dd = float(d @ d)
    if dd <= 1e-18:
        return float(np.linalg.norm(p - a))
    t = min(1.0, max(0.0, float((p - a) @ d) / dd))
    return float(np.linalg.norm(p - (a + t * d)))


def _closest_points(p1, q1, p2, q2):
    """Closest pair of points between segments p1q1 and p2q2."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    eps = 1e-18
    if a <= eps and e <= eps:
        return p1, p2
    if a <= eps:
        t = min(1.0, max(0.0, f / e))
        return p1, p2 + t * d2
    c = float(d1 @ r)
    if e <= eps:
        s = min(1.0, max(0.0, -c / a))
        return p1 + s * d1, p2
    b = float(d1 @ d2)
    denom = a * e - b * b
    s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > eps else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(1.0, max(0.0, -c / a))
    elif t > 1.0:
        t = 1.0
        s = min(1.0, max(0.0, (b - c) / a))
    return p1 + s * d1, p2 + t * d2


def _seg_distance(p1, q1, p2, q2) -> float:
    a, b = _closest_points(p1, q1, p2, q2)
    return float(np.linalg.norm(a - b))


@dataclass(frozen=True)
class Face:
    """One boundary chord of a timber."""

    constraint_index: int
    plane: OrientedHyperplane
    side: int
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class CutPiece:
    """Maximal segment cut by one tree node inside its inherited region."""

    path: str
    plane: OrientedHyperplane
    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))


@dataclass(frozen=True)
class Blueprint:
    """The full cut diagram of a cleavage."""

    cleavage: Cleavage
    pieces: tuple[CutPiece, ...]
    piece_components: tuple[int, ...]
    n_components: int
    faces: tuple[tuple[Face, ...], ...]
    centroids: tuple[np.ndarray, ...]
    tol: float

    @property
    def gamma(self) -> int:
        return self.n_components


def build_blueprint(c: Cleavage, tol: float = TOL) -> Blueprint:
    """Extract cut pieces and timber faces; group touching pieces."""
    _require_circle(c)
    pieces = []
    for cut in c.cuts:
        with_cut = clip(cut.body, cut.plane, 1)
        interval = _face_interval(with_cut, len(with_cut.constraints) - 1, tol=0.0)
        if interval is None:
            raise BlueprintError(f"cut at {cut.path} has no chord inside its region")
        p0, d, lo, hi = interval
        pieces.append(CutPiece(cut.path, cut.plane, p0 + lo * d, p0 + hi * d))

    parent = list(range(len(pieces)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if _seg_distance(pieces[i].a, pieces[i].b, pieces[j].a, pieces[j].b) <= tol:
                parent[find(i)] = find(j)

    comp_ids: dict[int, int] = {}
    components = []
    for i in range(len(pieces)):
        root = find(i)
        if root not in comp_ids:
            comp_ids[root] = len(comp_ids)
        components.append(comp_ids[root])

    faces = []
    for body in c.timbers:
        flags = active_constraints(body, tol)
        rows = []
        for j, (h, side) in enumerate(body.constraints):
            if not flags[j]:
                continue
            interval = _face_interval(body, j, tol=0.0)
            if interval is None:
                continue
            p0, d, lo, hi = interval
            rows.append(Face(j, h, side, p0 + lo * d, p0 + hi * d))
        faces.append(tuple(rows))

    centroids = tuple(centroid(body) for body in c.timbers)
    return Blueprint(
        c, tuple(pieces), tuple(components), len(comp_ids), tuple(faces), centroids, tol
    )


def blueprint_distance(bp: Blueprint, b) -> float:
    """Distance from b to the nearest cut piece (inf when there are none)."""
    b = np.asarray(b, dtype=float)
    if not bp.pieces:
        return math.inf
    return min(_point_seg_distance(b, p.a, p.b) for p in bp.pieces)


def participants(c: Cleavage, b, tol: float = TOL) -> tuple[int, ...]:
    """Labels whose timber contains b with b on one of its cut planes."""
    b = np.asarray(b, dtype=float)
    out = []
    for label in range(1, c.k + 1):
        body = c.timber(label)
        if not body.contains(b, tol):
            continue
        if any(abs(signed_eval(h, b)) <= tol for h, _ in body.constraints):
            out.append(label)
    return tuple(out)


@dataclass(frozen=True)
class AlphaHit:
    """Where a collapsed outside point lands on the timber boundary."""

    point: np.ndarray
    plane: OrientedHyperplane | None
    face_index: int
    corner: bool
    t: float


def alpha(c: Cleavage, i: int, s, tol: float = TOL, centroid_point=None) -> AlphaHit:
    """Project the sphere point s onto timber i along the ray to its centroid.

    s must lie outside the sphere trace of timber i (within tol).  The
    landing point is the first boundary crossing of the segment from s to
    the centroid; for admissible s that crossing is on a cut plane, with
    the corner flag raised when several faces tie.
    """
    _require_circle(c)
    if not 1 <= i <= c.k:
        raise BlueprintError(f"label {i} out of range 1..{c.k}")
    s = np.asarray(s, dtype=float)
    nrm = float(np.linalg.norm(s))
    if abs(nrm - 1.0) > 1e-6:
        raise AlphaDomainError(f"query point has norm {nrm!r}, expected a circle point")
    s = s / nrm
    theta = math.atan2(s[1], s[0])
    outside = c.trace(i).arcs.complement()
    if outside.distance(theta) > tol:
        raise AlphaDomainError(
            f"angle {theta:.9f} lies inside the sphere trace of timber {i}"
        )
    if centroid_point is None:
        cpt = centroid(c.timber(i))
    else:
        cpt = np.asarray(centroid_point, dtype=float)
    hit = segment_boundary_hit(c.timber(i), s, cpt, tol)
    return AlphaHit(hit.point, hit.face, hit.face_index, hit.corner, hit.t)


def alpha_preimage(bp: Blueprint, b, tol: float | None = None):
    """All sphere points collapsing to the diagram point b, by timber label.

    For each participating timber the preimage is where the ray from its
    centroid through b exits the circle.  Returns [(label, point)] sorted
    by label; raises when b is not on the diagram within tol.
    """
    tol = bp.tol if tol is None else tol
    b = np.asarray(b, dtype=float)
    dist = blueprint_distance(bp, b)
    if not dist <= tol:
        raise BlueprintError(f"b not on blueprint: nearest piece at distance {dist:.3e}")
    out = []
    for label in participants(bp.cleavage, b, tol):
        ci = bp.centroids[label - 1]
        d = b - ci
        qa = float(d @ d)
        if qa <= 1e-30:
            raise BlueprintError(f"b coincides with the centroid of timber {label}")
        qb = 2.0 * float(ci @ d)
        qc = float(ci @ ci) - 1.0
        disc = qb * qb - 4.0 * qa * qc
        u = (-qb + math.sqrt(disc)) / (2.0 * qa)
        s = ci + u * d
        out.append((label, s / float(np.linalg.norm(s))))
    return out


@dataclass(frozen=True)
class Spine:
    """Edges of the p-simplex through one chosen vertex."""

    dim: int
    vertex: int
    edges: tuple[tuple[int, int], ...]


def spine(p: int, i: int) -> Spine:
    """Star of vertex i in the p-simplex: all edges {i, j}, j != i."""
    if p < 0:
        raise BlueprintError(f"simplex dimension must be >= 0, got {p}")
    if not 0 <= i <= p:
        raise BlueprintError(f"vertex {i} out of range 0..{p}")
    edges = tuple(tuple(sorted((i, j))) for j in range(p + 1) if j != i)
    return Spine(p, i, edges)


@dataclass(frozen=True)
class BlueprintSample:
    """One thickening sample: a diagram point with its local collapse data."""

    point: np.ndarray
    component: int
    participants: tuple[int, ...]
    spines: tuple[Spine, ...]


@dataclass(frozen=True)
class ThickenedBlueprint:
    """Finite stand-in for the thickened diagram: samples with spines."""

    samples: tuple[BlueprintSample, ...]
    n_components: int
    blueprint: Blueprint

    @property
    def gamma(self) -> int:
        return self.n_components


def _as_blueprint(c, tol: float) -> Blueprint:
    if isinstance(c, Blueprint):
        return c
    return build_blueprint(c, tol)


def components(c, tol: float = TOL) -> int:
    """Number of connected components of the cut diagram."""
    return _as_blueprint(c, tol).n_components


def thicken(c, density: int = 8, tol: float = TOL) -> ThickenedBlueprint:
    """Sample every piece uniformly plus all pairwise crossing points.

    Accepts a Cleavage or a prebuilt Blueprint. density counts samples per
    piece including both endpoints; duplicate points (shared endpoints,
    crossings) are kept once.  Each sample carries its component id,
    participant labels, and one spine per participant, the spine of a
    participant being its vertex star in the simplex on the participant
    set (sorted by label).
    """
    if density < 2:
        raise BlueprintError(f"density must be >= 2, got {density}")
    bp = _as_blueprint(c, tol)
    tol = bp.tol
    candidates: list[tuple[np.ndarray, int]] = []
    for idx, piece in enumerate(bp.pieces):
        for t in np.linspace(0.0, 1.0, density):
            candidates.append((piece.a + t * (piece.b - piece.a), idx))
    for i in range(len(bp.pieces)):
        for j in range(i + 1, len(bp.pieces)):
            pa, pb = _closest_points(
                bp.pieces[i].a, bp.pieces[i].b, bp.pieces[j].a, bp.pieces[j].b
            )
            if float(np.linalg.norm(pa - pb)) <= tol:
                candidates.append(((pa + pb) / 2.0, i))

    samples = []
    kept: list[np.ndarray] = []
    for point, idx in candidates:
        if any(float(np.linalg.norm(point - q)) <= tol for q in kept):
            continue
        kept.append(point)
        labels = participants(bp.cleavage, point, tol)
        p = len(labels) - 1
        spines = tuple(spine(p, v) for v in range(len(labels)))
        samples.append(
            BlueprintSample(point, bp.piece_components[idx], labels, spines)
        )
    return ThickenedBlueprint(tuple(samples), bp.n_components, bp)


def stable_degree(c, dim_m: int, tol: float = TOL) -> tuple[int, int]:
    """Degree pair (loop components, interval components) scaled by dim_m."""
    if dim_m < 1:
        raise BlueprintError(f"manifold dimension must be >= 1, got {dim_m}")
    bp = _as_blueprint(c, tol)
    g = bp.n_components
    return dim_m * g, dim_m * (bp.cleavage.k - 1 - g)


def _point_json(p) -> list:
    return [float(x) for x in p]


def blueprint_to_json(bp: Blueprint) -> dict:
    """Serializable diagram: pieces with component ids, faces per timber."""
    pieces = [
        {
            "path": piece.path,
            "plane": piece.plane.to_json(),
            "a": _point_json(piece.a),
            "b": _point_json(piece.b),
            "component": comp,
        }
        for piece, comp in zip(bp.pieces, bp.piece_components)
    ]
    faces = [
        [
            {
                "constraint": f.constraint_index,
                "plane": f.plane.to_json(),
                "side": f.side,
                "a": _point_json(f.a),
                "b": _point_json(f.b),
            }
            for f in timber_faces
        ]
        for timber_faces in bp.faces
    ]
    return {"n_components": bp.n_components, "pieces": pieces, "faces": faces}


def thickened_to_json(tb: ThickenedBlueprint) -> dict:
    samples = [
        {
            "point": _point_json(s.point),
            "component": s.component,
            "participants": list(s.participants),
            "spines": [
                {"dim": sp.dim, "vertex": sp.vertex, "edges": [list(e) for e in sp.edges]}
                for sp in s.spines
            ],
        }
        for s in tb.samples
    ]
    return {"n_components": tb.n_components, "samples": samples}


def export_obj(bp: Blueprint) -> str:
    """Wavefront OBJ with one polyline per timber face and per cut piece."""
    lines = ["# cleavage diagram export"]
    verts: list[str] = []
    elems: list[str] = []

    def add_segment(a, b, tag: str) -> None:
        base = len(verts)
        verts.append(f"v {a[0]:.17g} {a[1]:.17g} 0")
        verts.append(f"v {b[0]:.17g} {b[1]:.17g} 0")
        elems.append(f"# {tag}")
        elems.append(f"l {base + 1} {base + 2}")

    for label, timber_faces in enumerate(bp.faces, start=1):
        for f in timber_faces:
            add_segment(f.a, f.b, f"timber {label} face {f.constraint_index}")
    for piece, comp in zip(bp.pieces, bp.piece_components):
        add_segment(piece.a, piece.b, f"cut {piece.path} component {comp}")
    return "\n".join(lines + verts + elems) + "\n"
