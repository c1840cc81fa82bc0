"""Collapse evaluation for families of closed strands.

Given a circle cleavage and one embedded closed polyline per timber, the
evaluator recovers, at every sample of the thickened cut diagram, the
strand points collapsing there, measures the geodesics between them, and
scales each by how close third strands come to a tapered tube around that
geodesic.  Any scale exceeding 1 sends the containing diagram component to
the point at infinity; everything else is reported as tangent data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .blueprint import (
    Blueprint,
    ThickenedBlueprint,
    _require_circle,
    alpha_preimage,
)
from .geom import TOL, TWO_PI

INF = math.inf


class UmkehrError(ValueError):
    """Bad input to collapse evaluation."""


class NonUniqueGeodesic(UmkehrError):
    """Two or more shortest paths tie within tolerance."""


class SelfIntersecting(UmkehrError):
    """Strands meant to be disjoint come within tolerance of each other."""


# ---------------------------------------------------------------------------
# Flat metrics and geodesics.


@dataclass(frozen=True)
class FlatMetric:
    """Euclidean R^d, or the flat torus with period L along every axis."""

    kind: str
    d: int
    L: float | None = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "torus"):
            raise UmkehrError(f"metric kind must be 'euclidean' or 'torus', got {self.kind!r}")
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 2:
            raise UmkehrError(f"ambient dimension must be an integer >= 2, got {self.d!r}")
        if self.kind == "torus":
            if self.L is None or not float(self.L) > 0.0:
                raise UmkehrError(f"torus period must be positive, got {self.L!r}")
            object.__setattr__(self, "L", float(self.L))
        elif self.L is not None:
            raise UmkehrError("euclidean metric takes no period")

    def displacement(self, a, b, tol: float = TOL) -> np.ndarray:
        """Shortest vector from a to b; raises when a tie makes it ambiguous."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape != (self.d,) or b.shape != (self.d,):
            raise UmkehrError(f"points must have dimension {self.d}")
        delta = b - a
        if self.kind == "euclidean":
            return delta
        L = self.L
        w = np.mod(delta + 0.5 * L, L) - 0.5 * L
        if np.any(np.abs(np.abs(w) - 0.5 * L) <= tol):
            raise NonUniqueGeodesic(
                f"displacement {delta.tolist()} sits half a period away on some axis"
            )
        return w

    def displacement_many(self, a, B) -> np.ndarray:
        """Row-wise shortest vectors from a to each row of B, no tie check."""
        a = np.asarray(a, dtype=float)
        B = np.asarray(B, dtype=float)
        delta = B - a
        if self.kind == "euclidean":
            return delta
        L = self.L
        return np.mod(delta + 0.5 * L, L) - 0.5 * L

    def to_json(self) -> dict:
        doc = {"kind": self.kind, "d": self.d}
        if self.kind == "torus":
            doc["L"] = self.L
        return doc


def metric_from_json(doc: object) -> FlatMetric:
    if not isinstance(doc, dict):
        raise UmkehrError("metric document must be an object")
    kind = doc.get("kind")
    d = doc.get("d")
    if isinstance(d, bool) or not isinstance(d, int):
        raise UmkehrError(f"metric field 'd' must be an integer, got {d!r}")
    if kind == "torus":
        return FlatMetric("torus", d, doc.get("L"))
    return FlatMetric(kind if isinstance(kind, str) else repr(kind), d)


@dataclass(frozen=True)
class Geodesic:
    """Shortest constant-speed path from a to b, parametrized on [0, 1]."""

    a: np.ndarray
    b: np.ndarray
    length: float
    tangent: np.ndarray
    disp: np.ndarray

    def point(self, t: float) -> np.ndarray:
        return self.a + t * self.disp


def geodesic(metric: FlatMetric, a, b, tol: float = TOL) -> Geodesic:
    """The minimizing geodesic; zero length allowed, ties raise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    disp = metric.displacement(a, b, tol)
    length = float(np.linalg.norm(disp))
    if length > 0.0:
        tangent = disp / length
    else:
        tangent = np.zeros(metric.d)
    return Geodesic(a, b, length, tangent, disp)


# ---------------------------------------------------------------------------
# Discrete strand families.


@dataclass(frozen=True)
class DiscreteEmbedding:
    """k closed strands, each a closed polyline on equal angular steps.

    Vertex j of strand i sits at parameter 2*pi*j/m_i; the strand closes
    back to vertex 0.  Points between vertices interpolate along the
    metric's shortest edge displacement, so torus strands may wrap.
    """

    metric: FlatMetric
    loops: tuple

    def __post_init__(self):
        loops = tuple(np.asarray(loop, dtype=float) for loop in self.loops)
        if not loops:
            raise UmkehrError("at least one strand is required")
        edges = []
        for idx, loop in enumerate(loops):
            if loop.ndim != 2 or loop.shape[1] != self.metric.d:
                raise UmkehrError(
                    f"strand {idx + 1} must be an (m, {self.metric.d}) vertex array"
                )
            if loop.shape[0] < 8:
                raise UmkehrError(
                    f"strand {idx + 1} has {loop.shape[0]} vertices, need at least 8"
                )
            if not np.all(np.isfinite(loop)):
                raise UmkehrError(f"strand {idx + 1} has non-finite coordinates")
            disp = np.empty_like(loop)
            for j in range(loop.shape[0]):
                nxt = (j + 1) % loop.shape[0]
                step = self.metric.displacement(loop[j], loop[nxt])
                if float(np.linalg.norm(step)) == 0.0:
                    raise UmkehrError(
                        f"strand {idx + 1} repeats vertex {j}; consecutive points must differ"
                    )
                disp[j] = step
            edges.append(disp)
        object.__setattr__(self, "loops", loops)
        object.__setattr__(self, "_edges", tuple(edges))

    @property
    def k(self) -> int:
        return len(self.loops)

    def m(self, label: int) -> int:
        return self.loops[label - 1].shape[0]

    def params(self, label: int) -> np.ndarray:
        m = self.m(label)
        return TWO_PI * np.arange(m) / m

    def points_at(self, label: int, s) -> np.ndarray:
        """Strand points at angular parameters s (vectorized)."""
        loop = self.loops[label - 1]
        disp = self._edges[label - 1]
        m = loop.shape[0]
        u = np.mod(np.asarray(s, dtype=float), TWO_PI) / (TWO_PI / m)
        j = np.floor(u).astype(int) % m
        frac = u - np.floor(u)
        return loop[j] + frac[..., None] * disp[j]

    def point(self, label: int, s: float) -> np.ndarray:
        return self.points_at(label, np.array([s]))[0]

    def to_json(self) -> dict:
        return {
            "metric": self.metric.to_json(),
            "loops": [[[float(x) for x in row] for row in loop] for loop in self.loops],
        }


def embedding_from_json(doc: object) -> DiscreteEmbedding:
    if not isinstance(doc, dict):
        raise UmkehrError("strand document must be an object")
    if "metric" not in doc or "loops" not in doc:
        raise UmkehrError("strand document needs 'metric' and 'loops'")
    metric = metric_from_json(doc["metric"])
    loops = doc["loops"]
    if not isinstance(loops, list) or not loops:
        raise UmkehrError("'loops' must be a nonempty list of vertex lists")
    return DiscreteEmbedding(metric, tuple(loops))


def _seg_seg_distance_batch(P1, D1, P2, D2) -> np.ndarray:
    """Pairwise distances between segments P1+s*D1 and P2+t*D2, s,t in [0,1]."""
    r = P1 - P2
    a = np.einsum("ij,ij->i", D1, D1)
    e = np.einsum("ij,ij->i", D2, D2)
    b = np.einsum("ij,ij->i", D1, D2)
    c = np.einsum("ij,ij->i", D1, r)
    f = np.einsum("ij,ij->i", D2, r)
    denom = a * e - b * b
    s = np.where(denom > 1e-300, np.clip((b * f - c * e) / np.where(denom > 1e-300, denom, 1.0), 0.0, 1.0), 0.0)
    t = (b * s + f) / e
    s = np.where(t < 0.0, np.clip(-c / a, 0.0, 1.0), s)
    s = np.where(t > 1.0, np.clip((b - c) / a, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    closest = P1 + s[:, None] * D1 - (P2 + t[:, None] * D2)
    return np.linalg.norm(closest, axis=1)


def strand_distance(gamma: DiscreteEmbedding, i: int, j: int, chunk: int = 65536) -> float:
    """Minimum distance between strands i and j over all edge pairs.

    Torus edges are compared after lifting strand j's edge start to the
    image nearest the corresponding edge start of strand i.
    """
    metric = gamma.metric
    A = gamma.loops[i - 1]
    DA = gamma._edges[i - 1]
    B = gamma.loops[j - 1]
    DB = gamma._edges[j - 1]
    na, nb = A.shape[0], B.shape[0]
    best = INF
    idx = np.arange(na * nb)
    for lo in range(0, idx.size, chunk):
        sel = idx[lo : lo + chunk]
        ia, ib = sel // nb, sel % nb
        P1, D1 = A[ia], DA[ia]
        if metric.kind == "torus":
            P2 = P1 + metric.displacement_many(np.zeros(metric.d), B[ib] - P1)
        else:
            P2 = B[ib]
        d = _seg_seg_distance_batch(P1, D1, P2, DB[ib])
        best = min(best, float(d.min()))
    return best


# ---------------------------------------------------------------------------
# Tube clearance and the scaling factor.


def cigar_radius(epsilon: float, t: float) -> float:
    """Radius of the tapered tube at fraction t along the geodesic."""
    if not 0.0 < t < 1.0:
        raise UmkehrError(f"tube radius is defined for 0 < t < 1, got {t!r}")
    return epsilon * (0.5 - abs(t - 0.5))


@dataclass(frozen=True)
class ClearanceWitness:
    """The strand vertex realizing the clearance infimum."""

    label: int
    param: float
    delta: float
    point: np.ndarray


@dataclass(frozen=True)
class UmkehrConfig:
    """Evaluation knobs.

    eta is the parameter exclusion radius (radians) around each geodesic
    endpoint on its own strand; None means eta_steps vertex steps per
    strand.  sup_scope picks the pooling region whose largest scale
    decides a collapse: 'component' (default), the whole 'blueprint', or
    each 'sample' alone.
    """

    epsilon: float
    t_homotopy: float = 0.0
    density: int = 8
    eta: float | None = None
    eta_steps: float = 2.0
    tol: float = TOL
    sup_scope: str = "component"
    mapping: bool = False

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise UmkehrError(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0.0 <= self.t_homotopy <= 1.0:
            raise UmkehrError(f"t_homotopy must lie in [0, 1], got {self.t_homotopy!r}")
        if self.density < 2:
            raise UmkehrError(f"density must be >= 2, got {self.density!r}")
        if self.eta is not None and not self.eta >= 0.0:
            raise UmkehrError(f"eta must be >= 0, got {self.eta!r}")
        if not self.tol > 0.0:
            raise UmkehrError(f"tol must be positive, got {self.tol!r}")
        if self.sup_scope not in ("component", "blueprint", "sample"):
            raise UmkehrError(f"unknown sup_scope {self.sup_scope!r}")

    def eta_radians(self, gamma: DiscreteEmbedding) -> list:
        if self.eta is not None:
            return [self.eta] * gamma.k
        return [self.eta_steps * TWO_PI / gamma.m(i) for i in range(1, gamma.k + 1)]

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "t_homotopy": self.t_homotopy,
            "density": self.density,
            "eta": self.eta,
            "eta_steps": self.eta_steps,
            "tol": self.tol,
            "sup_scope": self.sup_scope,
            "mapping": self.mapping,
        }


def clearance(
    gamma: DiscreteEmbedding,
    g: Geodesic,
    cfg: UmkehrConfig,
    exclude=(),
):
    """Least scaled depth of any strand vertex inside the tube around g.

    Scans every strand's vertices except those within parameter radius eta
    of an excluded (label, param) point on the same strand.  A vertex
    within tol of the geodesic segment forces clearance 0.  Vertices
    strictly inside the open tube contribute their distance-to-radius
    ratio; the infimum over all of them is returned with its witness, or
    (1.0, None) when no vertex enters the tube.
    """
    if not g.length > 0.0:
        raise UmkehrError("clearance needs a geodesic of positive length")
    etas = cfg.eta_radians(gamma)
    best = 1.0
    witness = None
    zero_witness = None
    ell2 = g.length * g.length
    for label in range(1, gamma.k + 1):
        loop = gamma.loops[label - 1]
        params = gamma.params(label)
        keep = np.ones(loop.shape[0], dtype=bool)
        for exc_label, exc_param in exclude:
            if exc_label != label:
                continue
            gap = np.abs(params - (exc_param % TWO_PI))
            gap = np.minimum(gap, TWO_PI - gap)
            keep &= gap > etas[label - 1]
        if not np.any(keep):
            continue
        w = gamma.metric.displacement_many(g.a, loop[keep])
        t = (w @ g.disp) / ell2
        perp = w - t[:, None] * g.disp
        pd = np.linalg.norm(perp, axis=1)
        seg = np.linalg.norm(w - np.clip(t, 0.0, 1.0)[:, None] * g.disp, axis=1)
        kept_params = params[keep]
        on_seg = seg <= cfg.tol
        if np.any(on_seg) and zero_witness is None:
            first = int(np.argmax(on_seg))
            zero_witness = ClearanceWitness(
                label, float(kept_params[first]), 0.0, loop[keep][first]
            )
        inside = (t > 0.0) & (t < 1.0) & ~on_seg
        if not np.any(inside):
            continue
        radius = cfg.epsilon * (0.5 - np.abs(t[inside] - 0.5))
        ratio = pd[inside] / radius
        hit = ratio < 1.0
        if not np.any(hit):
            continue
        ratios = ratio[hit]
        arg = int(np.argmin(ratios))
        if float(ratios[arg]) < best:
            best = float(ratios[arg])
            sub_params = kept_params[inside][hit]
            sub_points = loop[keep][inside][hit]
            witness = ClearanceWitness(label, float(sub_params[arg]), best, sub_points[arg])
    if zero_witness is not None:
        return 0.0, zero_witness
    return best, witness


def scaling(dist: float, epsilon: float, inf_delta: float, t: float) -> float:
    """dist / (epsilon * ((1-t) * inf_delta + t)); infinite past the tube."""
    if dist > epsilon:
        return INF
    denom = epsilon * ((1.0 - t) * inf_delta + t)
    if denom <= 0.0:
        return INF
    return dist / denom


# ---------------------------------------------------------------------------
# Restriction of strands to their timbers.


@dataclass(frozen=True)
class RestrictedArc:
    """One parameter arc of a strand, with interpolated end points."""

    label: int
    start: float
    end: float
    closed: bool
    points: np.ndarray

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "start": self.start,
            "end": self.end,
            "closed": self.closed,
            "points": [[float(x) for x in row] for row in self.points],
        }


def restrict(gamma: DiscreteEmbedding, c, tol: float = TOL) -> list:
    """Clip each strand to the sphere trace of its own timber.

    Returns one RestrictedArc per trace arc per label, in label order; a
    full-circle trace yields a single closed arc listing every vertex.
    """
    _require_circle(c)
    if gamma.k != c.k:
        raise UmkehrError(f"strand count {gamma.k} != arity {c.k}")
    out = []
    for label in range(1, c.k + 1):
        arcs = c.trace(label).arcs
        params = gamma.params(label)
        if arcs.is_full():
            out.append(
                RestrictedArc(label, 0.0, TWO_PI, True, gamma.loops[label - 1].copy())
            )
            continue
        for s0, s1 in arcs.arcs:
            inside = params[(params > s0 + tol) & (params < s1 - tol)]
            shifted = params + TWO_PI
            inside2 = shifted[(shifted > s0 + tol) & (shifted < s1 - tol)]
            mids = np.sort(np.concatenate([inside, inside2]))
            pts = gamma.points_at(label, np.concatenate([[s0], mids, [s1]]))
            out.append(RestrictedArc(label, float(s0), float(s1), False, pts))
    return out


# ---------------------------------------------------------------------------
# The collapse evaluator.


@dataclass(frozen=True)
class Entry:
    """Scaled tangent datum of one ordered strand pair at one sample."""

    sample: int
    pair: tuple
    scale: float
    tangent: tuple
    src: tuple
    dst: tuple

    def to_json(self) -> dict:
        return {
            "sample": self.sample,
            "pair": list(self.pair),
            "scale": self.scale,
            "tangent": list(self.tangent),
            "from": list(self.src),
            "to": list(self.dst),
        }


@dataclass(frozen=True)
class ComponentValue:
    """Evaluation of one diagram component: finite data or the infinity point."""

    component: int
    status: str
    entries: tuple
    uf_mask: tuple
    boundary: tuple
    collapsed_samples: tuple

    def to_json(self) -> dict:
        return {
            "component": self.component,
            "status": self.status,
            "entries": [e.to_json() for e in self.entries],
            "uf_mask": list(self.uf_mask),
            "boundary": [list(p) for p in self.boundary],
            "collapsed_samples": list(self.collapsed_samples),
        }


@dataclass(frozen=True)
class ThomValue:
    """Full evaluator output: restriction plus one value per component."""

    components: tuple
    restriction: tuple
    config: dict

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "components": [cv.to_json() for cv in self.components],
            "restriction": [arc.to_json() for arc in self.restriction],
        }


def _preimage_angles(bp: Blueprint, point, tol: float):
    out = []
    for label, s in alpha_preimage(bp, point, tol):
        out.append((label, math.atan2(s[1], s[0]) % TWO_PI))
    return out


def umkehr(
    gamma: DiscreteEmbedding,
    c,
    tb: ThickenedBlueprint,
    cfg: UmkehrConfig,
) -> ThomValue:
    """Evaluate the collapse of the strand family on the thickened diagram.

    Per sample, per ordered pair of participants, the geodesic between the
    two collapsing strand points is scaled by tube clearance; the pooled
    supremum (cfg.sup_scope) decides which components collapse to the
    infinity point.  Scales within tol of 1 are flagged as boundary pairs
    but stay finite.  In mapping mode, pairs closer than tol are glued:
    zero vector, scale 0, sample recorded in the uf_mask.
    """
    _require_circle(c)
    if gamma.k != c.k:
        raise UmkehrError(f"strand count {gamma.k} != arity {c.k}")
    metric = gamma.metric
    if metric.kind == "torus" and not cfg.epsilon < metric.L / 4.0:
        raise UmkehrError(
            f"torus evaluation needs epsilon < L/4 = {metric.L / 4.0}, got {cfg.epsilon}"
        )
    if not cfg.mapping:
        for i in range(1, gamma.k + 1):
            for j in range(i + 1, gamma.k + 1):
                d = strand_distance(gamma, i, j)
                if d <= cfg.tol:
                    raise SelfIntersecting(
                        f"strands {i} and {j} come within {d:.3e} of each other"
                    )

    restriction = tuple(restrict(gamma, c, cfg.tol))
    t_hom = cfg.t_homotopy
    eps = cfg.epsilon

    sample_entries: list[list[Entry]] = []
    sample_glued: list[bool] = []
    for idx, sample in enumerate(tb.samples):
        angles = dict(_preimage_angles(tb.blueprint, sample.point, cfg.tol))
        labels = sorted(sample.participants)
        entries: list[Entry] = []
        glued = False
        for a_pos in range(len(labels)):
            for b_pos in range(a_pos + 1, len(labels)):
                i, j = labels[a_pos], labels[b_pos]
                th_i, th_j = angles[i], angles[j]
                p_i = gamma.point(i, th_i)
                p_j = gamma.point(j, th_j)
                g = geodesic(metric, p_i, p_j, cfg.tol)
                if cfg.mapping and g.length <= cfg.tol:
                    zero = (0.0,) * metric.d
                    base = tuple(float(x) for x in p_i)
                    entries.append(Entry(idx, (i, j), 0.0, zero, base, base))
                    entries.append(Entry(idx, (j, i), 0.0, zero, base, base))
                    glued = True
                    continue
                if g.length > eps:
                    s_val = INF
                elif t_hom == 1.0:
                    s_val = scaling(g.length, eps, 1.0, 1.0)
                else:
                    inf_delta, _w = clearance(
                        gamma, g, cfg, exclude=((i, th_i), (j, th_j))
                    )
                    s_val = scaling(g.length, eps, inf_delta, t_hom)
                tang = tuple(float(x) for x in g.tangent)
                neg = tuple(-x for x in tang)
                src = tuple(float(x) for x in p_i)
                dst = tuple(float(x) for x in (p_i + g.disp))
                entries.append(Entry(idx, (i, j), s_val, tang, src, dst))
                entries.append(Entry(idx, (j, i), s_val, neg, dst, src))
        sample_entries.append(entries)
        sample_glued.append(glued)

    def sample_sup(idx: int) -> float:
        vals = [e.scale for e in sample_entries[idx]]
        return max(vals) if vals else 0.0

    collapse_cut = 1.0 + cfg.tol
    comp_ids = sorted({s.component for s in tb.samples})
    by_comp = {cid: [i for i, s in enumerate(tb.samples) if s.component == cid] for cid in comp_ids}

    global_sup = max((sample_sup(i) for i in range(len(tb.samples))), default=0.0)
    components = []
    for cid in comp_ids:
        members = by_comp[cid]
        sups = {i: sample_sup(i) for i in members}
        if cfg.sup_scope == "blueprint":
            collapsed = set(members) if global_sup > collapse_cut else set()
        elif cfg.sup_scope == "component":
            comp_sup = max(sups.values())
            collapsed = set(members) if comp_sup > collapse_cut else set()
        else:
            collapsed = {i for i in members if sups[i] > collapse_cut}
        status = "infinity" if collapsed == set(members) else "finite"
        kept: list[Entry] = []
        boundary = set()
        uf = set()
        for i in members:
            for e in sample_entries[i]:
                if math.isfinite(e.scale) and abs(e.scale - 1.0) <= cfg.tol:
                    boundary.add(tuple(sorted(e.pair)))
            if sample_glued[i]:
                uf.add(i)
            if i in collapsed:
                continue
            kept.extend(sample_entries[i])
        if status == "infinity":
            kept = []
        components.append(
            ComponentValue(
                cid,
                status,
                tuple(kept),
                tuple(sorted(uf)),
                tuple(sorted(boundary)),
                tuple(sorted(collapsed)),
            )
        )

    config = cfg.to_json()
    config["eta_radians"] = cfg.eta_radians(gamma)
    return ThomValue(tuple(components), restriction, config)


def umkehr_mapping(
    gamma: DiscreteEmbedding,
    c,
    tb: ThickenedBlueprint,
    cfg: UmkehrConfig,
) -> ThomValue:
    """Mapping-mode evaluation: coincidences glue instead of collapsing.

    Forces t_homotopy to 1, so tube clearance is disabled and the result
    on disjoint strands agrees with umkehr at t = 1.
    """
    return umkehr(gamma, c, tb, replace(cfg, mapping=True, t_homotopy=1.0))


# ---------------------------------------------------------------------------
# Self-intersection locus.


@dataclass(frozen=True)
class LocusInterval:
    """Maximal parameter interval of near-coincidence on one strand."""

    label: int
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def contractible(self) -> bool:
        return self.length < TWO_PI - 1e-9

    def to_json(self) -> dict:
        return {"label": self.label, "start": self.start, "end": self.end}


def _entry_points(c, bp: Blueprint, label: int, angles: np.ndarray) -> np.ndarray:
    """Vectorized collapse of circle angles onto the timber boundary."""
    body = c.timber(label)
    cpt = bp.centroids[label - 1]
    pts = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    d = cpt - pts
    t_entry = np.zeros(len(angles))
    for h, side in body.constraints:
        gs = side * (pts @ h.normal - h.offset)
        gc = side * (float(cpt @ h.normal) - h.offset)
        tj = np.where(gs < 0.0, gs / (gs - gc), 0.0)
        t_entry = np.maximum(t_entry, tj)
    return pts + t_entry[:, None] * d


def _exit_angles(cpt: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vectorized circle exit angles of rays from cpt through rows of B."""
    d = B - cpt
    qa = np.einsum("ij,ij->i", d, d)
    qb = 2.0 * (d @ cpt)
    qc = float(cpt @ cpt) - 1.0
    disc = np.maximum(qb * qb - 4.0 * qa * qc, 0.0)
    u = (-qb + np.sqrt(disc)) / (2.0 * qa)
    s = cpt + u[:, None] * d
    return np.mod(np.arctan2(s[:, 1], s[:, 0]), TWO_PI)


def self_intersection_locus(
    gamma: DiscreteEmbedding,
    c,
    tol: float = TOL,
    density: int = 2048,
) -> list:
    """Parameter intervals where a strand's image meets a partner strand.

    For each strand label and each arc of the complement of its trace, the
    arc is sampled on a uniform grid; a parameter is marked when some
    collapse partner's strand point lies within tol of this strand's
    point.  Consecutive marked parameters merge into maximal intervals;
    isolated marks yield degenerate single-parameter intervals.
    """
    _require_circle(c)
    if gamma.k != c.k:
        raise UmkehrError(f"strand count {gamma.k} != arity {c.k}")
    if density < 2:
        raise UmkehrError(f"density must be >= 2, got {density}")
    from .blueprint import build_blueprint

    bp = build_blueprint(c)
    out = []
    for label in range(1, c.k + 1):
        comp = c.trace(label).arcs.complement()
        for s0, s1 in comp.arcs:
            grid = np.linspace(s0, s1, density)
            landed = _entry_points(c, bp, label, grid)
            marked = np.zeros(density, dtype=bool)
            own = gamma.points_at(label, grid)
            for other in range(1, c.k + 1):
                if other == label:
                    continue
                body = c.timber(other)
                member = np.ones(density, dtype=bool)
                on_cut = np.zeros(density, dtype=bool)
                for h, side in body.constraints:
                    val = landed @ h.normal - h.offset
                    member &= side * val >= -tol
                    on_cut |= np.abs(val) <= tol
                sel = member & on_cut
                if not np.any(sel):
                    continue
                partner = _exit_angles(bp.centroids[other - 1], landed[sel])
                theirs = gamma.points_at(other, partner)
                diff = gamma.metric.displacement_many(np.zeros(gamma.metric.d), theirs - own[sel])
                marked[sel] |= np.linalg.norm(diff, axis=1) <= tol
            idxs = np.flatnonzero(marked)
            if idxs.size == 0:
                continue
            run_start = idxs[0]
            prev = idxs[0]
            for ix in idxs[1:]:
                if ix == prev + 1:
                    prev = ix
                    continue
                out.append(LocusInterval(label, float(grid[run_start]), float(grid[prev])))
                run_start = ix
                prev = ix
            out.append(LocusInterval(label, float(grid[run_start]), float(grid[prev])))
    return out
