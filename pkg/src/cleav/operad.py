"""Trees of oriented cuts splitting the round sphere.

A k-ary operation is a rooted binary tree whose internal nodes carry
oriented hyperplanes and whose leaves carry the labels 1..k in some order.
Walking from the root, each cut splits the inherited region in two, the
normal side going to the left child.  The operation is admissible when
every cut leaves part of the sphere on both sides; the k convex regions at
the leaves are called timbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .geom import (
    TOL,
    ConvexBody,
    OrientedHyperplane,
    SphereRegion,
    clip,
    sphere_trace,
    unit_disk,
)


class OperadError(ValueError):
    """Invalid tree, bad labels, or an inadmissible cut."""


class DegeneratePlane(OperadError):
    """A cut plane misses the unit sphere entirely."""


class NonCleaving(OperadError):
    """Some cut leaves an empty sphere trace on one side."""


class LabelError(OperadError):
    """Leaf labels are not a permutation of 1..k."""


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Internal:
    plane: OrientedHyperplane
    left: "Node"
    right: "Node"


Node = Union[Leaf, Internal]


def tree_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    return {
        "plane": node.plane.to_json(),
        "left": tree_to_json(node.left),
        "right": tree_to_json(node.right),
    }


def tree_from_json(doc: object) -> Node:
    if not isinstance(doc, dict):
        raise OperadError(f"tree node must be an object, got {type(doc).__name__}")
    if "leaf" in doc:
        label = doc["leaf"]
        if isinstance(label, bool) or not isinstance(label, int) or label < 1:
            raise OperadError(f"leaf label must be a positive integer, got {label!r}")
        return Leaf(label)
    for field in ("plane", "left", "right"):
        if field not in doc:
            raise OperadError(f"internal node missing field {field!r}")
    plane = OrientedHyperplane.from_json(doc["plane"])
    return Internal(plane, tree_from_json(doc["left"]), tree_from_json(doc["right"]))


def leaf_labels(node: Node) -> list[int]:
    if isinstance(node, Leaf):
        return [node.label]
    return leaf_labels(node.left) + leaf_labels(node.right)


def _map_labels(node: Node, f: Callable[[int], int]) -> Node:
    if isinstance(node, Leaf):
        return Leaf(f(node.label))
    return Internal(node.plane, _map_labels(node.left, f), _map_labels(node.right, f))


@dataclass(frozen=True)
class NodeCut:
    """One internal node: its plane and the region the cut inherits."""

    path: str
    plane: OrientedHyperplane
    body: ConvexBody


@dataclass(frozen=True)
class Cleavage:
    """A validated operation: tree plus the regions it produces.

    timbers and traces are indexed by leaf label, not by planar position;
    cuts lists the internal nodes in pre-order.
    """

    n: int
    tree: Node
    k: int
    timbers: tuple[ConvexBody, ...]
    traces: tuple[SphereRegion, ...]
    cuts: tuple[NodeCut, ...]
    incoming: ConvexBody

    def timber(self, label: int) -> ConvexBody:
        return self.timbers[label - 1]

    def trace(self, label: int) -> SphereRegion:
        return self.traces[label - 1]

    def to_json(self) -> dict:
        return {"n": self.n, "tree": tree_to_json(self.tree)}


def validate(
    tree: Node,
    n: int = 1,
    tol: float = TOL,
    within: ConvexBody | None = None,
) -> Cleavage:
    """Check every cut of the tree and split the region into timbers.

    Cuts apply from the root down, the normal side of each plane going to
    the left child.  `within` restricts the root region (default: the whole
    ball); traces are still reported as absolute sphere regions.

    Raises DegeneratePlane when a plane misses the unit sphere, NonCleaving
    when either side of a cut retains no sphere trace (the message names
    the node by its root.left.right... path), and LabelError when the leaf
    labels are not a permutation of 1..k.
    """
    if n < 1:
        raise OperadError(f"sphere dimension must be >= 1, got {n}")
    dim = n + 1
    root_body = unit_disk(dim) if within is None else within
    if root_body.dim != dim:
        raise OperadError(f"root region has dim {root_body.dim}, expected {dim}")
    leaves: list[tuple[int, ConvexBody]] = []
    cuts: list[NodeCut] = []

    def walk(node: Node, body: ConvexBody, path: str) -> None:
        if isinstance(node, Leaf):
            leaves.append((node.label, body))
            return
        plane = node.plane
        if plane.dim != dim:
            raise OperadError(f"plane at {path} has dim {plane.dim}, expected {dim}")
        if abs(plane.offset) >= 1.0:
            raise DegeneratePlane(
                f"cut at {path} misses the sphere: |offset| = {abs(plane.offset)!r} >= 1"
            )
        cuts.append(NodeCut(path, plane, body))
        halves = clip(body, plane, 1), clip(body, plane, -1)
        for half, side_name in zip(halves, ("left", "right")):
            if not sphere_trace(half).is_nonempty(tol):
                raise NonCleaving(
                    f"cut at {path} leaves no sphere trace on the {side_name} side"
                )
        walk(node.left, halves[0], path + ".left")
        walk(node.right, halves[1], path + ".right")

    walk(tree, root_body, "root")
    k = len(leaves)
    labels = sorted(lab for lab, _ in leaves)
    if labels != list(range(1, k + 1)):
        raise LabelError(f"leaf labels {labels} are not a permutation of 1..{k}")
    by_label = dict(leaves)
    timbers = tuple(by_label[i] for i in range(1, k + 1))
    traces = tuple(sphere_trace(b) for b in timbers)
    return Cleavage(n, tree, k, timbers, traces, tuple(cuts), root_body)


def cleavage_from_json(doc: object, tol: float = TOL) -> Cleavage:
    if not isinstance(doc, dict):
        raise OperadError("cleavage document must be an object")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise OperadError(f"field 'n' must be an integer, got {n!r}")
    if "tree" not in doc:
        raise OperadError("cleavage document missing field 'tree'")
    return validate(tree_from_json(doc["tree"]), n, tol)


def _cloud_traces_agree(ta: SphereRegion, tb: SphereRegion, tol: float) -> bool:
    # Shared sample cloud; ignore points within a hair of either boundary,
    # where membership is float noise.
    pts = ta.points
    band = max(tol, 1e-9)
    near = np.zeros(len(pts), dtype=bool)
    for region in (ta, tb):
        for h, _side in region.body.constraints:
            g = pts @ h.normal - h.offset
            near |= np.abs(g) <= band
    return not np.any((ta.mask != tb.mask) & ~near)


def chop_equal(a: Cleavage, b: Cleavage, tol: float = 1e-9) -> bool:
    """Whether a and b carve out the same sphere region for every label."""
    if a.k != b.k:
        raise OperadError(f"arity mismatch: {a.k} != {b.k}")
    if a.n != b.n:
        raise OperadError(f"sphere dimension mismatch: {a.n} != {b.n}")
    if a.n == 1:
        return all(
            ta.arcs.sym_diff_measure(tb.arcs) <= tol
            for ta, tb in zip(a.traces, b.traces)
        )
    return all(
        _cloud_traces_agree(ta, tb, tol) for ta, tb in zip(a.traces, b.traces)
    )


def compose(outer: Cleavage, i: int, inner, tol: float = TOL) -> Cleavage:
    """Graft a tree at outer's leaf labeled i and revalidate the whole tree.

    `inner` is a decorated tree (a Cleavage is accepted too; its tree is
    used). Inner labels shift to i..i+m-1; outer labels above i shift up by
    m-1. Raises NonCleaving when an inner cut fails inside outer's timber i.
    """
    if isinstance(inner, Cleavage):
        if outer.n != inner.n:
            raise OperadError(f"sphere dimension mismatch: {outer.n} != {inner.n}")
        inner = inner.tree
    if not isinstance(inner, (Leaf, Internal)):
        raise OperadError(f"inner must be a decorated tree, got {type(inner).__name__}")
    if not 1 <= i <= outer.k:
        raise OperadError(f"slot {i} out of range 1..{outer.k}")
    inner_labels = sorted(leaf_labels(inner))
    m = len(inner_labels)
    if inner_labels != list(range(1, m + 1)):
        raise LabelError(f"inner leaf labels {inner_labels} are not a permutation of 1..{m}")
    inner_tree = _map_labels(inner, lambda lab: lab + i - 1)

    def graft(node: Node) -> Node:
        if isinstance(node, Leaf):
            if node.label == i:
                return inner_tree
            return Leaf(node.label + m - 1 if node.label > i else node.label)
        return Internal(node.plane, graft(node.left), graft(node.right))

    return validate(graft(outer.tree), outer.n, tol, within=outer.incoming)


@dataclass(frozen=True)
class Permutation:
    """Bijection of 1..k stored as the tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise OperadError(f"not a permutation of 1..{len(images)}: {self.images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @property
    def k(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        if not 1 <= i <= self.k:
            raise OperadError(f"index {i} out of range 1..{self.k}")
        return self.images[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Permutation(tuple(inv))

    def after(self, other: "Permutation") -> "Permutation":
        """Composite applying `other` first, then self."""
        if self.k != other.k:
            raise OperadError(f"size mismatch: {self.k} != {other.k}")
        return Permutation(tuple(self(other(i)) for i in range(1, self.k + 1)))

    @property
    def sign(self) -> int:
        inversions = 0
        im = self.images
        for i in range(len(im)):
            for j in range(i + 1, len(im)):
                if im[i] > im[j]:
                    inversions += 1
        return -1 if inversions % 2 else 1


def permute(c: Cleavage, sigma: Permutation, tol: float = TOL) -> Cleavage:
    """Relabel leaves by sigma; timber sigma(i) of the result is timber i of c.

    The orientation sign of the relabeling is sigma.sign.
    """
    if sigma.k != c.k:
        raise OperadError(f"permutation size {sigma.k} != arity {c.k}")
    tree = _map_labels(c.tree, sigma)
    return validate(tree, c.n, tol, within=c.incoming)


def unit(n: int = 1) -> Cleavage:
    """The identity operation: a single leaf, no cuts."""
    return validate(Leaf(1), n)
