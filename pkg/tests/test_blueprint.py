import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cleav import blueprint as bp_mod
from cleav import geom, operad

PI = math.pi


def chord(nx, ny, offset):
    return geom.OrientedHyperplane([nx, ny], offset)


def chord_cleavage(offset=0.0):
    return operad.validate(
        operad.Internal(chord(1, 0, offset), operad.Leaf(1), operad.Leaf(2))
    )


def tee_cleavage():
    """Root cut x=0; the left half is cut again by y=0."""
    return operad.validate(
        operad.Internal(
            chord(1, 0, 0.0),
            operad.Leaf(1),
            operad.Internal(chord(0, 1, 0.0), operad.Leaf(2), operad.Leaf(3)),
        )
    )


def parallel_cleavage():
    return operad.validate(
        operad.Internal(
            chord(1, 0, 0.5),
            operad.Leaf(1),
            operad.Internal(chord(1, 0, -0.5), operad.Leaf(2), operad.Leaf(3)),
        )
    )


def random_cleavage(seed, max_internal=3):
    rng = np.random.default_rng(seed)

    def build(labels):
        if len(labels) == 1:
            return operad.Leaf(labels[0])
        cut = int(rng.integers(1, len(labels)))
        normal = rng.normal(size=2)
        while np.linalg.norm(normal) < 1e-6:
            normal = rng.normal(size=2)
        plane = geom.OrientedHyperplane(normal, rng.uniform(-0.7, 0.7))
        return operad.Internal(plane, build(labels[:cut]), build(labels[cut:]))

    for _ in range(300):
        k = int(rng.integers(2, max_internal + 2))
        labels = [int(x) for x in rng.permutation(k) + 1]
        try:
            c = operad.validate(build(labels))
        except operad.OperadError:
            continue
        # Keep timbers fat enough that centroids sit well inside.
        if min(t.arcs.measure() for t in c.traces) > 0.2:
            return c
    return chord_cleavage()


class TestBuild:
    def test_single_chord(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        assert len(bp.pieces) == 1
        assert bp.n_components == 1
        assert bp.piece_components == (0,)
        pts = sorted([bp.pieces[0].a[1], bp.pieces[0].b[1]])
        assert pts == pytest.approx([-1.0, 1.0], abs=1e-12)
        assert abs(bp.pieces[0].a[0]) < 1e-12

    def test_unit_has_empty_diagram(self):
        bp = bp_mod.build_blueprint(operad.unit())
        assert bp.pieces == ()
        assert bp.n_components == 0

    def test_tee_pieces(self):
        bp = bp_mod.build_blueprint(tee_cleavage())
        assert len(bp.pieces) == 2
        # Full chord plus a half chord stopping at the root cut.
        lengths = sorted(p.length for p in bp.pieces)
        assert lengths == pytest.approx([1.0, 2.0], abs=1e-12)
        assert bp.n_components == 1

    def test_parallel_components(self):
        bp = bp_mod.build_blueprint(parallel_cleavage())
        assert len(bp.pieces) == 2
        assert bp.n_components == 2
        assert sorted(bp.piece_components) == [0, 1]

    def test_faces(self):
        bp = bp_mod.build_blueprint(parallel_cleavage())
        assert len(bp.faces[0]) == 1
        assert len(bp.faces[1]) == 2
        assert len(bp.faces[2]) == 1
        slab_planes = sorted(f.plane.offset for f in bp.faces[1])
        assert slab_planes == pytest.approx([-0.5, 0.5])

    def test_centroids(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        assert bp.centroids[0] == pytest.approx([4 / (3 * PI), 0.0], abs=1e-12)
        assert bp.centroids[1] == pytest.approx([-4 / (3 * PI), 0.0], abs=1e-12)

    def test_rejects_higher_spheres(self):
        tree = operad.Internal(
            geom.OrientedHyperplane([0, 0, 1], 0.0), operad.Leaf(1), operad.Leaf(2)
        )
        c = operad.validate(tree, n=2)
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.build_blueprint(c)


class TestParticipants:
    def test_generic_point(self):
        c = chord_cleavage()
        assert bp_mod.participants(c, [0.0, 0.3]) == (1, 2)

    def test_off_diagram(self):
        c = chord_cleavage()
        assert bp_mod.participants(c, [0.3, 0.3]) == ()

    def test_tee_junction(self):
        assert bp_mod.participants(tee_cleavage(), [0.0, 0.0]) == (1, 2, 3)

    def test_collinear_cross(self):
        c = operad.validate(
            operad.Internal(
                chord(1, 0, 0.0),
                operad.Internal(chord(0, 1, 0.0), operad.Leaf(1), operad.Leaf(2)),
                operad.Internal(chord(0, 1, 0.0), operad.Leaf(3), operad.Leaf(4)),
            )
        )
        assert bp_mod.participants(c, [0.0, 0.0]) == (1, 2, 3, 4)


class TestAlpha:
    def test_frozen_oracle(self):
        c = chord_cleavage()
        s = np.array([math.cos(2.5), math.sin(2.5)])
        hit = bp_mod.alpha(c, 1, s)
        t = math.cos(2.5) / (math.cos(2.5) - 4 / (3 * PI))
        assert hit.point == pytest.approx([0.0, math.sin(2.5) * (1 - t)], abs=1e-12)
        assert hit.point[1] == pytest.approx(0.2072523014526812, abs=1e-12)
        assert hit.t == pytest.approx(0.6536976641360925, abs=1e-12)
        assert hit.plane is not None
        assert abs(hit.plane.normal[0]) == pytest.approx(1.0)
        assert not hit.corner

    def test_domain_error_inside_trace(self):
        c = chord_cleavage()
        with pytest.raises(bp_mod.AlphaDomainError):
            bp_mod.alpha(c, 1, [1.0, 0.0])
        with pytest.raises(bp_mod.AlphaDomainError):
            bp_mod.alpha(c, 2, [-1.0, 0.0])

    def test_trace_endpoint_is_fixed(self):
        c = chord_cleavage()
        hit = bp_mod.alpha(c, 1, [0.0, 1.0])
        assert hit.point == pytest.approx([0.0, 1.0], abs=1e-12)
        assert hit.t == pytest.approx(0.0)
        assert hit.plane is None

    def test_not_on_circle(self):
        with pytest.raises(bp_mod.AlphaDomainError):
            bp_mod.alpha(chord_cleavage(), 1, [0.5, 0.0])

    def test_unit_has_no_domain(self):
        with pytest.raises(bp_mod.AlphaDomainError):
            bp_mod.alpha(operad.unit(), 1, [1.0, 0.0])

    def test_corner_hit(self):
        c = tee_cleavage()
        cen = geom.centroid(c.timber(2))
        s = -cen / np.linalg.norm(cen)
        hit = bp_mod.alpha(c, 2, s)
        assert hit.corner
        assert hit.point == pytest.approx([0.0, 0.0], abs=1e-9)
        assert hit.face_index == 0

    def test_explicit_centroid_matches(self):
        c = chord_cleavage()
        s = np.array([math.cos(2.2), math.sin(2.2)])
        a = bp_mod.alpha(c, 1, s)
        b = bp_mod.alpha(c, 1, s, centroid_point=geom.centroid(c.timber(1)))
        assert a.point == pytest.approx(b.point, abs=0)


class TestPreimage:
    def test_roundtrip_through_oracle(self):
        c = chord_cleavage()
        bp = bp_mod.build_blueprint(c)
        s = np.array([math.cos(2.5), math.sin(2.5)])
        hit = bp_mod.alpha(c, 1, s)
        pre = bp_mod.alpha_preimage(bp, hit.point)
        assert [lab for lab, _ in pre] == [1, 2]
        assert pre[0][1] == pytest.approx(s, abs=1e-12)
        # Each preimage sits outside its own timber's trace; by symmetry
        # timber 2's exit point is the mirror image of s.
        assert pre[1][1] == pytest.approx([-math.cos(2.5), math.sin(2.5)], abs=1e-12)

    def test_preimage_count_generic(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        assert len(bp_mod.alpha_preimage(bp, [0.0, 0.3])) == 2

    def test_preimage_count_tee(self):
        bp = bp_mod.build_blueprint(tee_cleavage())
        assert len(bp_mod.alpha_preimage(bp, [0.0, 0.0])) == 3

    def test_off_diagram_rejected(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        with pytest.raises(bp_mod.BlueprintError) as exc:
            bp_mod.alpha_preimage(bp, [0.3, 0.3])
        assert "not on blueprint" in str(exc.value)

    def test_chord_endpoint_returns_itself(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        pre = bp_mod.alpha_preimage(bp, [0.0, 1.0])
        assert len(pre) == 2
        for _, s in pre:
            assert s == pytest.approx([0.0, 1.0], abs=1e-9)

    def test_empty_diagram(self):
        bp = bp_mod.build_blueprint(operad.unit())
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.alpha_preimage(bp, [0.0, 0.0])


class TestSpine:
    def test_segment(self):
        s = bp_mod.spine(1, 0)
        assert (s.dim, s.vertex, s.edges) == (1, 0, ((0, 1),))
        s2 = bp_mod.spine(1, 1)
        assert (s2.dim, s2.vertex, s2.edges) == (1, 1, ((0, 1),))

    def test_triangle_middle(self):
        s = bp_mod.spine(2, 1)
        assert s.edges == ((0, 1), (1, 2))

    def test_tetrahedron_corner(self):
        s = bp_mod.spine(3, 0)
        assert s.edges == ((0, 1), (0, 2), (0, 3))

    def test_vertex_out_of_range(self):
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.spine(1, 2)
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.spine(2, -1)


class TestThicken:
    def test_single_chord_counts(self):
        tb = bp_mod.thicken(chord_cleavage(), density=5)
        assert len(tb.samples) == 5
        assert tb.n_components == 1
        for s in tb.samples:
            assert s.component == 0
            assert s.participants == (1, 2)
            assert len(s.spines) == 2
            assert all(sp.dim == 1 for sp in s.spines)

    def test_tee_dedups_junction(self):
        tb = bp_mod.thicken(tee_cleavage(), density=3)
        # 3 + 3 minus the shared junction sample.
        assert len(tb.samples) == 5
        junction = [s for s in tb.samples if np.linalg.norm(s.point) < 1e-9]
        assert len(junction) == 1
        assert junction[0].participants == (1, 2, 3)
        assert all(sp.dim == 2 for sp in junction[0].spines)
        assert [sp.vertex for sp in junction[0].spines] == [0, 1, 2]

    def test_accepts_prebuilt_blueprint(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        tb = bp_mod.thicken(bp, density=4)
        assert tb.blueprint is bp
        assert len(tb.samples) == 4

    def test_density_validated(self):
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.thicken(chord_cleavage(), density=1)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_participant_count_law(self, seed):
        c = random_cleavage(seed)
        tb = bp_mod.thicken(c, density=7)
        bp = tb.blueprint
        for s in tb.samples:
            near = sum(
                1
                for p in bp.pieces
                if bp_mod._point_seg_distance(s.point, p.a, p.b) <= bp.tol
            )
            assert len(s.participants) == near + 1
            assert len(s.participants) >= 2
            assert len(s.spines) == len(s.participants)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_preimage_roundtrip(self, seed):
        c = random_cleavage(seed)
        tb = bp_mod.thicken(c, density=5)
        for s in tb.samples:
            pre = bp_mod.alpha_preimage(tb.blueprint, s.point)
            assert len(pre) == len(s.participants)
            for label, sphere_pt in pre:
                hit = bp_mod.alpha(c, label, sphere_pt)
                assert hit.point == pytest.approx(s.point, abs=1e-8)


class TestStableDegree:
    def test_examples(self):
        assert bp_mod.stable_degree(tee_cleavage(), 2) == (2, 2)
        assert bp_mod.stable_degree(parallel_cleavage(), 2) == (4, 0)

    def test_unit(self):
        assert bp_mod.stable_degree(operad.unit(), 3) == (0, 0)

    def test_chord(self):
        assert bp_mod.stable_degree(chord_cleavage(), 3) == (3, 0)

    def test_bad_dim(self):
        with pytest.raises(bp_mod.BlueprintError):
            bp_mod.stable_degree(chord_cleavage(), 0)

    def test_components_op(self):
        assert bp_mod.components(operad.unit()) == 0
        assert bp_mod.components(chord_cleavage()) == 1
        assert bp_mod.components(parallel_cleavage()) == 2

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=30, deadline=None)
    def test_degree_sum(self, seed):
        c = random_cleavage(seed)
        bp = bp_mod.build_blueprint(c)
        assert 0 <= bp.n_components <= c.k - 1
        for dim_m in (2, 3):
            a, b = bp_mod.stable_degree(bp, dim_m)
            assert a + b == dim_m * (c.k - 1)


class TestExport:
    def test_blueprint_json_roundtrips_through_json(self):
        import json

        bp = bp_mod.build_blueprint(tee_cleavage())
        doc = json.loads(json.dumps(bp_mod.blueprint_to_json(bp)))
        assert doc["n_components"] == 1
        assert len(doc["pieces"]) == 2
        assert {p["component"] for p in doc["pieces"]} == {0}
        assert len(doc["faces"]) == 3
        for timber_faces in doc["faces"]:
            for f in timber_faces:
                assert set(f) == {"constraint", "plane", "side", "a", "b"}

    def test_thickened_json(self):
        tb = bp_mod.thicken(chord_cleavage(), density=3)
        doc = bp_mod.thickened_to_json(tb)
        assert doc["n_components"] == 1
        assert len(doc["samples"]) == 3
        s0 = doc["samples"][0]
        assert s0["participants"] == [1, 2]
        assert s0["spines"][0]["edges"] == [[0, 1]]

    def test_obj_export(self):
        bp = bp_mod.build_blueprint(chord_cleavage())
        text = bp_mod.export_obj(bp)
        v_lines = [ln for ln in text.splitlines() if ln.startswith("v ")]
        l_lines = [ln for ln in text.splitlines() if ln.startswith("l ")]
        # one face per timber plus the single cut piece
        assert len(l_lines) == 3
        assert len(v_lines) == 2 * len(l_lines)
        for ln in l_lines:
            _, a, b = ln.split()
            assert 1 <= int(a) <= len(v_lines) and 1 <= int(b) <= len(v_lines)
