import random
from fractions import Fraction

import pytest

from xbounded import (
    Disconnected,
    LabeledGraph,
    LoopEdge,
    MissingLabel,
    RotationSystem,
    Walk,
    WalkNotInGraph,
    algebraic_intersection,
    canonical_rotation,
    instance_to_dict,
    is_planar_rotation,
    is_unit_normalized,
    orient_by_gamma,
    parse_instance,
    split_components,
    subdivide_to_unit,
    trace_faces,
    validate,
    walk_from_vertices,
)
from xbounded.graphs import CombEmbedding


def path_graph(labels):
    ids = list(range(len(labels)))
    edges = [(i, i + 1) for i in range(len(labels) - 1)]
    return LabeledGraph(ids, edges, dict(zip(ids, labels)))


def star4():
    # center c at the origin, one leaf at each compass point
    g = LabeledGraph(
        ["c", "E", "N", "W", "S"],
        [("c", "E"), ("c", "N"), ("c", "W"), ("c", "S")],
        {"c": 1, "E": 1, "N": 2, "W": 1, "S": 0},
    )
    # ccw rotation at the center: E, N, W, S
    rot = RotationSystem(
        g,
        {
            "c": (0, 2, 4, 6),
            "E": (1,),
            "N": (3,),
            "W": (5,),
            "S": (7,),
        },
    )
    return g, rot


def triangle():
    # a bottom-left, b bottom-right, c on top; rotations read off the drawing
    g = LabeledGraph(
        ["a", "b", "c"],
        [("a", "b"), ("b", "c"), ("c", "a")],
        {"a": 0, "b": 0, "c": 1},
    )
    rot = RotationSystem(g, {"a": (0, 5), "b": (2, 1), "c": (4, 3)})
    return g, rot


def random_tree(rng, n):
    ids = list(range(n))
    edges = [(rng.randrange(i), i) for i in range(1, n)]
    gamma = {i: rng.randrange(4) for i in ids}
    return LabeledGraph(ids, edges, gamma)


def random_rotation(rng, g):
    rot = {}
    for v in g.vertices:
        ds = list(g.darts_at(v))
        rng.shuffle(ds)
        rot[v] = tuple(ds)
    return RotationSystem(g, rot)


# ---------------------------------------------------------------------------
# construction and validation


def test_loop_edge_rejected():
    with pytest.raises(LoopEdge):
        LabeledGraph(["a"], [("a", "a")], {"a": 0})


def test_duplicate_vertex_rejected():
    with pytest.raises(ValueError):
        LabeledGraph(["a", "a"], [], {"a": 0})


def test_edge_to_unknown_vertex_rejected():
    with pytest.raises(ValueError):
        LabeledGraph(["a"], [("a", "b")], {"a": 0})


def test_validate_disconnected():
    g = LabeledGraph(["a", "b"], [], {"a": 0, "b": 0})
    with pytest.raises(Disconnected):
        validate(g)


def test_validate_missing_and_bad_labels():
    g = LabeledGraph(["a", "b"], [("a", "b")], {"a": 0})
    with pytest.raises(MissingLabel):
        validate(g)
    g2 = LabeledGraph(["a", "b"], [("a", "b")], {"a": 0, "b": -1})
    with pytest.raises(MissingLabel):
        validate(g2)
    g3 = LabeledGraph(["a", "b"], [("a", "b")], {"a": 0, "b": True})
    with pytest.raises(MissingLabel):
        validate(g3)


def test_validate_accepts_and_returns_instance():
    g = path_graph([0, 1, 2])
    assert validate(g) is g


def test_parallel_edges_allowed():
    g = LabeledGraph(["a", "b"], [("a", "b"), ("a", "b")], {"a": 0, "b": 1})
    assert g.degree("a") == 2
    assert g.darts_at("a") == (0, 2)
    assert g.darts_at("b") == (1, 3)


def test_split_components():
    g = LabeledGraph(
        ["a", "b", "x", "y", "z"],
        [("a", "b"), ("x", "y"), ("y", "z")],
        {"a": 0, "b": 1, "x": 0, "y": 1, "z": 2},
    )
    parts = split_components(g)
    assert [sorted(map(str, p.vertices)) for p in parts] == [["a", "b"], ["x", "y", "z"]]
    for p in parts:
        validate(p)


# ---------------------------------------------------------------------------
# unit normalization


def test_subdivide_to_unit_inserts_intermediate_levels():
    g = LabeledGraph(["a", "b"], [("a", "b")], {"a": 1, "b": 4})
    g2, backmap = subdivide_to_unit(g)
    assert is_unit_normalized(g2)
    path = backmap[0]
    assert path[0] == "a" and path[-1] == "b"
    assert [g2.gamma[v] for v in path] == [1, 2, 3, 4]
    assert len(g2.edges) == 3
    validate(g2)


def test_subdivide_to_unit_descending_edge():
    g = LabeledGraph(["a", "b"], [("a", "b")], {"a": 3, "b": 0})
    g2, backmap = subdivide_to_unit(g)
    assert [g2.gamma[v] for v in backmap[0]] == [3, 2, 1, 0]


def test_subdivide_to_unit_keeps_unit_edges():
    g = path_graph([0, 1, 1])
    g2, backmap = subdivide_to_unit(g)
    assert g2.edges == g.edges
    assert backmap == {0: (0, 1), 1: (1, 2)}


# ---------------------------------------------------------------------------
# rotations, faces, planarity


def test_rotation_must_permute_darts():
    g = path_graph([0, 1, 2])
    with pytest.raises(ValueError):
        RotationSystem(g, {0: (0,), 1: (1, 1), 2: (3,)})


def test_triangle_faces():
    g, rot = triangle()
    faces = trace_faces(g, rot)
    assert len(faces) == 2
    assert is_planar_rotation(g, rot)
    # the face to the left of a->b is the inner triangle a->b->c->a
    inner = next(f for f in faces if 0 in f)
    assert set(inner) == {0, 2, 4}
    outer = next(f for f in faces if 1 in f)
    assert set(outer) == {1, 3, 5}


def test_face_of_corner_matches_wedge():
    g, rot = triangle()
    emb = CombEmbedding(g, rot, 0)
    # corner swept ccw from a->b (east) to a->c (northeast) is the inner face
    inner = emb.face_of_dart(0)
    assert emb.face_of_corner("a", 0) == inner
    # corner swept ccw from a->c back around to a->b is the outer face
    assert emb.face_of_corner("a", 5) == emb.face_of_dart(5)
    assert emb.face_of_corner("a", 5) != inner
    with pytest.raises(ValueError):
        emb.face_of_corner("b", 0)


def test_k4_planar_rotation_has_four_faces():
    # vertex 3 sits inside triangle 0,1,2
    # coordinates: 0=(0,0), 1=(4,0), 2=(2,3), 3=(2,1)
    # ccw angular order of neighbors:
    #   at 0: 1 (0deg), 3 (~27deg), 2 (~56deg)        -> out-darts 0, 6, 5
    #   at 1: 2 (~124deg), 3 (~153deg), 0 (180deg)    -> out-darts 2, 8, 1
    #   at 2: 0 (~236deg), 3 (~270deg), 1 (~304deg)   -> out-darts 4, 10, 3
    #   at 3: 2 (90deg), 0 (~207deg), 1 (~333deg)     -> out-darts 11, 7, 9
    ids = [0, 1, 2, 3]
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    g = LabeledGraph(ids, edges, {i: 0 for i in ids})
    rot = RotationSystem(g, {0: (0, 6, 5), 1: (2, 8, 1), 2: (4, 10, 3), 3: (11, 7, 9)})
    faces = trace_faces(g, rot)
    assert len(faces) == 4
    assert is_planar_rotation(g, rot)
    # flipping one vertex's rotation ruins planarity for K4
    rot_bad = RotationSystem(g, {0: (0, 5, 6), 1: (2, 8, 1), 2: (4, 10, 3), 3: (11, 7, 9)})
    assert not is_planar_rotation(g, rot_bad)


def test_random_tree_rotations_have_one_face():
    rng = random.Random(7)
    for _ in range(30):
        g = random_tree(rng, rng.randrange(2, 12))
        rot = random_rotation(rng, g)
        faces = trace_faces(g, rot)
        assert len(faces) == 1
        assert is_planar_rotation(g, rot)
        assert sorted(faces[0]) == list(range(g.num_darts))


# ---------------------------------------------------------------------------
# gamma orientation


def test_orient_by_gamma_levels_and_ties():
    g = LabeledGraph(
        ["b", "a", "z"],
        [("b", "a"), ("z", "a"), ("b", "z")],
        {"b": 2, "a": 1, "z": 1},
    )
    directed = orient_by_gamma(g)
    assert directed[0] == ("a", "b")
    assert directed[1] == ("a", "z")  # tie broken toward larger id
    assert directed[2] == ("z", "b")


# ---------------------------------------------------------------------------
# walks


def test_walk_shape_and_properties():
    g = path_graph([0, 1, 2, 1])
    w = walk_from_vertices(g, [0, 1, 2, 3])
    assert not w.closed
    assert w.is_path()
    assert w.span(g) == (0, 2)
    assert w.reverse().vertices == (3, 2, 1, 0)
    with pytest.raises(ValueError):
        Walk((0, 1), (0, 1))


def test_closed_walk_detection():
    g = LabeledGraph([0, 1, 2], [(0, 1), (1, 2), (2, 0)], {0: 0, 1: 0, 2: 0})
    w = Walk((0, 1, 2, 0), (0, 1, 2))
    assert w.closed
    assert w.is_path()
    w2 = Walk((0, 1, 0, 2, 0), (0, 0, 2, 2))
    assert w2.closed
    assert not w2.is_path()


def test_walk_not_in_graph():
    g = path_graph([0, 1, 2])
    with pytest.raises(WalkNotInGraph):
        walk_from_vertices(g, [0, 2])
    w = Walk((0, 1), (1,))  # edge 1 joins vertices 1 and 2, not 0 and 1
    with pytest.raises(WalkNotInGraph):
        algebraic_intersection(g, canonical_rotation(g), w, w)
    w2 = Walk((0, 5), (0,))
    with pytest.raises(WalkNotInGraph):
        algebraic_intersection(g, canonical_rotation(g), w2, w2)


# ---------------------------------------------------------------------------
# algebraic intersection number


def test_crossing_paths_at_degree_four_vertex():
    g, rot = star4()
    w1 = walk_from_vertices(g, ["W", "c", "E"])
    w2 = walk_from_vertices(g, ["S", "c", "N"])
    i12 = algebraic_intersection(g, rot, w1, w2)
    assert abs(i12) == 1
    assert algebraic_intersection(g, rot, w2, w1) == -i12
    assert algebraic_intersection(g, rot, w1.reverse(), w2) == -i12
    assert algebraic_intersection(g, rot, w1, w2.reverse()) == -i12
    assert algebraic_intersection(g, rot, w1.reverse(), w2.reverse()) == i12


def test_touching_paths_do_not_cross():
    g, rot = star4()
    w1 = walk_from_vertices(g, ["W", "c", "E"])
    w2 = walk_from_vertices(g, ["S", "c", "S"])  # hairpin is not even a wedge
    # hairpin wedges are skipped entirely
    assert algebraic_intersection(g, rot, w1, w2) == 0


def test_shared_germ_counts_half():
    g, rot = star4()
    w1 = walk_from_vertices(g, ["W", "c", "E"])
    w2 = walk_from_vertices(g, ["S", "c", "W"])  # ends running along w1's first edge
    val = algebraic_intersection(g, rot, w1, w2)
    assert abs(val) == Fraction(1, 2)
    assert algebraic_intersection(g, rot, w1, w2.reverse()) == -val


def test_identical_wedge_contributes_zero():
    g, rot = star4()
    w1 = walk_from_vertices(g, ["W", "c", "E"])
    assert algebraic_intersection(g, rot, w1, w1) == 0
    assert algebraic_intersection(g, rot, w1, w1.reverse()) == 0


def test_endpoints_do_not_contribute():
    # two paths sharing only endpoints never cross
    g = LabeledGraph(
        ["u", "v", "x", "y"],
        [("u", "x"), ("x", "v"), ("u", "y"), ("y", "v")],
        {"u": 0, "v": 0, "x": 1, "y": 1},
    )
    rng = random.Random(3)
    for _ in range(20):
        rot = random_rotation(rng, g)
        w1 = walk_from_vertices(g, ["u", "x", "v"])
        w2 = walk_from_vertices(g, ["u", "y", "v"])
        assert algebraic_intersection(g, rot, w1, w2) == 0


def test_closed_walks_on_planar_rotation_cross_zero():
    ids = [0, 1, 2, 3]
    edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    g = LabeledGraph(ids, edges, {i: 0 for i in ids})
    rot = RotationSystem(g, {0: (0, 6, 5), 1: (2, 8, 1), 2: (4, 10, 3), 3: (11, 7, 9)})
    assert is_planar_rotation(g, rot)
    t1 = Walk((0, 1, 3, 0), (0, 4, 3))
    t2 = Walk((1, 2, 3, 1), (1, 5, 4))
    t3 = Walk((0, 1, 2, 0), (0, 1, 2))
    for wa in (t1, t2, t3):
        for wb in (t1, t2, t3):
            assert algebraic_intersection(g, rot, wa, wb) == 0
            assert algebraic_intersection(g, rot, wa, wb.reverse()) == 0


def test_closed_walks_on_random_tree_cross_zero():
    # every rotation of a tree is planar, so closed walks must never cross
    rng = random.Random(11)
    for _ in range(25):
        g = random_tree(rng, rng.randrange(3, 10))
        rot = random_rotation(rng, g)

        def closed_walk_from(v0):
            verts = [v0]
            eids = []
            for _ in range(rng.randrange(2, 7)):
                d = rng.choice(g.darts_at(verts[-1]))
                eids.append(d >> 1)
                verts.append(g.dart_head(d))
            back = list(reversed(eids))
            for e in back:
                u, v = g.edges[e]
                verts.append(u if verts[-1] == v else v)
            return Walk(tuple(verts), tuple(eids + back))

        w1 = closed_walk_from(rng.choice(g.vertices))
        w2 = closed_walk_from(rng.choice(g.vertices))
        assert w1.closed and w2.closed
        assert algebraic_intersection(g, rot, w1, w2) == 0


def test_overlapping_walks_halves_cancel_or_add():
    # w1 and w2 run together along the middle edge a-b; each end contributes
    # a half.  Halves cancel when the walks part to the same sides they
    # entered from, and add to a full crossing when one end is twisted.
    g = LabeledGraph(
        ["L1", "L2", "a", "b", "R1", "R2"],
        [("L1", "a"), ("L2", "a"), ("a", "b"), ("b", "R1"), ("b", "R2")],
        {"L1": 0, "L2": 0, "a": 0, "b": 0, "R1": 0, "R2": 0},
    )
    w1 = Walk(("L1", "a", "b", "R1"), (0, 2, 3))
    w2 = Walk(("L2", "a", "b", "R2"), (1, 2, 4))
    tips = {"L1": (0,), "L2": (2,), "R1": (7,), "R2": (9,)}
    # L1 northwest, L2 southwest of a; R1 northeast, R2 southeast of b
    rot_flat = RotationSystem(g, {"a": (4, 1, 3), "b": (6, 5, 8), **tips})
    assert algebraic_intersection(g, rot_flat, w1, w2) == 0
    # swap R1 and R2: the companions must cross once
    rot_tw = RotationSystem(g, {"a": (4, 1, 3), "b": (8, 5, 6), **tips})
    val = algebraic_intersection(g, rot_tw, w1, w2)
    assert val == Fraction(-1)
    assert algebraic_intersection(g, rot_tw, w2, w1) == 1


# ---------------------------------------------------------------------------
# JSON round trip


def test_parse_and_serialize_round_trip():
    data = {
        "vertices": [{"id": "a", "gamma": 2}, {"id": "b", "gamma": 3}],
        "edges": [["a", "b"]],
    }
    g = parse_instance(data)
    assert g.gamma == {"a": 2, "b": 3}
    assert instance_to_dict(g) == data


def test_parse_rejects_duplicates_and_bad_labels():
    with pytest.raises(ValueError):
        parse_instance({"vertices": [{"id": "a", "gamma": 0}, {"id": "a", "gamma": 1}], "edges": []})
    with pytest.raises(MissingLabel):
        parse_instance({"vertices": [{"id": "a", "gamma": "x"}], "edges": []})
    with pytest.raises(ValueError):
        parse_instance({"vertices": [], "wrong": []})
