"""Tree decision: bridge rows, trimmed star blocks, one PC-tree sweep."""

import itertools
import random

import pytest

from xbounded import (
    LabeledGraph,
    NotATree,
    PreconditionViolated,
    check_isotopy_class,
    count_rotations,
    oracle_decide,
)
from xbounded.ambmatrix import validate_staircase
from xbounded.graphs import CombEmbedding
from xbounded.pctree import enumerate_orders
from xbounded.stars import SubdividedStar, star_matrix, star_to_graph
from xbounded.trees import (
    TreeVerdict,
    assemble_tree_matrix,
    bridge_matrix,
    build_instance,
    core_pc_tree,
    decide_tree,
    star_projection,
    tree_leaves,
)


def tree_graph(gamma, edges):
    return LabeledGraph(list(gamma), edges, gamma)


def two_branch_tree():
    """Branch u (level 1) with leaf legs a, b; a level-2 run u-m-w to
    branch w with leaf legs c, d (level 3) and e (level 1)."""
    return tree_graph(
        {"u": 1, "a": 0, "b": 0, "m": 2, "w": 2, "c": 3, "d": 3, "e": 1},
        [("u", "a"), ("u", "b"), ("u", "m"), ("m", "w"),
         ("w", "c"), ("w", "d"), ("w", "e")],
    )


def reference_star():
    return SubdividedStar(
        5,
        ((5, 4, 3, 2), (5, 6, 5), (5, 6, 5, 4, 3, 2), (5, 6, 7),
         (5, 6, 7), (5, 4, 3, 2), (5, 4, 3, 2)),
    )


def conflicting_quartet():
    return SubdividedStar(
        10,
        ((10, 11, 12, 13),
         (10, 11, 10, 9, 8, 7),
         (10, 9, 10, 11, 12, 11, 10, 9, 8, 7),
         (10, 9, 10, 11, 10, 9, 8, 9, 10, 11, 12, 13)),
    )


def joined_quartets():
    """Two conflicting-quartet stars whose level-7 leg tips are tied
    together; still a tree, and infeasible from either side."""
    legs = conflicting_quartet().legs
    gamma, edges = {}, []
    for side in (0, 1):
        center = f"c{side}"
        gamma[center] = 10
        for li, seq in enumerate(legs):
            prev = center
            for j, lv in enumerate(seq[1:]):
                name = f"s{side}_{li}_{j}"
                gamma[name] = lv
                edges.append((prev, name))
                prev = name
    edges.append(("s0_1_4", "s1_1_4"))
    return tree_graph(gamma, edges)


def random_unit_tree(rng, n):
    verts = [f"v{i}" for i in range(n)]
    gamma = {verts[0]: rng.randrange(2, 5)}
    edges = []
    for i in range(1, n):
        p = verts[rng.randrange(i)]
        gamma[verts[i]] = max(gamma[p] + rng.choice([-1, 0, 1]), 0)
        edges.append((p, verts[i]))
    return tree_graph(gamma, edges)


def quartet_with_noise(rng):
    """The infeasible quartet plus random monotone appendages.

    A supergraph on the same levels inherits every embedding constraint,
    so these stay infeasible no matter where the extra paths attach."""
    g = star_to_graph(conflicting_quartet())
    gamma = dict(g.gamma)
    edges = list(g.edges)
    hosts = list(gamma)
    for t in range(rng.randrange(0, 4)):
        cur = rng.choice(hosts)
        direction = rng.choice([-1, 1])
        for j in range(rng.randrange(1, 4)):
            lv = gamma[cur] + direction
            if lv < 0:
                break
            name = f"x{t}_{j}"
            gamma[name] = lv
            edges.append((cur, name))
            cur = name
    return tree_graph(gamma, edges)


def ones_arc(order, ones):
    flags = [c in ones for c in order]
    boundaries = sum(flags[i] != flags[i - 1] for i in range(len(flags)))
    return boundaries <= 2


# ---------------------------------------------------------------------------
# instance skeleton


def test_build_instance_two_branch_golden():
    ti = build_instance(two_branch_tree())
    assert ti.root == "u"
    assert ti.branch_order == ("w", "u")
    assert ti.leaves == ("a", "b", "c", "d", "e")
    assert ti.core_edges == (
        ("u", "a"), ("u", "b"), ("u", "w"), ("w", "c"), ("w", "d"), ("w", "e")
    )
    assert ti.core_paths[2] == ("u", "m", "w")
    assert ti.parent_path("w") == ("w", "m", "u")
    assert ti.interval_of("w").lo == 1 and ti.interval_of("w").hi == 2
    assert ti.interval_of("u").lo == 0 and ti.interval_of("u").hi == 3


def test_build_instance_rejects_cycle():
    g = tree_graph({"a": 0, "b": 1, "c": 1}, [("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(NotATree):
        build_instance(g)


def test_build_instance_requires_unit_levels():
    g = tree_graph(
        {"a": 0, "b": 2, "c": 1, "d": 1, "e": 1},
        [("a", "b"), ("a", "c"), ("a", "d"), ("a", "e")],
    )
    with pytest.raises(PreconditionViolated):
        build_instance(g)


def test_build_instance_requires_branch_vertex():
    g = tree_graph({"a": 0, "b": 1, "c": 2}, [("a", "b"), ("b", "c")])
    with pytest.raises(PreconditionViolated):
        build_instance(g)


# ---------------------------------------------------------------------------
# star projection


def test_star_projection_of_star_is_identity():
    star = reference_star()
    assert star_projection(star_to_graph(star), "c") == star


def test_star_projection_reads_through_other_branches():
    g = two_branch_tree()
    at_w = star_projection(g, "w")
    assert at_w.center_level == 2
    assert at_w.legs == ((2, 2, 1, 0), (2, 2, 1, 0), (2, 3), (2, 3), (2, 1))
    at_u = star_projection(g, "u")
    assert at_u.legs == ((1, 0), (1, 0), (1, 2, 2, 3), (1, 2, 2, 3), (1, 2, 2, 1))


def test_star_projection_leg_count_equals_leaf_count():
    rng = random.Random(11)
    for _ in range(40):
        g = random_unit_tree(rng, rng.randrange(4, 14))
        branch = [v for v in g.vertices if g.degree(v) >= 3]
        if not branch:
            continue
        v = rng.choice(branch)
        star = star_projection(g, v)
        assert len(star.legs) == len(tree_leaves(g))
        assert star.center_level == g.gamma[v]


# ---------------------------------------------------------------------------
# bridge rows


def test_bridge_matrix_star_is_trivial():
    m = bridge_matrix(star_to_graph(reference_star()))
    assert len(m.rows) == 7
    for row in m.rows:
        assert sorted(row) == ["0"] * 6 + ["1"]


def test_bridge_matrix_smooths_degree_two_runs():
    g = two_branch_tree()
    m = bridge_matrix(g)
    assert len(m.rows) == 6 < len(g.edges)
    assert m.columns == ("a", "b", "c", "d", "e")
    assert m.rows.count("00111") == 1  # the u-w run, recorded once


def test_bridge_orders_match_core_shapes():
    rng = random.Random(23)
    checked = 0
    for _ in range(120):
        g = random_unit_tree(rng, rng.randrange(4, 10))
        leaves = tree_leaves(g)
        if not 3 <= len(leaves) <= 6:
            continue
        if all(g.degree(v) <= 2 for v in g.vertices):
            continue
        ti = build_instance(g)
        m = bridge_matrix(ti)
        anchor, rest = leaves[0], leaves[1:]
        brute = set()
        for perm in itertools.permutations(rest):
            order = (anchor,) + perm
            rows_ok = all(
                ones_arc(order, {c for c in leaves if m.entry(r, c) == "1"})
                for r in range(len(m.rows))
            )
            if rows_ok:
                brute.add(order)
        assert set(enumerate_orders(core_pc_tree(ti))) == brute
        checked += 1
    assert checked > 40


# ---------------------------------------------------------------------------
# matrix assembly


def test_assembly_single_branch_appends_full_star_matrix():
    star = reference_star()
    g = star_to_graph(star)
    assembled = assemble_tree_matrix(build_instance(g))
    bridges = bridge_matrix(g)
    n = len(bridges.rows)
    assert assembled.rows[:n] == bridges.rows
    assert assembled.rows[n:] == star_matrix(star).rows


def test_assembly_two_branch_golden():
    """Hand-checked: w's interval (0,3) strictly contains its guard range
    [1,2] and is dropped; the root keeps both of its intervals."""
    m = assemble_tree_matrix(build_instance(two_branch_tree()))
    assert m.columns == ("a", "b", "c", "d", "e")
    assert m.rows == (
        "10000", "01000", "00111", "00100", "00010", "00001",  # bridges
        "00110",                                               # w: (1,3)
        "00111", "0011*",                                      # u: (0,2), (0,3)
    )


def test_assembly_blocks_child_before_parent():
    g = tree_graph(
        {"p": 1, "p1": 0, "p2": 0, "q": 2, "q1": 1, "r": 3, "r1": 2, "r2": 4},
        [("p", "p1"), ("p", "p2"), ("p", "q"), ("q", "q1"),
         ("q", "r"), ("r", "r1"), ("r", "r2")],
    )
    ti = build_instance(g)
    assert ti.root == "p"
    assert ti.branch_order == ("r", "q", "p")  # deepest first, root last
    ti2 = build_instance(joined_quartets())
    assert ti2.root == "c0"
    assert ti2.branch_order == ("c1", "c0")


def test_assembled_matrix_is_staircase():
    rng = random.Random(31)
    checked = 0
    for _ in range(80):
        g = random_unit_tree(rng, rng.randrange(5, 16))
        if all(g.degree(v) <= 2 for v in g.vertices):
            continue
        validate_staircase(assemble_tree_matrix(build_instance(g)))
        checked += 1
    assert checked > 50


def test_bridge_rows_always_lead_assembly():
    rng = random.Random(37)
    for _ in range(60):
        g = random_unit_tree(rng, rng.randrange(5, 14))
        if all(g.degree(v) <= 2 for v in g.vertices):
            continue
        ti = build_instance(g)
        assembled = assemble_tree_matrix(ti)
        bridges = bridge_matrix(ti)
        assert assembled.rows[: len(bridges.rows)] == bridges.rows


# ---------------------------------------------------------------------------
# decisions


def test_decide_monotone_path():
    g = tree_graph({"a": 0, "b": 1, "c": 2, "d": 3},
                   [("a", "b"), ("b", "c"), ("c", "d")])
    v = decide_tree(g)
    assert v.feasible and v.failed_row is None
    assert v.graph is g


def test_decide_path_with_level_jumps_normalizes():
    g = tree_graph({"a": 0, "b": 2, "c": 0}, [("a", "b"), ("b", "c")])
    v = decide_tree(g)
    assert v.feasible
    assert len(v.graph.vertices) == 5  # one fresh vertex inside each jump


def test_decide_single_vertex_and_single_edge():
    assert decide_tree(tree_graph({"a": 3}, [])).feasible
    v = decide_tree(tree_graph({"a": 3, "b": 4}, [("a", "b")]))
    assert v.feasible and v.leaf_order == ("a", "b")


def test_decide_rejects_non_tree():
    g = tree_graph({"a": 0, "b": 1, "c": 1}, [("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(NotATree):
        decide_tree(g)


def test_verdict_shape_enforced():
    with pytest.raises(ValueError):
        TreeVerdict(True)
    with pytest.raises(ValueError):
        TreeVerdict(False, failed_row=None)


def test_reference_star_graph_feasible():
    v = decide_tree(star_to_graph(reference_star()))
    assert v.feasible
    assert oracle_decide(v.graph).admits


def test_conflicting_quartet_tree_infeasible():
    v = decide_tree(star_to_graph(conflicting_quartet()))
    assert not v.feasible
    assert v.rotation is None and v.leaf_order is None
    assert v.failed_row == 6  # four bridge rows, then the third star row
    assert not oracle_decide(star_to_graph(conflicting_quartet())).admits


def test_joined_quartets_infeasible_from_either_root():
    g = joined_quartets()
    assert not decide_tree(g).feasible
    flipped = LabeledGraph(tuple(reversed(g.vertices)), g.edges, g.gamma)
    assert build_instance(flipped).root != build_instance(g).root
    assert not decide_tree(flipped).feasible


def test_rerooting_keeps_feasible_verdicts():
    rng = random.Random(41)
    checked = 0
    for _ in range(40):
        g = random_unit_tree(rng, rng.randrange(6, 13))
        branch = [v for v in g.vertices if g.degree(v) >= 3]
        if len(branch) < 2:
            continue
        base = decide_tree(g).feasible
        order = list(g.vertices)
        rng.shuffle(order)
        assert decide_tree(LabeledGraph(order, g.edges, g.gamma)).feasible == base
        checked += 1
    assert checked > 10


def test_relabel_invariance():
    rng = random.Random(43)
    for _ in range(25):
        g = random_unit_tree(rng, rng.randrange(4, 12))
        ren = {v: f"n{i}" for i, v in enumerate(g.vertices)}
        h = LabeledGraph(
            [ren[v] for v in g.vertices],
            [(ren[a], ren[b]) for a, b in g.edges],
            {ren[v]: g.gamma[v] for v in g.vertices},
        )
        assert decide_tree(g).feasible == decide_tree(h).feasible


def test_certificates_verify():
    rng = random.Random(47)
    certified = 0
    for _ in range(60):
        g = random_unit_tree(rng, rng.randrange(4, 14))
        v = decide_tree(g)
        if not v.feasible or not v.graph.edges:
            continue
        emb = CombEmbedding(v.graph, v.rotation, 0)
        assert check_isotopy_class(emb).admits
        certified += 1
    assert certified > 40


def test_oracle_agreement_random_mix():
    rng = random.Random(53)
    yeses = noes = 0
    for trial in range(160):
        if trial % 3 == 0:
            g = quartet_with_noise(rng)
        else:
            g = random_unit_tree(rng, rng.randrange(2, 12))
        if count_rotations(g) > 20000:
            continue
        mine = decide_tree(g).feasible
        truth = oracle_decide(g).admits
        assert mine == truth, (g.vertices, g.edges, g.gamma)
        yeses += truth
        noes += not truth
    assert yeses > 60 and noes > 30


def test_oracle_agreement_exhaustive_tiny():
    """Every tree shape on up to five vertices, every unit labeling in
    {0,1,2}: the sweep and the brute-force oracle agree exactly."""
    shapes = {
        3: [[(0, 1), (1, 2)]],
        4: [[(0, 1), (1, 2), (2, 3)], [(0, 1), (0, 2), (0, 3)]],
        5: [
            [(0, 1), (1, 2), (2, 3), (3, 4)],
            [(0, 1), (1, 2), (2, 3), (1, 4)],
            [(0, 1), (0, 2), (0, 3), (0, 4)],
        ],
    }
    agreements = 0
    for n, shaped in shapes.items():
        for edges in shaped:
            for labels in itertools.product((0, 1, 2), repeat=n):
                if any(abs(labels[a] - labels[b]) > 1 for a, b in edges):
                    continue
                g = LabeledGraph(
                    range(n), edges, {i: labels[i] for i in range(n)}
                )
                assert decide_tree(g).feasible == oracle_decide(g).admits
                agreements += 1
    assert agreements > 400
