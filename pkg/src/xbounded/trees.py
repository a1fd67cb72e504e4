"""Level-respecting embeddability of trees by one ambiguous-matrix sweep.

A tree admits an x-bounded embedding exactly when its leaves can be
arranged on a circle so that (a) the leaf set of every subtree is
circularly consecutive and (b) around every branch vertex the legs
involved in each cap/cup conflict of the local star projection separate
as the star matrix demands.  Both kinds of constraint are rows of one
matrix over the leaf columns:

* bridge rows — the 0/1 leaf partition induced by each edge of the
  suppressed tree (degree-two vertices smoothed away);
* star rows — for each branch vertex ``v``, the rows of the projected
  star's matrix, except those whose interval strictly contains the level
  range of the path from ``v`` toward the root, which are enforced
  further up and would otherwise overconstrain columns ``v`` no longer
  separates.

Blocks are emitted children before parents (non-increasing depth in the
suppressed tree), the whole matrix is star-closed into staircase form,
and a single PC-tree sweep — seeded with the shape of the suppressed
tree itself — decides feasibility.  A feasible sweep's witness order is
turned into a rotation system and re-verified against the full
characterization before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ambmatrix import ONE, STAR, ZERO, AmbMatrix, solve, star_close
from .characterize import check_isotopy_class
from .errors import Infeasible, NotATree, PreconditionViolated
from .graphs import (
    CombEmbedding,
    LabeledGraph,
    RotationSystem,
    VertexId,
    canonical_rotation,
    is_unit_normalized,
    subdivide_to_unit,
)
from .pctree import PCTree, from_shape
from .stars import SubdividedStar, cap_cup_edge_sets, interval_set, leg_profiles

__all__ = [
    "TreeInstance",
    "TreeVerdict",
    "VertexInterval",
    "assemble_tree_matrix",
    "bridge_matrix",
    "build_instance",
    "core_pc_tree",
    "decide_tree",
    "star_projection",
    "tree_leaves",
]


# ---------------------------------------------------------------------------
# instance skeleton


@dataclass(frozen=True)
class VertexInterval:
    """Closed level range ``[lo, hi]``; star intervals strictly around it
    are enforced at an ancestor instead of at this vertex."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def strictly_inside(self, s: int, b: int) -> bool:
        """Whether the open interval ``(s, b)`` strictly contains this range."""
        return s < self.lo and self.hi < b


@dataclass(frozen=True)
class TreeInstance:
    """A unit-level tree with its suppressed core precomputed.

    The *core* is the tree on the root, the branch vertices (degree at
    least three) and the leaves, with every maximal run of degree-two
    vertices smoothed into a single core edge.  Core edges are oriented
    away from the root and remember the original vertex path they
    replaced.
    """

    graph: LabeledGraph
    root: VertexId
    leaves: tuple[VertexId, ...]
    branch_order: tuple[VertexId, ...]  # children before parents; root last
    core_edges: tuple[tuple[VertexId, VertexId], ...]
    core_paths: tuple[tuple[VertexId, ...], ...]  # per core edge, parent..child
    core_children: dict[VertexId, tuple[VertexId, ...]]

    def parent_path(self, v: VertexId) -> tuple[VertexId, ...]:
        """Original vertices from ``v`` up to its core parent, ``v`` first."""
        for (p, c), path in zip(self.core_edges, self.core_paths):
            if c == v:
                return tuple(reversed(path))
        raise KeyError(v)

    def interval_of(self, v: VertexId) -> VertexInterval:
        """Level range guarding which star rows are kept at ``v``."""
        gamma = self.graph.gamma
        if v == self.root:
            levels = [gamma[u] for u in self.graph.vertices]
        else:
            levels = [gamma[u] for u in self.parent_path(v)]
        return VertexInterval(min(levels), max(levels))


def tree_leaves(g: LabeledGraph) -> tuple[VertexId, ...]:
    """Degree-one vertices in vertex order; the matrix columns."""
    return tuple(v for v in g.vertices if g.degree(v) == 1)


def build_instance(g: LabeledGraph) -> TreeInstance:
    """Root the tree at its first branch vertex and smooth degree-two runs.

    Requires a unit-normalized tree with at least one vertex of degree
    three or more (paths never need the matrix machinery).
    """
    if not g.is_tree():
        raise NotATree(
            f"expected a tree, got {len(g.vertices)} vertices / {len(g.edges)} edges"
        )
    if not is_unit_normalized(g):
        raise PreconditionViolated("instance must have unit-normalized levels")
    root = next((v for v in g.vertices if g.degree(v) >= 3), None)
    if root is None:
        raise PreconditionViolated("tree has no branch vertex; decide it directly")

    core_edges: list[tuple[VertexId, VertexId]] = []
    core_paths: list[tuple[VertexId, ...]] = []
    core_children: dict[VertexId, tuple[VertexId, ...]] = {}
    depth: dict[VertexId, int] = {root: 0}
    frontier = [root]
    while frontier:
        u = frontier.pop(0)
        children = []
        for d in g.darts_at(u):
            path = [u, g.dart_head(d)]
            while g.degree(path[-1]) == 2:
                a, b = g.neighbors(path[-1])
                path.append(b if a == path[-2] else a)
            w = path[-1]
            if w in depth:
                continue  # walked back toward the root
            depth[w] = depth[u] + 1
            core_edges.append((u, w))
            core_paths.append(tuple(path))
            children.append(w)
            if g.degree(w) >= 3:
                frontier.append(w)
        core_children[u] = tuple(children)

    pos = {v: i for i, v in enumerate(g.vertices)}
    branch = [v for v in g.vertices if g.degree(v) >= 3]
    branch.sort(key=lambda v: (-depth[v], pos[v]))
    return TreeInstance(
        graph=g,
        root=root,
        leaves=tree_leaves(g),
        branch_order=tuple(branch),
        core_edges=tuple(core_edges),
        core_paths=tuple(core_paths),
        core_children=core_children,
    )


# ---------------------------------------------------------------------------
# star projection


def star_projection(g: LabeledGraph, v: VertexId) -> SubdividedStar:
    """Collapse the tree onto ``v``: one leg per leaf, levels read along
    the unique ``v``-to-leaf path.

    Legs are listed in :func:`tree_leaves` order, so leg ``i`` of the
    star corresponds to matrix column ``i``.
    """
    parent: dict[VertexId, VertexId] = {v: v}
    order = [v]
    for u in order:
        for w in g.neighbors(u):
            if w not in parent:
                parent[w] = u
                order.append(w)
    legs = []
    for leaf in tree_leaves(g):
        path = [leaf]
        while path[-1] != v:
            path.append(parent[path[-1]])
        legs.append(tuple(g.gamma[u] for u in reversed(path)))
    return SubdividedStar(g.gamma[v], tuple(legs))


# ---------------------------------------------------------------------------
# matrix assembly


def _leaves_below(ti: TreeInstance) -> dict[VertexId, frozenset[VertexId]]:
    below: dict[VertexId, frozenset[VertexId]] = {}
    for v in ti.branch_order:  # children precede parents
        for w in ti.core_children.get(v, ()):
            if w not in below:  # w is a leaf of the core, hence of the tree
                below[w] = frozenset((w,))
        below[v] = frozenset().union(*(below[w] for w in ti.core_children[v]))
    return below


def bridge_matrix(g: LabeledGraph | TreeInstance) -> AmbMatrix:
    """One 0/1 row per core edge: the leaf partition the edge cuts.

    Ones mark the leaves on the far side from the root.  Edges of the
    original tree lying on the same smoothed run cut the same partition,
    so the core yields each distinct row exactly once.
    """
    ti = g if isinstance(g, TreeInstance) else build_instance(g)
    below = _leaves_below(ti)
    cols = ti.leaves
    rows = []
    for _, child in ti.core_edges:
        inside = below.get(child, frozenset((child,)))
        rows.append("".join(ONE if c in inside else ZERO for c in cols))
    return AmbMatrix(cols, rows)


def assemble_tree_matrix(ti: TreeInstance) -> AmbMatrix:
    """Stack bridge rows, then each branch vertex's surviving star rows,
    children before parents, and close the result into staircase form.

    A star row at ``v`` survives unless its interval ``(s, b)`` strictly
    contains ``v``'s guard range: such a conflict involves legs that run
    through ``v``'s parent path unchanged, and the ancestor's own star
    sees it with the correct (larger) leg sets.
    """
    cols = ti.leaves
    rows = list(bridge_matrix(ti).rows)
    for v in ti.branch_order:
        star = star_projection(ti.graph, v)
        profiles = leg_profiles(star)
        guard = ti.interval_of(v)
        for s, b in interval_set(star):
            if guard.strictly_inside(s, b):
                continue
            caps, cups = cap_cup_edge_sets(star, s, b, profiles)
            rows.append(
                "".join(
                    ZERO if i in caps else ONE if i in cups else STAR
                    for i in range(len(cols))
                )
            )
    return star_close(AmbMatrix(cols, rows))


def core_pc_tree(ti: TreeInstance) -> PCTree:
    """Seed PC-tree shaped like the suppressed core, every node free."""

    def shape(v: VertexId):
        children = ti.core_children.get(v, ())
        if not children:
            return v
        return ("P", [shape(w) for w in children])

    return from_shape(shape(ti.root))


# ---------------------------------------------------------------------------
# decision


@dataclass(frozen=True)
class TreeVerdict:
    """Outcome of :func:`decide_tree`.

    Feasible verdicts carry the unit-level refinement the certificate
    lives on, its rotation system, and the witness circular leaf order;
    infeasible ones carry the index of the first matrix row that emptied
    the family of leaf orders.
    """

    feasible: bool
    graph: LabeledGraph | None = None
    rotation: RotationSystem | None = None
    leaf_order: tuple | None = None
    failed_row: int | None = None

    def __post_init__(self) -> None:
        if self.feasible != (self.rotation is not None):
            raise ValueError("feasible verdicts carry a rotation; infeasible never do")
        if self.feasible != (self.failed_row is None):
            raise ValueError("failed_row appears exactly on infeasible verdicts")


def _rotation_from_leaf_order(
    g: LabeledGraph, order: tuple[VertexId, ...]
) -> RotationSystem:
    """Order each branch vertex's darts by where their subtree's leaves
    sit in the witness circle.

    Bridge rows force every subtree's leaves to occupy a circular arc,
    so each dart owns an arc and sorting by arc start recovers the
    cyclic order.  Degree-two-or-less vertices keep their stored order.
    """
    pos = {leaf: i for i, leaf in enumerate(order)}
    n = len(order)
    rot: dict[VertexId, tuple[int, ...]] = {}
    for v in g.vertices:
        darts = g.darts_at(v)
        if len(darts) < 3:
            rot[v] = darts
            continue
        keyed = []
        for d in darts:
            block = set()
            stack = [g.dart_head(d)]
            seen = {v, g.dart_head(d)}
            while stack:
                u = stack.pop()
                if g.degree(u) == 1:
                    block.add(pos[u])
                for w in g.neighbors(u):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            starts = [p for p in block if (p - 1) % n not in block]
            if len(starts) != 1:
                raise AssertionError(
                    f"witness order does not keep the subtree at dart {d} consecutive"
                )
            keyed.append((starts[0], d))
        rot[v] = tuple(d for _, d in sorted(keyed))
    return RotationSystem(g, rot)


def _certified(verdict: TreeVerdict, certify: bool) -> TreeVerdict:
    g, rot = verdict.graph, verdict.rotation
    if certify and g.edges:
        emb = CombEmbedding(g, rot, 0)
        report = check_isotopy_class(emb)
        assert report.admits, "extracted rotation failed re-verification"
    return verdict


def decide_tree(g: LabeledGraph, *, certify: bool = True) -> TreeVerdict:
    """Decide whether the tree admits an x-bounded embedding.

    Levels are unit-normalized automatically (the certificate then lives
    on the refined tree).  Paths are feasible outright: spacing the
    vertices at strictly increasing heights keeps every pair of edges in
    disjoint height ranges.  Otherwise one staircase matrix over the
    leaves is swept through a PC-tree seeded with the suppressed core;
    the witness order is lifted to a rotation system and, unless
    ``certify`` is switched off for timing runs, re-verified against the
    full characterization.
    """
    if not g.is_tree():
        raise NotATree(
            f"expected a tree, got {len(g.vertices)} vertices / {len(g.edges)} edges"
        )
    gu = g if is_unit_normalized(g) else subdivide_to_unit(g)[0]
    if all(gu.degree(v) <= 2 for v in gu.vertices):
        verdict = TreeVerdict(
            True, graph=gu, rotation=canonical_rotation(gu), leaf_order=tree_leaves(gu)
        )
        return _certified(verdict, certify)

    ti = build_instance(gu)
    full = assemble_tree_matrix(ti)
    first_with: dict[str, int] = {}
    kept: list[str] = []
    origin: list[int] = []
    for i, row in enumerate(full.rows):
        if row not in first_with:
            first_with[row] = i
            kept.append(row)
            origin.append(i)
    matrix = AmbMatrix(full.columns, kept)
    try:
        _, witness = solve(matrix, core_pc_tree(ti))
    except Infeasible as exc:
        return TreeVerdict(False, failed_row=origin[exc.row_id])
    rot = _rotation_from_leaf_order(gu, witness)
    verdict = TreeVerdict(True, graph=gu, rotation=rot, leaf_order=tuple(witness))
    return _certified(verdict, certify)
