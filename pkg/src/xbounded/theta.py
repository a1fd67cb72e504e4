"""Decide strip embeddability for theta graphs: two poles, many paths.

A theta instance consists of two *poles* joined by ``n >= 3`` internally
disjoint level-labeled paths whose interior vertices all have degree two.
The tree machinery alone cannot decide it — the paths close cycles — but
splitting the graph open along one well-chosen path reduces the question
to a staircase system over a tree plus one extra filter:

* pick a path whose level span is inclusion-minimal (``select_alpha``);
* delete one pole together with the chosen path's edges: what remains of
  each other path is a leg hanging off the surviving pole.  Doing this
  from both sides and re-joining the two spiders along the chosen path
  yields the *double spider*, a tree with ``2n - 2`` leaves whose interior
  is the chosen path (``build_theta_instance``);
* constrain the circular order of those leaves plus a dummy column that
  marks where the unbounded face touches the first pole: bridge rows and
  the two pole star blocks come from the tree solver, and extra 0/1 rows
  (``trapped_matrix``) forbid a whole path from being walled in by two
  paths it dips below or rises above;
* sweep the system (``solve_consistent``) and keep the first witness
  order whose two pole rotations are mirror images of each other under
  the path correspondence — for a theta graph that mirror condition is
  exactly planarity of the rotation system, and the certified embedding
  is rebuilt from it.

Yes-verdicts carry a rotation system and outer face that pass the full
characterization checker; no-verdicts name the first unsatisfiable row or
report that every represented order failed the mirror condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .ambmatrix import (
    ONE,
    STAR,
    ZERO,
    AmbMatrix,
    satisfying_orders,
    solve,
    star_close,
)
from .characterize import check_isotopy_class
from .errors import Infeasible, MissingLabel, NotATheta, PreconditionViolated
from .graphs import (
    CombEmbedding,
    LabeledGraph,
    RotationSystem,
    VertexId,
    trace_faces,
    twin,
)
from .pctree import PCTree, from_shape
from .stars import cap_cup_edge_sets, interval_set, leg_profiles
from .trees import TreeInstance, bridge_matrix, build_instance, star_projection

#: Reserved matrix column marking where the outer face touches pole ``u``.
OUTER_COLUMN = "outer"


@dataclass(frozen=True)
class ThetaGraph:
    """Two poles joined by ``n >= 3`` internally disjoint labeled paths.

    ``paths[i]`` lists the levels along path ``i`` from pole ``u`` to pole
    ``v``, both pole levels included; consecutive levels differ by at most
    one.  Interior vertices are anonymous — the level sequences carry all
    the information the decision needs — and materialize on demand via
    :func:`theta_to_graph`.
    """

    paths: tuple[tuple[int, ...], ...]
    u: VertexId = "u"
    v: VertexId = "v"

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))
        if self.u == self.v:
            raise NotATheta("the two poles must be distinct vertices")
        if len(self.paths) < 3:
            raise NotATheta("a theta graph needs at least three pole-to-pole paths")
        for p in self.paths:
            if len(p) < 2:
                raise NotATheta("every path must include both pole levels")
            for lvl in p:
                if isinstance(lvl, bool) or not isinstance(lvl, int) or lvl < 0:
                    raise MissingLabel(f"path level {lvl!r} is not a nonnegative integer")
        first = self.paths[0]
        for p in self.paths:
            if p[0] != first[0] or p[-1] != first[-1]:
                raise NotATheta("all paths must start and end at the two pole levels")
            for a, b in zip(p, p[1:]):
                if abs(a - b) > 1:
                    raise PreconditionViolated(
                        "path levels must change by at most one per edge"
                    )

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    @property
    def u_level(self) -> int:
        return self.paths[0][0]

    @property
    def v_level(self) -> int:
        return self.paths[0][-1]

    def span(self, i: int) -> tuple[int, int]:
        """Lowest and highest level visited by path ``i``, poles included."""
        p = self.paths[i]
        return (min(p), max(p))


def select_alpha(theta: ThetaGraph) -> int:
    """Index of a path whose level span is inclusion-minimal (ties: lowest).

    Splitting along a span-minimal path loses no conflicts: any cap/cup
    interval that strictly contains the chosen span still has both of its
    defining extremes on legs that survive intact at one of the poles.
    """
    spans = [theta.span(i) for i in range(theta.n_paths)]

    def strictly_inside(a: tuple[int, int], b: tuple[int, int]) -> bool:
        return b[0] <= a[0] and a[1] <= b[1] and a != b

    for j, sj in enumerate(spans):
        if not any(strictly_inside(si, sj) for si in spans):
            return j
    raise AssertionError("span containment admits no minimal element")


def _with_interiors(theta: ThetaGraph) -> ThetaGraph:
    """Give every path an interior vertex (inserted at the first pole's level).

    A pole-to-pole edge can always be subdivided at a point inside the
    first pole's strip, so the answer is unchanged, and every path then
    contributes a nonempty leg to each side of the split.
    """
    if all(len(p) > 2 for p in theta.paths):
        return theta
    paths = tuple(p if len(p) > 2 else (p[0], p[0], p[1]) for p in theta.paths)
    return ThetaGraph(paths, theta.u, theta.v)


def _materialize(theta: ThetaGraph) -> tuple[LabeledGraph, dict[int, int], dict[int, int]]:
    """Labeled graph for ``theta`` plus each pole's dart on every path."""
    verts: list[tuple[VertexId, int]] = [(theta.u, theta.u_level)]
    for i, p in enumerate(theta.paths):
        for j in range(1, len(p) - 1):
            verts.append((("p", i, j), p[j]))
    verts.append((theta.v, theta.v_level))
    edges: list[tuple[VertexId, VertexId]] = []
    u_dart: dict[int, int] = {}
    v_dart: dict[int, int] = {}
    for i, p in enumerate(theta.paths):
        names = [theta.u] + [("p", i, j) for j in range(1, len(p) - 1)] + [theta.v]
        for a, b in zip(names, names[1:]):
            if a == theta.u:
                u_dart[i] = 2 * len(edges)
            if b == theta.v:
                v_dart[i] = 2 * len(edges) + 1
            edges.append((a, b))
    g = LabeledGraph([w for w, _ in verts], edges, dict(verts))
    return g, u_dart, v_dart


def theta_to_graph(theta: ThetaGraph) -> LabeledGraph:
    """Materialize the instance with anonymous interior vertex names."""
    return _materialize(theta)[0]


def theta_from_graph(g: LabeledGraph) -> ThetaGraph:
    """Recognize a theta graph and read off its path level sequences.

    The poles are the two vertices of degree three or more (the first in
    vertex order becomes ``u``); paths are listed in the order their first
    darts appear at ``u``.  Raises :class:`NotATheta` when the shape is
    wrong; level jumps surface from the :class:`ThetaGraph` constructor.
    """
    poles = [w for w in g.vertices if g.degree(w) >= 3]
    if len(poles) != 2:
        raise NotATheta("expected exactly two vertices of degree three or more")
    u, v = poles
    for w in g.vertices:
        if w not in (u, v) and g.degree(w) != 2:
            raise NotATheta(f"interior vertex {w!r} must have degree two")
    paths: list[tuple[int, ...]] = []
    walked = 0
    bound = len(g.edges) + 1
    for d in g.darts_at(u):
        seq = [g.gamma[u]]
        steps = 0
        cur = d
        while True:
            steps += 1
            if steps > bound:
                raise NotATheta("a walk from the first pole never reaches the second")
            h = g.dart_head(cur)
            if h == v:
                seq.append(g.gamma[v])
                break
            if h == u:
                raise NotATheta("a path returns to its starting pole")
            seq.append(g.gamma[h])
            a, b = g.darts_at(h)
            cur = b if a == twin(cur) else a
        walked += steps
        paths.append(tuple(seq))
    if walked != len(g.edges):
        raise NotATheta("some edges lie outside the pole-to-pole paths")
    return ThetaGraph(tuple(paths), u=u, v=v)


@dataclass(frozen=True)
class ThetaInstance:
    """The derived double spider and its constraint-column layout.

    ``gprime`` is the tree obtained by splitting the instance along path
    ``alpha``: every other path contributes one leg at each pole and the
    alpha path joins the two pole stars.  Matrix columns are the dummy
    outer column followed by ``gprime``'s leaves; ``u_leaf`` and ``v_leaf``
    map each non-alpha path index to its leg's leaf at that pole.
    """

    theta: ThetaGraph
    alpha: int
    gprime: LabeledGraph
    core: TreeInstance
    columns: tuple
    u_leaf: Mapping[int, VertexId]
    v_leaf: Mapping[int, VertexId]


def build_theta_instance(theta: ThetaGraph) -> ThetaInstance:
    """Split along the selected path and set up the constraint columns.

    The double spider is rooted (by construction order) at pole ``v``, so
    the tree solver's child-before-parent discipline emits ``u``'s star
    block first and the dummy outer column rides on ``u``'s side of the
    unique pole-to-pole bridge row.  Every path is first given an interior
    vertex so that both of its half-legs are nonempty.
    """
    theta = _with_interiors(theta)
    if OUTER_COLUMN in (theta.u, theta.v):
        raise NotATheta(f"pole ids may not equal the reserved column id {OUTER_COLUMN!r}")
    alpha = select_alpha(theta)
    n = theta.n_paths
    verts: list[tuple[VertexId, int]] = [(theta.v, theta.v_level)]
    edges: list[tuple[VertexId, VertexId]] = []
    u_leaf: dict[int, VertexId] = {}
    v_leaf: dict[int, VertexId] = {}
    for i, p in enumerate(theta.paths):
        if i == alpha:
            continue
        prev: VertexId = theta.v
        for j in range(len(p) - 2, 0, -1):
            node = ("v", i, j)
            verts.append((node, p[j]))
            edges.append((prev, node))
            prev = node
        v_leaf[i] = prev
    pa = theta.paths[alpha]
    prev = theta.v
    for j in range(len(pa) - 2, 0, -1):
        node = ("a", j)
        verts.append((node, pa[j]))
        edges.append((prev, node))
        prev = node
    verts.append((theta.u, theta.u_level))
    edges.append((prev, theta.u))
    for i, p in enumerate(theta.paths):
        if i == alpha:
            continue
        prev = theta.u
        for j in range(1, len(p) - 1):
            node = ("u", i, j)
            verts.append((node, p[j]))
            edges.append((prev, node))
            prev = node
        u_leaf[i] = prev
    gprime = LabeledGraph([w for w, _ in verts], edges, dict(verts))
    core = build_instance(gprime)
    assert core.root == theta.v
    assert core.branch_order == (theta.u, theta.v)
    assert len(core.leaves) == 2 * n - 2
    columns = (OUTER_COLUMN,) + core.leaves
    return ThetaInstance(theta, alpha, gprime, core, columns, u_leaf, v_leaf)


def trapped_matrix(theta: ThetaGraph, inst: ThetaInstance) -> tuple[str, ...]:
    """Rows forbidding whole-path trapping, over ``inst.columns``.

    A path whose levels stay strictly inside the span of two other paths'
    common cycle can never leave it, so a path dipping below (or rising
    above) both of them must not be walled in: for every threshold, the
    paths whose minimum stays above it must form one contiguous arc that
    excludes the dummy outer column and every low path, and dually for
    maxima.  The selected path has no column of its own; its symbol paints
    all far-pole leaves, the contiguous block that stands in for it.  Rows
    with an empty one-set say nothing and are dropped.
    """
    if len(theta.paths) != len(inst.theta.paths):
        raise ValueError("instance was built from a different theta graph")
    theta = inst.theta
    spans = [theta.span(i) for i in range(theta.n_paths)]
    rows: list[str] = []

    def emit(low: set[int]) -> None:
        if len(low) == theta.n_paths:
            return
        sym = {i: (ZERO if i in low else ONE) for i in range(theta.n_paths)}
        cell = {OUTER_COLUMN: ZERO}
        for i, col in inst.u_leaf.items():
            cell[col] = sym[i]
        for col in inst.v_leaf.values():
            cell[col] = sym[inst.alpha]
        rows.append("".join(cell[c] for c in inst.columns))

    for d in sorted({lo for lo, _ in spans}):
        emit({i for i in range(theta.n_paths) if spans[i][0] <= d})
    for top in sorted({hi for _, hi in spans}, reverse=True):
        emit({i for i in range(theta.n_paths) if spans[i][1] >= top})
    return tuple(rows)


def _assembled(inst: ThetaInstance) -> tuple[AmbMatrix, tuple[str, ...]]:
    cols = inst.columns
    width = len(inst.core.leaves)
    rows: list[str] = []
    blocks: list[str] = []
    for (_, child), row in zip(inst.core.core_edges, bridge_matrix(inst.core).rows):
        dummy = ONE if child == inst.theta.u else ZERO
        rows.append(dummy + row)
        blocks.append("bridge")
    for row in trapped_matrix(inst.theta, inst):
        rows.append(row)
        blocks.append("trapped")
    for w in inst.core.branch_order:
        star = star_projection(inst.gprime, w)
        profiles = leg_profiles(star)
        guard = inst.core.interval_of(w)
        for s, b in interval_set(star):
            if guard.strictly_inside(s, b):
                continue
            caps, cups = cap_cup_edge_sets(star, s, b, profiles)
            rows.append(
                STAR
                + "".join(
                    ZERO if i in caps else ONE if i in cups else STAR
                    for i in range(width)
                )
            )
            blocks.append(f"star:{w}")
    return star_close(AmbMatrix(cols, rows)), tuple(blocks)


def assemble_theta_matrix(inst: ThetaInstance) -> AmbMatrix:
    """Bridge rows, then trapping rows, then the two pole star blocks.

    Same staircase discipline as the tree solver.  The dummy outer column
    is concrete through the bridge and trapping rows and unconstrained in
    every star row, so it retires when the star blocks begin.
    """
    return _assembled(inst)[0]


def theta_row_blocks(inst: ThetaInstance) -> tuple[str, ...]:
    """Provenance label per assembled row: ``bridge``, ``trapped``, or
    ``star:<pole>``; aligned with :func:`assemble_theta_matrix` rows."""
    return _assembled(inst)[1]


def theta_pc_tree(inst: ThetaInstance) -> PCTree:
    """Seed tree: one free node per pole, far block nested, dummy at ``u``.

    Mirrors the double spider's shape, with the dummy outer column added
    as an extra child of ``u``'s node, so pole ``u`` carries ``n`` leaves
    and pole ``v`` carries ``n - 1``.
    """
    ukids: list = [inst.u_leaf[i] for i in sorted(inst.u_leaf)] + [OUTER_COLUMN]
    vkids: list = [inst.v_leaf[i] for i in sorted(inst.v_leaf)]
    return from_shape(("P", vkids + [("P", ukids)]))


def _pole_sequences(inst: ThetaInstance, order: Sequence) -> tuple[list[int], list[int]]:
    """Path-index rotations at the two poles read off a witness order.

    Scanning the circle from the dummy column, every far-pole leaf run is
    required to be contiguous (the bridge row guarantees it); the selected
    path occupies that block's slot at ``u`` and leads the sequence at
    ``v``, whose block sits at the scan seam.
    """
    u_of = {col: i for i, col in inst.u_leaf.items()}
    v_of = {col: i for i, col in inst.v_leaf.items()}
    k = list(order).index(OUTER_COLUMN)
    ring = tuple(order[k:]) + tuple(order[:k])
    seq_u: list[int] = []
    seq_v: list[int] = []
    runs = 0
    in_run = False
    for col in ring[1:]:
        if col in u_of:
            seq_u.append(u_of[col])
            in_run = False
        else:
            if not in_run:
                runs += 1
                seq_u.append(inst.alpha)
                in_run = True
            seq_v.append(v_of[col])
    if runs != 1:
        raise AssertionError("far-pole leaves are not contiguous in the witness")
    seq_v.insert(0, inst.alpha)
    return seq_u, seq_v


def _cyclic_equal(a: Sequence, b: Sequence) -> bool:
    if len(a) != len(b):
        return False
    if not len(a):
        return True
    doubled = tuple(b) + tuple(b)
    target = tuple(a)
    return any(doubled[i : i + len(a)] == target for i in range(len(b)))


@dataclass(frozen=True)
class ThetaVerdict:
    """Outcome of the theta decision, with a checkable certificate on yes.

    On yes: ``graph`` is the materialized (interior-normalized) instance,
    ``rotation`` and ``outer_face`` the certified embedding, ``column_order``
    the witnessing circular column order anchored at the dummy, and
    ``pole_orders`` the two pole rotations as path-index sequences.  On no:
    either ``failed_row`` and ``failed_block`` name the first unsatisfiable
    matrix row, or ``exhausted`` reports that every represented order
    failed the mirror condition between the poles.
    """

    feasible: bool
    graph: LabeledGraph | None = None
    rotation: RotationSystem | None = None
    outer_face: int | None = None
    column_order: tuple | None = None
    pole_orders: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    failed_row: int | None = None
    failed_block: str | None = None
    exhausted: bool = False

    def __post_init__(self) -> None:
        witness = (
            self.graph,
            self.rotation,
            self.outer_face,
            self.column_order,
            self.pole_orders,
        )
        if self.feasible:
            ok = (
                all(part is not None for part in witness)
                and self.failed_row is None
                and self.failed_block is None
                and not self.exhausted
            )
        else:
            ok = (
                all(part is None for part in witness)
                and (self.failed_row is None) == self.exhausted
                and (self.failed_block is None) == (self.failed_row is None)
            )
        if not ok:
            raise ValueError("verdict fields are inconsistent with the answer")


def solve_consistent(
    inst: ThetaInstance, m: AmbMatrix, *, certify: bool = True
) -> ThetaVerdict:
    """Sweep the rows, then keep the first witness whose poles mirror.

    Duplicate rows collapse before solving (``failed_row`` still refers to
    ``m``), and witness orders stream lazily — survivor realizations of the
    final tree crossed with the valid re-insertions of retired columns —
    so a feasible instance stops at its first mirror-consistent order and
    an infeasible one exhausts the family.  ``certify`` re-checks the
    embedding against the full characterization before returning it.
    """
    blocks = theta_row_blocks(inst)
    if len(blocks) != len(m.rows):
        blocks = ("row",) * len(m.rows)
    first: dict[str, int] = {}
    keep: list[int] = []
    for r, row in enumerate(m.rows):
        if row not in first:
            first[row] = r
            keep.append(r)
    matrix = AmbMatrix(m.columns, [m.rows[r] for r in keep])
    try:
        tree, _ = solve(matrix, theta_pc_tree(inst))
    except Infeasible as exc:
        r = keep[exc.row_id]
        return ThetaVerdict(False, failed_row=r, failed_block=blocks[r])
    gt, u_dart, v_dart = _materialize(inst.theta)
    for order in satisfying_orders(matrix, tree):
        seq_u, seq_v = _pole_sequences(inst, order)
        if not _cyclic_equal(seq_u, tuple(reversed(seq_v))):
            continue
        mapping = {w: tuple(gt.darts_at(w)) for w in gt.vertices}
        mapping[inst.theta.u] = tuple(u_dart[i] for i in seq_u)
        mapping[inst.theta.v] = tuple(v_dart[i] for i in seq_v)
        rot = RotationSystem(gt, mapping)
        before_dummy = u_dart[seq_u[-1]]
        faces = trace_faces(gt, rot)
        outer = next(k for k, f in enumerate(faces) if before_dummy in f)
        emb = CombEmbedding(gt, rot, outer)
        if certify:
            report = check_isotopy_class(emb)
            assert report.admits and report.complete, "certificate failed its check"
        k = order.index(OUTER_COLUMN)
        return ThetaVerdict(
            True,
            graph=gt,
            rotation=rot,
            outer_face=outer,
            column_order=order[k:] + order[:k],
            pole_orders=(tuple(seq_u), tuple(seq_v)),
        )
    return ThetaVerdict(False, exhausted=True)


def decide_theta(theta: ThetaGraph, *, certify: bool = True) -> ThetaVerdict:
    """Decide strip embeddability of a theta instance.

    Pipeline: give every path an interior vertex, split along a
    span-minimal path, solve the staircase system over the double spider's
    leaves plus the dummy outer column, and filter witness orders by the
    pole mirror condition.  With ``certify`` (the default) the returned
    embedding is re-checked against the full characterization.
    """
    inst = build_theta_instance(theta)
    return solve_consistent(inst, assemble_theta_matrix(inst), certify=certify)
