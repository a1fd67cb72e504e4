"""Decision predicate on a fixed isotopy class.

A level-labeled plane graph admits a strip drawing within its isotopy class
exactly when two kinds of obstructions are absent:

* an *infeasible interleaving pair* — a cap (path whose two endpoints sit at
  its minimum level, interior strictly above) and a cup (mirror image) whose
  level spans interleave, whose intersection is a single subpath, and whose
  algebraic intersection number in the embedding is nonzero;
* a *trapped vertex* — a vertex strictly inside a cycle whose levels it does
  not share (strictly below the cycle's minimum or above its maximum).

This module enumerates caps/cups and simple cycles (exhaustively on trees,
budgeted elsewhere), tests pairs, detects trapped vertices, and combines
everything into a verdict with an explicit completeness flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BudgetExceeded, PreconditionViolated
from .graphs import (
    CombEmbedding,
    LabeledGraph,
    RotationSystem,
    Walk,
    algebraic_intersection,
    check_walk,
    edge_of,
    is_unit_normalized,
)

CAP, CUP = "cap", "cup"


@dataclass(frozen=True)
class CapCup:
    """A path whose endpoints share the extreme level of the path."""

    path: Walk
    kind: str  # CAP | CUP
    level: int
    span: tuple[int, int]


@dataclass(frozen=True)
class InterleavingPair:
    """A cap and a cup with interleaved spans meeting in one subpath."""

    cap: CapCup
    cup: CapCup
    intersection: Walk


@dataclass(frozen=True)
class TrappedWitness:
    """A vertex strictly inside a cycle whose level range excludes it."""

    vertex: object
    cycle: Walk


@dataclass(frozen=True)
class ClassVerdict:
    """Outcome of checking one isotopy class.

    ``admits`` is true exactly when ``violation`` is absent.  ``complete``
    is false when a search budget ran out before the checks were exhaustive,
    in which case ``admits=True`` only means "no violation found in budget".
    """

    admits: bool
    violation: InterleavingPair | TrappedWitness | None = None
    complete: bool = True

    def __post_init__(self) -> None:
        if self.admits != (self.violation is None):
            raise ValueError("admits must mean exactly: no violation recorded")


# ---------------------------------------------------------------------------
# cap / cup classification and enumeration


def classify_path(g: LabeledGraph, w: Walk) -> list[CapCup]:
    """The cap/cup readings of a path (a level edge is both; most are neither)."""
    levels = [g.gamma[v] for v in w.vertices]
    lo, hi = min(levels), max(levels)
    end_a, end_b = levels[0], levels[-1]
    interior = levels[1:-1]
    out = []
    if end_a == end_b == lo and all(x > lo for x in interior):
        out.append(CapCup(w, CAP, lo, (lo, hi)))
    if end_a == end_b == hi and all(x < hi for x in interior):
        out.append(CapCup(w, CUP, hi, (lo, hi)))
    return out


class _Budget:
    __slots__ = ("left",)

    def __init__(self, bound: int | None) -> None:
        self.left = bound

    def spend(self) -> None:
        if self.left is not None:
            self.left -= 1
            if self.left < 0:
                raise BudgetExceeded("path search budget exhausted")


def _tree_paths(g: LabeledGraph) -> Iterator[Walk]:
    """The unique path for every unordered pair of same-level vertices."""
    from collections import deque

    order = {v: i for i, v in enumerate(g.vertices)}
    for u in g.vertices:
        # BFS tree rooted at u, remembering the arriving dart
        parent_dart: dict[object, int] = {u: -1}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for d in g.darts_at(x):
                y = g.dart_head(d)
                if y not in parent_dart:
                    parent_dart[y] = d
                    queue.append(y)
        for v in g.vertices:
            if order[v] <= order[u] or g.gamma[v] != g.gamma[u]:
                continue
            hops_v = []
            x = v
            while x != u:
                d = parent_dart[x]
                hops_v.append((g.dart_tail(d), edge_of(d)))
                x = g.dart_tail(d)
            vertices = [v]
            edges = []
            for tail, k in hops_v:
                vertices.append(tail)
                edges.append(k)
            yield Walk(tuple(reversed(vertices)), tuple(reversed(edges)))


def _level_paths(g: LabeledGraph, u, v, mode: str, budget: _Budget) -> Iterator[Walk]:
    """Simple u-v paths whose interior stays strictly above (cap) or below
    (cup) the endpoints' common level."""
    level = g.gamma[u]
    path_v = [u]
    path_e: list[int] = []
    on_path = {u}

    def dfs(cur) -> Iterator[Walk]:
        budget.spend()
        for d in g.darts_at(cur):
            w = g.dart_head(d)
            k = edge_of(d)
            if w == v:
                yield Walk(tuple(path_v) + (v,), tuple(path_e) + (k,))
            elif w not in on_path:
                lw = g.gamma[w]
                if (mode == CAP and lw > level) or (mode == CUP and lw < level):
                    path_v.append(w)
                    path_e.append(k)
                    on_path.add(w)
                    yield from dfs(w)
                    on_path.discard(w)
                    path_e.pop()
                    path_v.pop()

    yield from dfs(u)


def enumerate_caps_cups(g: LabeledGraph, bound: int | None = None) -> Iterator[CapCup]:
    """All caps and cups of the instance, endpoint pairs in vertex order.

    On trees the enumeration is complete and quadratic.  Elsewhere it is an
    exhaustive pruned path search; ``bound`` caps the number of search steps
    and :class:`BudgetExceeded` makes the cutoff explicit.
    """
    if g.is_tree():
        for w in _tree_paths(g):
            yield from classify_path(g, w)
        return
    budget = _Budget(bound)
    order = {v: i for i, v in enumerate(g.vertices)}
    for u in g.vertices:
        for v in g.vertices:
            if order[v] <= order[u] or g.gamma[v] != g.gamma[u]:
                continue
            seen = set()
            for mode in (CAP, CUP):
                for w in _level_paths(g, u, v, mode, budget):
                    for cc in classify_path(g, w):
                        key = (cc.kind, w.vertices, w.edge_ids)
                        if key not in seen:
                            seen.add(key)
                            yield cc


# ---------------------------------------------------------------------------
# interleaving pairs


def _shared_subpath(p1: Walk, p2: Walk) -> Walk | None:
    """The intersection of two paths when it is a single subpath, else None."""
    sv = set(p1.vertices) & set(p2.vertices)
    se = set(p1.edge_ids) & set(p2.edge_ids)
    if not sv:
        return None
    if len(se) != len(sv) - 1:
        return None
    if not se:
        (x,) = sv
        return Walk((x,), ())
    # shared edges of a simple path are a subpath iff they are consecutive
    pos = [i for i, k in enumerate(p1.edge_ids) if k in se]
    if pos[-1] - pos[0] != len(pos) - 1:
        return None
    pos2 = [i for i, k in enumerate(p2.edge_ids) if k in se]
    if pos2[-1] - pos2[0] != len(pos2) - 1:
        return None
    seg = Walk(
        tuple(p1.vertices[pos[0] : pos[-1] + 2]),
        tuple(p1.edge_ids[pos[0] : pos[-1] + 1]),
    )
    if set(seg.vertices) != sv:
        return None
    return seg


def is_interleaving(p1: CapCup, p2: CapCup) -> InterleavingPair | None:
    """The pair when spans interleave and paths meet in one subpath."""
    if p1.kind != CAP or p2.kind != CUP:
        raise ValueError("arguments must be a cap and a cup, in that order")
    lo1, hi1 = p1.span
    lo2, hi2 = p2.span
    if not (lo1 < lo2 <= hi1 < hi2):
        return None
    seg = _shared_subpath(p1.path, p2.path)
    if seg is None:
        return None
    return InterleavingPair(p1, p2, seg)


def is_feasible(g: LabeledGraph, rot: RotationSystem, pair: InterleavingPair) -> bool:
    """True when the pair's paths do not essentially cross in the embedding."""
    return algebraic_intersection(g, rot, pair.cap.path, pair.cup.path) == 0


# ---------------------------------------------------------------------------
# simple cycles and trapped vertices


def simple_cycles(g: LabeledGraph, bound: int | None = None) -> list[Walk]:
    """Every simple cycle once, as a closed walk; parallel edges form bigons.

    Exhaustive backtracking intended for small instances; ``bound`` caps the
    number of search steps.
    """
    budget = _Budget(bound)
    order = {v: i for i, v in enumerate(g.vertices)}
    found: dict[frozenset, Walk] = {}
    for root in g.vertices:
        path_v = [root]
        path_e: list[int] = []
        on_path = {root}

        def dfs(cur) -> None:
            budget.spend()
            for d in g.darts_at(cur):
                w = g.dart_head(d)
                k = edge_of(d)
                if k in path_e:
                    continue
                if w == root:
                    if len(path_e) >= 1:
                        key = frozenset(path_e) | {k}
                        if key not in found:
                            found[key] = _canonical_cycle(
                                g, path_v + [root], path_e + [k]
                            )
                elif w not in on_path and order[w] > order[root]:
                    path_v.append(w)
                    path_e.append(k)
                    on_path.add(w)
                    dfs(w)
                    on_path.discard(w)
                    path_e.pop()
                    path_v.pop()

        dfs(root)
    out = list(found.values())
    out.sort(key=lambda c: (len(c.edge_ids), sorted(c.edge_ids)))
    return out


def _canonical_cycle(g: LabeledGraph, vertices: list, edges: list[int]) -> Walk:
    """Rotate/reflect a closed walk to start at its first-listed vertex and
    run toward the smaller edge id, so each cycle has one representation."""
    core_v = vertices[:-1]
    n = len(core_v)
    order = {v: i for i, v in enumerate(g.vertices)}
    s = min(range(n), key=lambda i: order[core_v[i]])
    fwd_v = core_v[s:] + core_v[:s]
    fwd_e = edges[s:] + edges[:s]
    # reversed traversal: same start, edges walked the other way around
    bwd_v = [fwd_v[0]] + list(reversed(fwd_v[1:]))
    bwd_e = list(reversed(fwd_e))
    if tuple(bwd_e) < tuple(fwd_e):
        fwd_v, fwd_e = bwd_v, bwd_e
    return Walk(tuple(fwd_v) + (fwd_v[0],), tuple(fwd_e))


def interior_faces(emb: CombEmbedding, cycle: Walk) -> frozenset[int]:
    """Face ids strictly enclosed by the cycle (the side without the outer face)."""
    barrier = set(cycle.edge_ids)
    adjacency: dict[int, set[int]] = {i: set() for i in range(len(emb.faces))}
    for k in range(len(emb.graph.edges)):
        if k in barrier:
            continue
        a = emb.face_of_dart(2 * k)
        b = emb.face_of_dart(2 * k + 1)
        adjacency[a].add(b)
        adjacency[b].add(a)
    reached = {emb.outer_face}
    stack = [emb.outer_face]
    while stack:
        f = stack.pop()
        for nf in adjacency[f]:
            if nf not in reached:
                reached.add(nf)
                stack.append(nf)
    return frozenset(set(range(len(emb.faces))) - reached)


def trapped_vertices(
    emb: CombEmbedding, cycles: Sequence[Walk] | None = None
) -> list[TrappedWitness]:
    """All vertices trapped inside some cycle, in deterministic order.

    ``cycles`` may supply the cycle set (e.g. when the caller knows a small
    complete family); by default every simple cycle is enumerated.
    """
    g = emb.graph
    if cycles is None:
        cycles = simple_cycles(g)
    out = []
    seen = set()
    for c in cycles:
        on_cycle = set(c.vertices)
        levels = [g.gamma[v] for v in c.vertices]
        lo, hi = min(levels), max(levels)
        inside = None
        for v in g.vertices:
            if v in on_cycle or lo <= g.gamma[v] <= hi:
                continue
            if inside is None:
                inside = interior_faces(emb, c)
            f = emb.face_of_dart(g.darts_at(v)[0])
            if f in inside and (v, c.edge_ids) not in seen:
                seen.add((v, c.edge_ids))
                out.append(TrappedWitness(v, c))
    return out


# ---------------------------------------------------------------------------
# the verdict


def check_isotopy_class(
    emb: CombEmbedding,
    budget: int | None = None,
    cycles: Sequence[Walk] | None = None,
) -> ClassVerdict:
    """Decide whether the isotopy class admits a strip drawing.

    The class admits one exactly when no interleaving cap/cup pair has a
    nonzero algebraic intersection number and no vertex is trapped.  When a
    budget cuts a search short the verdict carries ``complete=False``; any
    violation found is definitive regardless.
    """
    g = emb.graph
    if not is_unit_normalized(g):
        raise PreconditionViolated("instance must have unit-normalized levels")
    complete = True
    try:
        if cycles is None:
            cycles = simple_cycles(g, bound=budget)
        trapped = trapped_vertices(emb, cycles=cycles)
    except BudgetExceeded:
        trapped = []
        complete = False
    if trapped:
        return ClassVerdict(False, trapped[0], True)
    caps: list[CapCup] = []
    cups: list[CapCup] = []
    try:
        for cc in enumerate_caps_cups(g, bound=budget):
            (caps if cc.kind == CAP else cups).append(cc)
    except BudgetExceeded:
        complete = False
    for cap in caps:
        for cup in cups:
            pair = is_interleaving(cap, cup)
            if pair is None:
                continue
            if not is_feasible(g, emb.rotation, pair):
                return ClassVerdict(False, pair, True)
    return ClassVerdict(True, None, complete)


def sink_source_prefilter(emb: CombEmbedding) -> bool:
    """Quick necessary condition on rotations alone.

    Orient each non-level edge upward; at every vertex the strictly incoming
    and strictly outgoing darts must occupy two disjoint arcs of the
    rotation.  A failure here guarantees the full check rejects.
    """
    g = emb.graph
    for v in g.vertices:
        flags = []
        for d in emb.rotation.at(v):
            dv = g.gamma[g.dart_head(d)] - g.gamma[v]
            if dv != 0:
                flags.append(dv > 0)
        if len(set(flags)) == 2:
            boundaries = sum(
                1 for i in range(len(flags)) if flags[i] != flags[i - 1]
            )
            if boundaries > 2:
                return False
    return True


# ---------------------------------------------------------------------------
# reduction of generic crossing pairs to interleaving pairs


def _first_hit(levels: Sequence[int], start: int, target: int, step: int) -> int:
    i = start
    while 0 <= i < len(levels):
        if levels[i] == target:
            return i
        i += step
    raise PreconditionViolated(
        f"path never reaches level {target} from position {start}"
    )


def _truncate_at(g: LabeledGraph, w: Walk, w_pos: int, target: int) -> Walk:
    levels = [g.gamma[v] for v in w.vertices]
    i0 = _first_hit(levels, w_pos, target, -1)
    i1 = _first_hit(levels, w_pos, target, +1)
    return Walk(w.vertices[i0 : i1 + 1], w.edge_ids[i0:i1])


def _pathify(vertices: Sequence, edges: Sequence[int]) -> tuple[list, list[int]]:
    """Shortcut a walk to the simple path joining its endpoints."""
    out_v = [vertices[0]]
    out_e: list[int] = []
    index = {vertices[0]: 0}
    for t, k in enumerate(edges):
        nxt = vertices[t + 1]
        if nxt in index:
            q = index[nxt]
            for gone in out_v[q + 1 :]:
                del index[gone]
            out_v = out_v[: q + 1]
            out_e = out_e[:q]
        else:
            index[nxt] = len(out_v)
            out_v.append(nxt)
            out_e.append(k)
    return out_v, out_e


def _components(shared_v: set, shared_e: set[int], ref: Walk) -> dict:
    """Component id per shared vertex, components joined by shared edges of ref."""
    parent = {v: v for v in shared_v}

    def root(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, k in enumerate(ref.edge_ids):
        if k in shared_e:
            parent[root(ref.vertices[i])] = root(ref.vertices[i + 1])
    return {v: root(v) for v in shared_v}


def reduce_to_interleaving(
    emb: CombEmbedding, p1: Walk, p2: Walk
) -> tuple[Walk, Walk]:
    """Shrink two essentially-crossing paths to an interleaving pair.

    Requires: simple intersecting paths; no level of either path equals an
    endpoint level of the other; unit-normalized instance; and (for the
    crossing count to be preserved) no trapped vertices in the embedding.
    The first result is a subpath of ``p1``; the second is built from a
    subpath of ``p2`` rerouted along ``p1`` across every cycle of the union,
    then shortcut to a simple path.
    """
    g = emb.graph
    if not is_unit_normalized(g):
        raise PreconditionViolated("instance must have unit-normalized levels")
    for w in (p1, p2):
        check_walk(g, w)
        if not w.is_path() or w.closed or len(w) < 1:
            raise PreconditionViolated("arguments must be simple open paths")
    levels1 = {g.gamma[v] for v in p1.vertices}
    levels2 = {g.gamma[v] for v in p2.vertices}
    ends1 = {g.gamma[p1.vertices[0]], g.gamma[p1.vertices[-1]]}
    ends2 = {g.gamma[p2.vertices[0]], g.gamma[p2.vertices[-1]]}
    if levels1 & ends2 or levels2 & ends1:
        raise PreconditionViolated(
            "endpoint levels of each path must avoid all levels of the other"
        )
    if not set(p1.vertices) & set(p2.vertices):
        raise PreconditionViolated("paths must intersect")

    # already interleaving (either role assignment): nothing to do
    for a, b in ((p1, p2), (p2, p1)):
        for ca in classify_path(g, a):
            for cb in classify_path(g, b):
                if ca.kind == CAP and cb.kind == CUP and is_interleaving(ca, cb):
                    return p1, p2

    before = algebraic_intersection(g, emb.rotation, p1, p2)

    lo1, hi1 = p1.span(g)
    lo2, hi2 = p2.span(g)
    if lo1 < lo2:
        target1 = lo2 - 1  # p1 becomes a cap just below p2's range
        target2 = hi1 + 1  # p2 becomes a cup just above p1's range
    else:
        target1 = hi2 + 1
        target2 = lo1 - 1

    w_shared = next(v for v in p1.vertices if v in set(p2.vertices))
    q1 = _truncate_at(g, p1, p1.vertices.index(w_shared), target1)
    q2 = _truncate_at(g, p2, p2.vertices.index(w_shared), target2)

    # reroute q2 along q1 across each cycle of the union until the
    # intersection is a single subpath
    cur_v = list(q2.vertices)
    cur_e = list(q2.edge_ids)
    q1_pos = {v: i for i, v in enumerate(q1.vertices)}
    for _ in range((len(p1) + len(p2) + 2) ** 2):
        shared_v = set(q1.vertices) & set(cur_v)
        if not shared_v:
            break
        shared_e = set(q1.edge_ids) & set(cur_e)
        comp = _components(shared_v, shared_e, q1)
        if len(set(comp.values())) <= 1 and len(shared_e) == len(shared_v) - 1:
            break
        # two shared vertices consecutive along cur but in different components
        marks = [(i, v) for i, v in enumerate(cur_v) if v in shared_v]
        swap = None
        for (i, x), (j, y) in zip(marks, marks[1:]):
            if comp[x] != comp[y]:
                swap = (i, x, j, y)
                break
        assert swap is not None, "multiple components must differ somewhere"
        i, x, j, y = swap
        a, b = q1_pos[x], q1_pos[y]
        if a <= b:
            mid_v = list(q1.vertices[a : b + 1])
            mid_e = list(q1.edge_ids[a:b])
        else:
            mid_v = list(reversed(q1.vertices[b : a + 1]))
            mid_e = list(reversed(q1.edge_ids[b:a]))
        cur_v = cur_v[:i] + mid_v + cur_v[j + 1 :]
        cur_e = cur_e[:i] + mid_e + cur_e[j:]
        cur_v, cur_e = _pathify(cur_v, cur_e)
    q2 = Walk(tuple(cur_v), tuple(cur_e))

    after = algebraic_intersection(g, emb.rotation, q1, q2)
    if after != before:
        raise PreconditionViolated(
            "crossing count changed during rerouting; "
            "the embedding likely contains a trapped vertex"
        )
    kinds1 = {c.kind: c for c in classify_path(g, q1)}
    kinds2 = {c.kind: c for c in classify_path(g, q2)}
    pair = None
    if CAP in kinds1 and CUP in kinds2:
        pair = is_interleaving(kinds1[CAP], kinds2[CUP])
    if pair is None and CUP in kinds1 and CAP in kinds2:
        pair = is_interleaving(kinds2[CAP], kinds1[CUP])
    if pair is None:
        raise PreconditionViolated("reduction did not produce an interleaving pair")
    return q1, q2


# ---------------------------------------------------------------------------
# serialization


def verdict_to_dict(verdict: ClassVerdict) -> dict:
    """JSON-ready form: answer plus an optional violation record."""
    out: dict = {"answer": "yes" if verdict.admits else "no"}
    if not verdict.complete:
        out["complete"] = False
    v = verdict.violation
    if isinstance(v, TrappedWitness):
        out["violation"] = {
            "type": "trapped",
            "vertex": v.vertex,
            "cycle": list(v.cycle.vertices),
        }
    elif isinstance(v, InterleavingPair):
        out["violation"] = {
            "type": "pair",
            "cap": {
                "vertices": list(v.cap.path.vertices),
                "level": v.cap.level,
            },
            "cup": {
                "vertices": list(v.cup.path.vertices),
                "level": v.cup.level,
            },
            "intersection": list(v.intersection.vertices),
        }
    return out
