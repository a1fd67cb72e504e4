"""Unrooted PC-trees: compact families of circular orders of a leaf set.

A PC-tree is an unrooted tree whose internal nodes are either P-nodes
(neighbors may be arranged in any cyclic order) or C-nodes (the cyclic order
of neighbors is fixed up to reflection, independently per node).  Reading the
leaves around a planar embedding of the tree yields a circular order; the
tree *represents* the set of orders obtainable this way.

Normal form kept by every operation: internal nodes have degree at least 3,
and degree-3 C-nodes are stored as P-nodes (both kinds allow both cyclic
orders of three neighbors).

``restrict_consecutive`` intersects the represented family with "these
leaves are circularly consecutive"; the result is again a PC-tree, or
:class:`NullTree` when the family becomes empty.
"""

from __future__ import annotations

import itertools
from math import factorial
from typing import Iterable, Iterator, Sequence

from .errors import TooManyLeaves, UnknownLeaf

LEAF = "leaf"
PNODE = "P"
CNODE = "C"


class NullTree:
    """The empty family: no circular order satisfies the constraints."""

    is_null = True
    leaves: frozenset = frozenset()

    def __repr__(self) -> str:
        return "NullTree()"


NULL_TREE = NullTree()


class PCTree:
    """Immutable PC-tree over a finite leaf label set.

    Construct via :func:`new_star` or :func:`from_shape`; derive new trees
    with :func:`restrict_consecutive` and :func:`delete_leaf`.
    """

    is_null = False

    __slots__ = ("_kind", "_adj", "_cycle", "_label", "_node_of", "leaves")

    def __init__(self, kind, adj, cycle, label):
        # internal constructor; dicts are owned by the instance
        self._kind = kind                      # node id -> LEAF | PNODE | CNODE
        self._adj = adj                        # node id -> frozenset of node ids
        self._cycle = cycle                    # C node id -> tuple (ccw neighbors)
        self._label = label                    # leaf node id -> leaf label
        self._node_of = {lab: nid for nid, lab in label.items()}
        self.leaves = frozenset(label.values())
        for x, nbrs in adj.items():
            for y in nbrs:
                assert x in adj[y], "asymmetric adjacency"
        for x, k in kind.items():
            if k == CNODE:
                assert frozenset(cycle[x]) == adj[x] and len(cycle[x]) == len(adj[x])

    # -- inspection ----------------------------------------------------------

    def degree(self, nid: int) -> int:
        return len(self._adj[nid])

    def debug_string(self) -> str:
        """Deterministic nested rendering, e.g. ``P(1,2,C(3,4,5))``."""
        if not self.leaves:
            return "()"
        if len(self.leaves) == 1:
            return repr(next(iter(self.leaves)))
        anchor_node = self._node_of[_anchor(self.leaves)]
        (root,) = self._adj[anchor_node]
        if self._kind[root] == LEAF:  # two-leaf tree
            return f"edge({self._label[anchor_node]!r},{self._label[root]!r})"

        def render(nid, parent):
            k = self._kind[nid]
            if k == LEAF:
                return repr(self._label[nid])
            if k == PNODE:
                parts = sorted(render(c, nid) for c in self._adj[nid] if c != parent)
                return "P(" + ",".join(parts) + ")"
            cyc = list(self._cycle[nid])
            pivot = parent if parent in cyc else anchor_node
            i = cyc.index(pivot)
            rest = cyc[i + 1 :] + cyc[:i] if pivot == parent else cyc[i:] + cyc[:i]
            fwd = [render(c, nid) for c in rest]
            bwd = [render(c, nid) for c in reversed(rest)]
            return "C(" + ",".join(min(fwd, bwd)) + ")"

        return render(root, None)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PCTree({sorted(map(repr, self.leaves))})"


# ---------------------------------------------------------------------------
# construction helpers


def _anchor(labels):
    try:
        return min(labels)
    except TypeError:
        return min(labels, key=repr)


class _Builder:
    """Mutable scratch structure; ``finish`` normalizes and freezes."""

    def __init__(self):
        self.kind: dict[int, str] = {}
        self.adj: dict[int, set[int]] = {}
        self.cycle: dict[int, list[int]] = {}
        self.label: dict[int, object] = {}
        self._next = 0

    @classmethod
    def from_tree(cls, t: PCTree) -> "_Builder":
        b = cls()
        b.kind = dict(t._kind)
        b.adj = {x: set(n) for x, n in t._adj.items()}
        b.cycle = {x: list(c) for x, c in t._cycle.items()}
        b.label = dict(t._label)
        b._next = max(b.kind, default=-1) + 1
        return b

    def fresh(self, k: str) -> int:
        nid = self._next
        self._next += 1
        self.kind[nid] = k
        self.adj[nid] = set()
        if k == CNODE:
            self.cycle[nid] = []
        return nid

    def link(self, x: int, y: int) -> None:
        self.adj[x].add(y)
        self.adj[y].add(x)

    def replace_germ(self, node: int, old: int, new: int) -> None:
        self.adj[node].discard(old)
        self.adj[node].add(new)
        if self.kind[node] == CNODE:
            c = self.cycle[node]
            c[c.index(old)] = new

    def remove_germ(self, node: int, gone: int) -> None:
        self.adj[node].discard(gone)
        if self.kind[node] == CNODE:
            self.cycle[node].remove(gone)

    def drop(self, nid: int) -> None:
        del self.kind[nid]
        del self.adj[nid]
        self.cycle.pop(nid, None)
        self.label.pop(nid, None)

    def normalize(self) -> None:
        changed = True
        while changed:
            changed = False
            for x in list(self.kind):
                if x not in self.kind or self.kind[x] == LEAF:
                    continue
                deg = len(self.adj[x])
                if deg == 0:
                    self.drop(x)
                    changed = True
                elif deg == 1:
                    (y,) = self.adj[x]
                    self.remove_germ(y, x)
                    self.drop(x)
                    changed = True
                elif deg == 2:
                    a, b = sorted(self.adj[x])
                    self.replace_germ(a, x, b)
                    self.replace_germ(b, x, a)
                    self.drop(x)
                    changed = True
                elif deg == 3 and self.kind[x] == CNODE:
                    self.kind[x] = PNODE
                    del self.cycle[x]
                    changed = True

    def finish(self) -> PCTree:
        self.normalize()
        return PCTree(
            dict(self.kind),
            {x: frozenset(n) for x, n in self.adj.items()},
            {x: tuple(c) for x, c in self.cycle.items()},
            dict(self.label),
        )


def new_star(labels: Iterable) -> PCTree:
    """The unconstrained family: every circular order of the labels."""
    labs = list(labels)
    if len(labs) != len(set(labs)):
        raise ValueError("duplicate leaf labels")
    if not labs:
        raise ValueError("a PC-tree needs at least one leaf")
    b = _Builder()
    leaf_ids = []
    for lab in labs:
        nid = b.fresh(LEAF)
        b.label[nid] = lab
        leaf_ids.append(nid)
    if len(labs) == 1:
        return b.finish()
    if len(labs) == 2:
        b.link(leaf_ids[0], leaf_ids[1])
        return b.finish()
    center = b.fresh(PNODE)
    for nid in leaf_ids:
        b.link(center, nid)
    return b.finish()


def from_shape(shape) -> PCTree:
    """Build a tree from a nested description.

    A description is either a leaf label, or ``("P", [children])`` /
    ``("C", [children])`` with the C-children listed in cyclic order.
    """
    b = _Builder()
    seen_labels = set()

    def build(spec) -> int:
        if (
            isinstance(spec, tuple)
            and len(spec) == 2
            and spec[0] in (PNODE, CNODE)
            and isinstance(spec[1], (list, tuple))
        ):
            k, children = spec
            nid = b.fresh(k)
            for ch in children:
                cid = build(ch)
                b.link(nid, cid)
                if k == CNODE:
                    b.cycle[nid].append(cid)
                if b.kind[cid] == CNODE:
                    b.cycle[cid].append(nid)  # parent germ closes the child's ring
            return nid
        if spec in seen_labels:
            raise ValueError(f"duplicate leaf label {spec!r}")
        seen_labels.add(spec)
        nid = b.fresh(LEAF)
        b.label[nid] = spec
        return nid

    build(shape)
    return b.finish()


# ---------------------------------------------------------------------------
# order enumeration


def count_orders(tree: PCTree | NullTree) -> int:
    """Number of distinct represented circular orders (anchored tuples)."""
    if tree.is_null:
        return 0
    if len(tree.leaves) <= 2:
        return 1 if tree.leaves else 0
    total = 1
    for x, k in tree._kind.items():
        if k == PNODE:
            total *= factorial(len(tree._adj[x]) - 1)
        elif k == CNODE:
            total *= 2
    return total


def enumerate_orders(
    tree: PCTree | NullTree, bound: int | None = None
) -> Iterator[tuple]:
    """Yield every represented circular order, anchored at the smallest leaf.

    Each order is a tuple starting with the anchor leaf; distinct tuples are
    distinct circular orders.  With ``bound`` set, :class:`TooManyLeaves` is
    raised up front when more than ``bound`` orders would be produced.
    """
    if bound is not None and count_orders(tree) > bound:
        raise TooManyLeaves(
            f"{count_orders(tree)} represented orders exceed the bound {bound}"
        )
    if tree.is_null:
        return
    labels = tree.leaves
    if not labels:
        return
    if len(labels) <= 2:
        a = _anchor(labels)
        yield (a,) + tuple(labels - {a})
        return

    internal = [x for x, k in tree._kind.items() if k != LEAF]
    option_lists = []
    for x in internal:
        if tree._kind[x] == PNODE:
            nbrs = sorted(tree._adj[x])
            first, rest = nbrs[0], nbrs[1:]
            option_lists.append(
                [(first,) + perm for perm in itertools.permutations(rest)]
            )
        else:
            cyc = tree._cycle[x]
            option_lists.append([tuple(cyc), tuple(reversed(cyc))])

    anchor = _anchor(labels)
    anchor_node = tree._node_of[anchor]
    (start_nb,) = tree._adj[anchor_node]

    for combo in itertools.product(*option_lists):
        rot = {x: combo[i] for i, x in enumerate(internal)}
        order = [anchor]
        prev, cur = anchor_node, start_nb
        while True:
            if tree._kind[cur] == LEAF:
                if cur == anchor_node:
                    break
                order.append(tree._label[cur])
                prev, cur = cur, prev
            else:
                ring = rot[cur]
                nxt = ring[(ring.index(prev) + 1) % len(ring)]
                prev, cur = cur, nxt
        yield tuple(order)


def any_order(tree: PCTree | NullTree) -> tuple | None:
    """One represented order (``None`` for the empty family)."""
    if tree.is_null:
        return None
    return next(enumerate_orders(tree), None)


# ---------------------------------------------------------------------------
# restriction


def restrict_consecutive(tree: PCTree | NullTree, subset: Iterable) -> PCTree | NullTree:
    """Keep only the orders in which ``subset`` appears circularly consecutive.

    Labels outside the leaf set are ignored.  Returns the input tree object
    itself when the constraint is already implied.
    """
    if tree.is_null:
        return tree
    full_labels = set(subset) & tree.leaves
    n = len(tree.leaves)
    f = len(full_labels)
    if f <= 1 or f >= n - 1:
        return tree

    full_nodes = {tree._node_of[lab] for lab in full_labels}

    # per-germ leaf counts: germ (x, y) sees the component of y after cutting
    down_total: dict[tuple[int, int], int] = {}
    down_full: dict[tuple[int, int], int] = {}
    root = next(iter(tree._node_of.values()))
    order = []
    parent = {root: None}
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for w in tree._adj[v]:
            if w != parent[v]:
                parent[w] = v
                stack.append(w)
    for v in reversed(order):
        t = c = 0
        if tree._kind[v] == LEAF:
            t = 1
            c = 1 if v in full_nodes else 0
        for w in tree._adj[v]:
            if parent.get(w) == v:
                t += down_total[(v, w)]
                c += down_full[(v, w)]
        if parent[v] is not None:
            down_total[(parent[v], v)] = t
            down_full[(parent[v], v)] = c
    for v in order:
        p = parent[v]
        if p is not None:
            down_total[(v, p)] = n - down_total[(p, v)]
            down_full[(v, p)] = f - down_full[(p, v)]

    def is_mixed(germ):
        return 0 < down_full[germ] < down_total[germ]

    def pure_full(germ):
        return down_full[germ] == down_total[germ]

    # a clean edge already isolates the subset as a subtree arc
    for germ, c in down_full.items():
        if c == f and down_total[germ] == f:
            return tree

    partial_edges = {
        frozenset((x, y))
        for (x, y) in down_full
        if x < y and is_mixed((x, y)) and is_mixed((y, x))
    }

    if not partial_edges:
        return _split_at_node(tree, down_full, down_total, f)
    return _rebuild_along_path(tree, down_full, down_total, partial_edges)


def _split_at_node(tree, down_full, down_total, f):
    # every edge has a pure side; all full germs meet at a single node
    z = None
    for x in tree._kind:
        if tree._kind[x] == LEAF:
            continue
        germs = [(x, y) for y in tree._adj[x] if 0 < down_full[(x, y)]]
        if germs and all(down_full[g] == down_total[g] for g in germs):
            covered = sum(down_full[g] for g in germs)
            if covered == f:
                z = x
                break
    assert z is not None, "split node must exist when no edge is partial"
    full_nbrs = [y for y in tree._adj[z] if down_full[(z, y)] > 0]
    if tree._kind[z] == CNODE:
        cyc = tree._cycle[z]
        flags = [down_full[(z, y)] > 0 for y in cyc]
        if _circularly_consecutive(flags):
            return tree
        return NULL_TREE
    # P-node: group the full neighbors under a fresh P child
    b = _Builder.from_tree(tree)
    q = b.fresh(PNODE)
    for y in full_nbrs:
        b.replace_germ(y, z, q)
        b.adj[z].discard(y)
        b.link(q, y)
    b.link(q, z)
    return b.finish()


def _circularly_consecutive(flags: Sequence[bool]) -> bool:
    runs = 0
    m = len(flags)
    for i in range(m):
        if flags[i] and not flags[i - 1]:
            runs += 1
    return runs <= 1


def _rebuild_along_path(tree, down_full, down_total, partial_edges):
    # partial edges must form a simple path x_0 .. x_k
    incident: dict[int, list[int]] = {}
    for e in partial_edges:
        x, y = tuple(e)
        incident.setdefault(x, []).append(y)
        incident.setdefault(y, []).append(x)
    ends = [x for x, ys in incident.items() if len(ys) == 1]
    if any(len(ys) > 2 for ys in incident.values()) or len(ends) != 2:
        return NULL_TREE
    path = [min(ends)]
    while True:
        here = path[-1]
        prev = path[-2] if len(path) >= 2 else None
        nxts = [y for y in incident[here] if y != prev]
        if not nxts:
            break
        path.append(nxts[0])
    if len(path) != len(partial_edges) + 1:
        return NULL_TREE  # partial edges are disconnected

    b = _Builder.from_tree(tree)
    full_side: list[tuple[int, list[int]]] = []   # (path node, ordered full nbrs)
    empty_side: list[tuple[int, list[int]]] = []

    for i, x in enumerate(path):
        pe_prev = path[i - 1] if i > 0 else None
        pe_next = path[i + 1] if i + 1 < len(path) else None
        others = [y for y in tree._adj[x] if y not in (pe_prev, pe_next)]
        for y in others:
            assert not (0 < down_full[(x, y)] < down_total[(x, y)])
        fulls = [y for y in others if down_full[(x, y)] > 0]
        empties = [y for y in others if down_full[(x, y)] == 0]
        if tree._kind[x] == CNODE:
            oriented = _orient_c_path_node(tree, x, pe_prev, pe_next, set(fulls))
            if oriented is None:
                return NULL_TREE
            fulls, empties = oriented
        full_side.append((x, fulls))
        empty_side.append((x, empties))

    gamma = b.fresh(CNODE)

    def attach(x, group):
        """Hang ``group`` (ordered neighbor list of path node x) onto gamma."""
        if not group:
            return []
        if tree._kind[x] == PNODE and len(group) >= 2:
            q = b.fresh(PNODE)
            for y in group:
                b.replace_germ(y, x, q)
                b.link(q, y)
            b.adj[q].add(gamma)
            return [q]
        for y in group:
            b.replace_germ(y, x, gamma)
        return list(group)

    ring: list[int] = []
    for x, fulls in full_side:
        ring.extend(attach(x, fulls))
    for x, empties in reversed(empty_side):
        ring.extend(attach(x, empties))
    b.cycle[gamma] = ring
    b.adj[gamma] = set(ring)
    for x in path:
        b.drop(x)
    return b.finish()


def _orient_c_path_node(tree, x, pe_prev, pe_next, full_set):
    """Ordered (fulls, empties) of a C-node on the terminal path, or None.

    For an interior node the germs strictly between the two path germs (in
    ccw order from the previous-side germ to the next-side germ) must all be
    full and the rest all empty, in one of the two reflections.  At the two
    ends of the path the cycle re-opens exactly where the single path germ
    sat, which forces mirrored patterns: at the start the germ is followed
    ccw by the empty block then the full block, at the end by the full block
    then the empty block.  The returned lists are in the tree-cycle order
    the new rigid node must use, or ``None`` if neither reflection fits.
    """
    cyc = list(tree._cycle[x])
    for candidate in (cyc, list(reversed(cyc))):
        if pe_prev is not None and pe_next is not None:
            i = candidate.index(pe_prev)
            rot = candidate[i:] + candidate[:i]
            j = rot.index(pe_next)
            between = rot[1:j]
            rest = rot[j + 1 :]
            if all(y in full_set for y in between) and not any(
                y in full_set for y in rest
            ):
                return between, rest
        elif pe_prev is None:
            # path start: ccw after the path germ come empties, then fulls
            i = candidate.index(pe_next)
            rest = candidate[i + 1 :] + candidate[:i]
            a = 0
            while a < len(rest) and rest[a] not in full_set:
                a += 1
            if all(y in full_set for y in rest[a:]):
                return rest[a:], rest[:a]
        else:
            # path end: ccw after the path germ come fulls, then empties
            i = candidate.index(pe_prev)
            rest = candidate[i + 1 :] + candidate[:i]
            a = 0
            while a < len(rest) and rest[a] in full_set:
                a += 1
            if not any(y in full_set for y in rest[a:]):
                return rest[:a], rest[a:]
    return None


# ---------------------------------------------------------------------------
# leaf deletion


def delete_leaf(tree: PCTree | NullTree, label) -> PCTree | NullTree:
    """Forget one leaf; remaining orders are the old ones with it removed."""
    if tree.is_null:
        return tree
    if label not in tree.leaves:
        raise UnknownLeaf(f"leaf {label!r} not in tree")
    b = _Builder.from_tree(tree)
    nid = tree._node_of[label]
    for y in list(b.adj[nid]):
        b.remove_germ(y, nid)
    b.drop(nid)
    return b.finish()
