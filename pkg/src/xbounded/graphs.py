"""Instance data model: labeled multigraphs, rotation systems, faces, and the
algebraic intersection number of walks.

Conventions fixed here and relied on everywhere else:

* Edges are numbered by their position in ``LabeledGraph.edges``.  Edge ``k``
  contributes two *darts* (directed edge-ends): dart ``2k`` points from
  ``edges[k][0]`` to ``edges[k][1]`` and dart ``2k+1`` points the other way.
  ``twin(d) == d ^ 1``.
* A rotation lists, for each vertex, its outgoing darts in counterclockwise
  angular order.
* Faces are traced with the face on the left of each dart: the successor of
  dart ``d`` is the counterclockwise *predecessor* of ``twin(d)`` in the
  rotation at ``d``'s head.  With that convention, the corner swept
  counterclockwise from an out-dart ``x`` to the next out-dart at the same
  vertex belongs to the face containing ``x`` itself.
* The algebraic intersection number of two walks sums contributions of pairs
  of length-2 subwalks (wedges) meeting at a shared vertex; endpoints of open
  walks contribute nothing, and wedges whose two neighbor vertices coincide
  are skipped.  Values are exact rationals with denominator at most 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import Disconnected, LoopEdge, MissingLabel, WalkNotInGraph

VertexId = object  # hashable; strings in JSON instances, ints/tuples internally


# ---------------------------------------------------------------------------
# Dart helpers


def twin(dart: int) -> int:
    """The same edge traversed in the opposite direction."""
    return dart ^ 1


def edge_of(dart: int) -> int:
    """Index of the edge the dart belongs to."""
    return dart >> 1


# ---------------------------------------------------------------------------
# LabeledGraph


class LabeledGraph:
    """A connected multigraph with integer vertex levels.

    ``vertices`` keeps first-seen order (deterministic); ``edges`` is an
    ordered multiset of unordered pairs; ``gamma`` maps every vertex to a
    nonnegative integer level.  Loops are rejected on construction; full
    instance validation (connectivity, label totality) is :func:`validate`.
    Instances are immutable: all fields are private tuples/dicts that must
    not be mutated after construction.
    """

    __slots__ = ("vertices", "edges", "gamma", "_darts_at", "_vset")

    def __init__(
        self,
        vertices: Iterable[VertexId],
        edges: Iterable[tuple[VertexId, VertexId]],
        gamma: Mapping[VertexId, int],
    ) -> None:
        seen: dict[VertexId, None] = {}
        for v in vertices:
            if v in seen:
                raise ValueError(f"duplicate vertex id {v!r}")
            seen[v] = None
        self.vertices: tuple[VertexId, ...] = tuple(seen)
        self._vset = frozenset(self.vertices)
        edge_list = []
        for u, v in edges:
            if u == v:
                raise LoopEdge(f"loop at vertex {u!r}")
            if u not in self._vset or v not in self._vset:
                raise ValueError(f"edge ({u!r},{v!r}) references unknown vertex")
            edge_list.append((u, v))
        self.edges: tuple[tuple[VertexId, VertexId], ...] = tuple(edge_list)
        self.gamma: dict[VertexId, int] = {v: gamma[v] for v in self.vertices if v in gamma}
        darts: dict[VertexId, list[int]] = {v: [] for v in self.vertices}
        for k, (u, v) in enumerate(self.edges):
            darts[u].append(2 * k)
            darts[v].append(2 * k + 1)
        self._darts_at = {v: tuple(ds) for v, ds in darts.items()}

    # -- structure ---------------------------------------------------------

    def darts_at(self, v: VertexId) -> tuple[int, ...]:
        """Outgoing darts at ``v`` in edge-index order."""
        return self._darts_at[v]

    def degree(self, v: VertexId) -> int:
        return len(self._darts_at[v])

    def dart_tail(self, d: int) -> VertexId:
        return self.edges[d >> 1][d & 1]

    def dart_head(self, d: int) -> VertexId:
        return self.edges[d >> 1][1 - (d & 1)]

    def neighbors(self, v: VertexId) -> list[VertexId]:
        return [self.dart_head(d) for d in self._darts_at[v]]

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._vset

    @property
    def num_darts(self) -> int:
        return 2 * len(self.edges)

    def gamma_min(self) -> int:
        return min(self.gamma[v] for v in self.vertices)

    def gamma_max(self) -> int:
        return max(self.gamma[v] for v in self.vertices)

    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1 and self.is_connected()

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for d in self._darts_at[v]:
                w = self.dart_head(d)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"LabeledGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


def validate(g: LabeledGraph) -> LabeledGraph:
    """Full instance validation: totality of labels and connectivity.

    Loops are already impossible by construction; re-checked defensively.
    Returns ``g`` unchanged on success.
    """
    for u, v in g.edges:
        if u == v:  # pragma: no cover - constructor already rejects
            raise LoopEdge(f"loop at vertex {u!r}")
    for v in g.vertices:
        lab = g.gamma.get(v)
        if not isinstance(lab, int) or isinstance(lab, bool) or lab < 0:
            raise MissingLabel(f"vertex {v!r} lacks a nonnegative integer level")
    if not g.is_connected():
        raise Disconnected("instance graph is not connected")
    return g


def split_components(g: LabeledGraph) -> list[LabeledGraph]:
    """Connected components as independent instances (vertex order preserved)."""
    comp_of: dict[VertexId, int] = {}
    comps: list[list[VertexId]] = []
    for start in g.vertices:
        if start in comp_of:
            continue
        idx = len(comps)
        comp_of[start] = idx
        block = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for d in g.darts_at(v):
                w = g.dart_head(d)
                if w not in comp_of:
                    comp_of[w] = idx
                    block.append(w)
                    stack.append(w)
        comps.append(block)
    out = []
    for idx, block in enumerate(comps):
        bset = set(block)
        edges = [(u, v) for (u, v) in g.edges if u in bset]
        out.append(LabeledGraph(block, edges, {v: g.gamma[v] for v in block}))
    return out


# ---------------------------------------------------------------------------
# Unit normalization


def subdivide_to_unit(g: LabeledGraph) -> tuple[LabeledGraph, dict[int, tuple[VertexId, ...]]]:
    """Subdivide every edge with level gap ≥ 2 through the intermediate levels.

    Returns the refined instance and a back-map: original edge index →
    the vertex path that replaced it (endpoints included).  Fresh vertices
    are tuples ``("s", edge_index, step)`` so they never collide with user
    ids.  Contracting each path recovers the original graph.
    """
    new_vertices = list(g.vertices)
    new_gamma = dict(g.gamma)
    new_edges: list[tuple[VertexId, VertexId]] = []
    backmap: dict[int, tuple[VertexId, ...]] = {}
    for k, (u, v) in enumerate(g.edges):
        gu, gv = g.gamma[u], g.gamma[v]
        if abs(gu - gv) <= 1:
            new_edges.append((u, v))
            backmap[k] = (u, v)
            continue
        step = 1 if gv > gu else -1
        path = [u]
        prev = u
        for j, level in enumerate(range(gu + step, gv, step)):
            w = ("s", k, j)
            new_vertices.append(w)
            new_gamma[w] = level
            new_edges.append((prev, w))
            path.append(w)
            prev = w
        new_edges.append((prev, v))
        path.append(v)
        backmap[k] = tuple(path)
    return LabeledGraph(new_vertices, new_edges, new_gamma), backmap


def is_unit_normalized(g: LabeledGraph) -> bool:
    return all(abs(g.gamma[u] - g.gamma[v]) <= 1 for u, v in g.edges)


# ---------------------------------------------------------------------------
# Rotation systems and faces


class RotationSystem:
    """Counterclockwise cyclic order of outgoing darts at every vertex."""

    __slots__ = ("rotation", "_pos")

    def __init__(self, g: LabeledGraph, rotation: Mapping[VertexId, Sequence[int]]) -> None:
        rot: dict[VertexId, tuple[int, ...]] = {}
        pos: dict[int, int] = {}
        for v in g.vertices:
            ds = tuple(rotation[v])
            expected = g.darts_at(v)
            if sorted(ds) != sorted(expected):
                raise ValueError(f"rotation at {v!r} is not a permutation of its darts")
            rot[v] = ds
            for i, d in enumerate(ds):
                pos[d] = i
        self.rotation = rot
        self._pos = pos

    def at(self, v: VertexId) -> tuple[int, ...]:
        return self.rotation[v]

    def position(self, dart: int) -> int:
        """Index of ``dart`` within the rotation at its tail."""
        return self._pos[dart]

    def successor(self, g: LabeledGraph, dart: int) -> int:
        """Counterclockwise next out-dart at the dart's tail."""
        ring = self.rotation[g.dart_tail(dart)]
        return ring[(self._pos[dart] + 1) % len(ring)]

    def predecessor(self, g: LabeledGraph, dart: int) -> int:
        ring = self.rotation[g.dart_tail(dart)]
        return ring[(self._pos[dart] - 1) % len(ring)]


def canonical_rotation(g: LabeledGraph) -> RotationSystem:
    """The rotation listing darts in edge-index order (a fixed baseline)."""
    return RotationSystem(g, {v: g.darts_at(v) for v in g.vertices})


def trace_faces(g: LabeledGraph, rot: RotationSystem) -> tuple[tuple[int, ...], ...]:
    """Face orbits of the embedding, each a dart cycle with the face on the left.

    The successor of dart ``d`` is the ccw predecessor of ``twin(d)`` at
    ``d``'s head.  Every dart lies in exactly one face; faces are
    canonicalized to start at their smallest dart and sorted by it.
    """
    seen = [False] * g.num_darts
    faces: list[tuple[int, ...]] = []
    for start in range(g.num_darts):
        if seen[start]:
            continue
        orbit = []
        d = start
        while not seen[d]:
            seen[d] = True
            orbit.append(d)
            d = rot.predecessor(g, twin(d))
        m = orbit.index(min(orbit))
        faces.append(tuple(orbit[m:] + orbit[:m]))
    faces.sort(key=lambda f: f[0])
    return tuple(faces)


def is_planar_rotation(g: LabeledGraph, rot: RotationSystem) -> bool:
    """Euler test: the rotation describes a sphere embedding iff V−E+F = 2."""
    f = len(trace_faces(g, rot))
    return len(g.vertices) - len(g.edges) + f == 2


class CombEmbedding:
    """A planar rotation system together with a designated outer face.

    The Euler relation is enforced on construction; ``faces`` caches the
    face list so that face ids are stable.
    """

    __slots__ = ("graph", "rotation", "faces", "outer_face", "_face_of_dart")

    def __init__(self, graph: LabeledGraph, rotation: RotationSystem, outer_face: int) -> None:
        self.graph = graph
        self.rotation = rotation
        self.faces = trace_faces(graph, rotation)
        if len(graph.vertices) - len(graph.edges) + len(self.faces) != 2:
            raise ValueError("rotation system is not planar (Euler relation fails)")
        if not (0 <= outer_face < len(self.faces)):
            raise ValueError(f"outer_face {outer_face} out of range")
        self.outer_face = outer_face
        fod = {}
        for i, f in enumerate(self.faces):
            for d in f:
                fod[d] = i
        self._face_of_dart = fod

    def face_of_dart(self, d: int) -> int:
        """Id of the face on the left of dart ``d``."""
        return self._face_of_dart[d]

    def face_of_corner(self, v: VertexId, out_dart: int) -> int:
        """Face sweeping the corner ccw from ``out_dart`` to its successor at v.

        With the left-face tracing convention this is the face containing
        ``out_dart`` itself.
        """
        if self.graph.dart_tail(out_dart) != v:
            raise ValueError("dart does not leave the given vertex")
        return self._face_of_dart[out_dart]


# ---------------------------------------------------------------------------
# Gamma orientation


def orient_by_gamma(g: LabeledGraph) -> tuple[tuple[VertexId, VertexId], ...]:
    """Each edge directed from the smaller level to the bigger.

    Level ties are directed from the lexicographically smaller vertex id
    (compared as strings), so the orientation is total and deterministic.
    """
    directed = []
    for u, v in g.edges:
        gu, gv = g.gamma[u], g.gamma[v]
        if gu < gv or (gu == gv and str(u) <= str(v)):
            directed.append((u, v))
        else:
            directed.append((v, u))
    return tuple(directed)


# ---------------------------------------------------------------------------
# Walks


@dataclass(frozen=True)
class Walk:
    """An alternating vertex/edge sequence; orientation is the list order.

    ``vertices`` has one more element than ``edge_ids`` for open walks; a
    closed walk repeats its first vertex at the end.  Edge ids are indices
    into the graph's edge list, so parallel edges stay distinguishable.
    """

    vertices: tuple[VertexId, ...]
    edge_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.edge_ids) + 1:
            raise ValueError("walk must alternate vertices and edges")

    @property
    def closed(self) -> bool:
        return len(self.edge_ids) >= 1 and self.vertices[0] == self.vertices[-1]

    def is_path(self) -> bool:
        """No repeated vertex (a closed walk may repeat only its endpoints)."""
        interior = self.vertices[:-1] if self.closed else self.vertices
        return len(set(interior)) == len(interior)

    def reverse(self) -> "Walk":
        return Walk(tuple(reversed(self.vertices)), tuple(reversed(self.edge_ids)))

    def span(self, g: LabeledGraph) -> tuple[int, int]:
        levels = [g.gamma[v] for v in self.vertices]
        return min(levels), max(levels)

    def __len__(self) -> int:
        return len(self.edge_ids)


def walk_from_vertices(g: LabeledGraph, vertices: Sequence[VertexId]) -> Walk:
    """Build a walk along the given vertices, picking the first matching edge.

    Only usable when the chosen edges are unambiguous (no parallel edges
    between consecutive vertices, or any of them will do).
    """
    edge_ids = []
    index: dict[tuple[VertexId, VertexId], int] = {}
    for k, (u, v) in enumerate(g.edges):
        index.setdefault((u, v), k)
        index.setdefault((v, u), k)
    for a, b in zip(vertices, vertices[1:]):
        k = index.get((a, b))
        if k is None:
            raise WalkNotInGraph(f"no edge between {a!r} and {b!r}")
        edge_ids.append(k)
    return Walk(tuple(vertices), tuple(edge_ids))


def check_walk(g: LabeledGraph, w: Walk) -> None:
    """Raise :class:`WalkNotInGraph` unless the walk lives in ``g``."""
    for v in w.vertices:
        if not g.has_vertex(v):
            raise WalkNotInGraph(f"vertex {v!r} not in graph")
    for a, e, b in zip(w.vertices, w.edge_ids, w.vertices[1:]):
        if not (0 <= e < len(g.edges)):
            raise WalkNotInGraph(f"edge id {e} out of range")
        ends = g.edges[e]
        if ends != (a, b) and ends != (b, a):
            raise WalkNotInGraph(f"edge {e} does not join {a!r} and {b!r}")


def _traversed_dart(g: LabeledGraph, tail: VertexId, head: VertexId, edge_id: int) -> int:
    u, v = g.edges[edge_id]
    if (u, v) == (tail, head):
        return 2 * edge_id
    if (v, u) == (tail, head):
        return 2 * edge_id + 1
    raise WalkNotInGraph(f"edge {edge_id} does not join {tail!r} and {head!r}")


def _wedges(g: LabeledGraph, w: Walk) -> list[tuple[VertexId, int, int]]:
    """Interior length-2 subwalks as (vertex, arrive-dart-twin, depart-dart).

    The first dart of each wedge is the out-dart pointing back where the
    walk came from; the second is the out-dart it leaves along.  Wedges whose
    two neighbor vertices coincide are omitted (their contribution is zero by
    definition).  Closed walks also produce the seam wedge; open walks have
    no wedge at their endpoints.
    """
    out: list[tuple[VertexId, int, int]] = []
    n = len(w.edge_ids)
    if n == 0:
        return out
    positions: list[int]
    if w.closed:
        positions = list(range(n))  # wedge at vertices[i] pairing edge i-1 -> i
    else:
        positions = list(range(1, n))
    for i in positions:
        v = w.vertices[i]
        prev_v = w.vertices[i - 1]
        next_v = w.vertices[i + 1]
        e_in = w.edge_ids[i - 1]
        e_out = w.edge_ids[i]
        if w.closed and i == 0:
            v = w.vertices[0]
            prev_v = w.vertices[-2]
            next_v = w.vertices[1]
            e_in = w.edge_ids[-1]
            e_out = w.edge_ids[0]
        if prev_v == next_v:
            continue
        a = twin(_traversed_dart(g, prev_v, v, e_in))
        b = _traversed_dart(g, v, next_v, e_out)
        out.append((v, a, b))
    return out


def _cr(rot: RotationSystem, deg: int, p1: tuple[int, int], p2: tuple[int, int]) -> Fraction:
    """Contribution of the wedge pair at one vertex, exact with denominator 2.

    Sign convention: the second wedge crossing the first from its left to its
    right counts +1; running along one shared edge-germ and ending from the
    left / leaving to the right counts +1/2.
    """
    a1, b1 = p1
    a2, b2 = p2
    shared = {a2, b2} & {a1, b1}
    if len(shared) == 2:
        return Fraction(0)
    pos = rot.position
    m = (pos(a1) - pos(b1)) % deg

    def side(dart: int) -> int:
        """+1 if strictly left of wedge 1, -1 if strictly right."""
        t = (pos(dart) - pos(b1)) % deg
        return 1 if 0 < t < m else -1

    if not shared:
        sa, sb = side(a2), side(b2)
        if sa > 0 and sb < 0:
            return Fraction(1)
        if sa < 0 and sb > 0:
            return Fraction(-1)
        return Fraction(0)
    # Exactly one shared dart: the free end determines a half contribution.
    if a2 in shared:
        free, arriving = b2, False
    else:
        free, arriving = a2, True
    s = side(free)
    if arriving:
        return Fraction(1, 2) if s > 0 else Fraction(-1, 2)
    return Fraction(1, 2) if s < 0 else Fraction(-1, 2)


def algebraic_intersection(
    g: LabeledGraph, rot: RotationSystem, w1: Walk, w2: Walk
) -> Fraction:
    """Signed count of crossings forced by the rotation, summed over wedge pairs.

    Exact rational with denominator dividing 2.  Antisymmetric under
    reversing either walk; zero for pairs of closed walks on planar
    rotations.
    """
    check_walk(g, w1)
    check_walk(g, w2)
    by_vertex: dict[VertexId, list[tuple[int, int]]] = {}
    for v, a, b in _wedges(g, w1):
        by_vertex.setdefault(v, []).append((a, b))
    total = Fraction(0)
    for v, a, b in _wedges(g, w2):
        here = by_vertex.get(v)
        if not here:
            continue
        deg = g.degree(v)
        for p1 in here:
            total += _cr(rot, deg, p1, (a, b))
    return total


# ---------------------------------------------------------------------------
# JSON instance format


def parse_instance(data: Mapping) -> LabeledGraph:
    """Parse ``{"vertices":[{"id":...,"gamma":...}],"edges":[[u,v],...]}``.

    Duplicate ids are rejected; levels must be nonnegative integers.
    """
    try:
        raw_vertices = data["vertices"]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError("instance must have 'vertices' and 'edges'") from exc
    ids: list[VertexId] = []
    gamma: dict[VertexId, int] = {}
    seen = set()
    for item in raw_vertices:
        vid = item["id"]
        if vid in seen:
            raise ValueError(f"duplicate vertex id {vid!r}")
        seen.add(vid)
        lab = item["gamma"]
        if not isinstance(lab, int) or isinstance(lab, bool) or lab < 0:
            raise MissingLabel(f"vertex {vid!r} lacks a nonnegative integer level")
        ids.append(vid)
        gamma[vid] = lab
    edges = []
    for pair in raw_edges:
        if len(pair) != 2:
            raise ValueError(f"edge {pair!r} must have two endpoints")
        edges.append((pair[0], pair[1]))
    return LabeledGraph(ids, edges, gamma)


def instance_to_dict(g: LabeledGraph) -> dict:
    return {
        "vertices": [{"id": v, "gamma": g.gamma[v]} for v in g.vertices],
        "edges": [[u, v] for u, v in g.edges],
    }
