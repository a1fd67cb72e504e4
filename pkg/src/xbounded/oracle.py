"""Exhaustive ground-truth decision for small instances.

Enumerates every planar rotation system (modulo one global reflection) with
every outer-face choice, and checks each isotopy class against the two
obstructions — infeasible interleaving cap/cup pairs and trapped vertices.
The answer is yes exactly when some class is obstruction-free; the witness
embedding is returned and re-verified through the public checker.

Caps, cups, interleaving pairs, and simple cycles do not depend on the
rotation, so they are computed once per graph and reused across the whole
enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Iterator

from .characterize import (
    CAP,
    InterleavingPair,
    TrappedWitness,
    check_isotopy_class,
    enumerate_caps_cups,
    interior_faces,
    is_interleaving,
    simple_cycles,
)
from .errors import TooLarge
from .graphs import (
    CombEmbedding,
    LabeledGraph,
    RotationSystem,
    algebraic_intersection,
    canonical_rotation,
    is_unit_normalized,
    subdivide_to_unit,
    trace_faces,
)

DEFAULT_MAX_EMBEDDINGS = 50_000


@dataclass(frozen=True)
class Refusal:
    """Why one enumerated isotopy class was rejected."""

    rotation: tuple
    outer_face: int
    violation: InterleavingPair | TrappedWitness


@dataclass(frozen=True)
class OracleResult:
    admits: bool
    witness: CombEmbedding | None
    refusals: tuple[Refusal, ...]


def count_rotations(g: LabeledGraph, quotient: bool = True) -> int:
    """Rotation systems the enumeration will visit (before planarity filter)."""
    total = 1
    has_branch = False
    for v in g.vertices:
        d = g.degree(v)
        if d >= 3:
            has_branch = True
            total *= factorial(d - 1)
    if quotient and has_branch:
        total //= 2
    return total


def enumerate_embeddings(
    g: LabeledGraph,
    max_embeddings: int | None = DEFAULT_MAX_EMBEDDINGS,
    quotient: bool = True,
) -> Iterator[CombEmbedding]:
    """Every planar rotation system with every outer-face choice.

    Rotations fix each vertex's first dart (cyclic orders, not linear); the
    first branch vertex is additionally halved by reflection, because a
    global mirror preserves strip embeddability.  ``max_embeddings`` bounds
    the rotation count up front via :class:`TooLarge`; ``quotient=False``
    restores the full, unquotiented enumeration for debugging.
    """
    if max_embeddings is not None:
        total = count_rotations(g, quotient)
        if total > max_embeddings:
            raise TooLarge(
                f"{total} rotation systems exceed the bound {max_embeddings}"
            )
    branch = [v for v in g.vertices if g.degree(v) >= 3]
    first_branch = branch[0] if branch else None
    per_vertex: list[list[tuple[int, ...]]] = []
    for v in branch:
        darts = g.darts_at(v)
        options = []
        for perm in itertools.permutations(darts[1:]):
            if quotient and v == first_branch and perm > tuple(reversed(perm)):
                continue
            options.append((darts[0],) + perm)
        per_vertex.append(options)
    base = {v: g.darts_at(v) for v in g.vertices if g.degree(v) < 3}
    for combo in itertools.product(*per_vertex):
        rotation = dict(base)
        for v, order in zip(branch, combo):
            rotation[v] = order
        rot = RotationSystem(g, rotation)
        faces = trace_faces(g, rot)
        if len(g.vertices) - len(g.edges) + len(faces) != 2:
            continue
        for outer in range(len(faces)):
            yield CombEmbedding(g, rot, outer)


def oracle_decide(
    g: LabeledGraph,
    max_embeddings: int | None = DEFAULT_MAX_EMBEDDINGS,
    quotient: bool = True,
) -> OracleResult:
    """Exhaustive yes/no with witness embedding or per-class refusal log.

    Instances whose edges jump more than one level are refined through the
    intermediate levels first (answer-preserving), because level jumps hide
    cap/cup endpoints from the conditions being checked: the witness and any
    refusals then live on the refined graph.
    """
    if not is_unit_normalized(g):
        g = subdivide_to_unit(g)[0]
    if not g.edges:
        # an isolated vertex embeds trivially; there is no dart structure to
        # return, so the witness slot stays empty
        return OracleResult(True, None, ())
    caps, cups = [], []
    for cc in enumerate_caps_cups(g):
        (caps if cc.kind == CAP else cups).append(cc)
    pairs = []
    for cap in caps:
        for cup in cups:
            pair = is_interleaving(cap, cup)
            if pair is not None:
                pairs.append(pair)
    cycles = simple_cycles(g)
    if g.is_tree() and not pairs:
        # any rotation embeds: trees cannot trap and have nothing to cross
        emb = CombEmbedding(g, canonical_rotation(g), 0)
        assert check_isotopy_class(emb).admits
        return OracleResult(True, emb, ())
    # trapped candidates per cycle, by level range
    bad_by_cycle = []
    for c in cycles:
        on_cycle = set(c.vertices)
        levels = [g.gamma[v] for v in c.vertices]
        lo, hi = min(levels), max(levels)
        bad = [
            v
            for v in g.vertices
            if v not in on_cycle and not (lo <= g.gamma[v] <= hi)
        ]
        if bad:
            bad_by_cycle.append((c, bad))
    refusals = []
    for emb in enumerate_embeddings(g, max_embeddings, quotient):
        violation = None
        for c, bad in bad_by_cycle:
            inside = interior_faces(emb, c)
            for v in bad:
                if emb.face_of_dart(g.darts_at(v)[0]) in inside:
                    violation = TrappedWitness(v, c)
                    break
            if violation:
                break
        if violation is None:
            for pair in pairs:
                if algebraic_intersection(
                    g, emb.rotation, pair.cap.path, pair.cup.path
                ) != 0:
                    violation = pair
                    break
        if violation is None:
            assert check_isotopy_class(emb).admits
            return OracleResult(True, emb, tuple(refusals))
        key = tuple(
            (v, emb.rotation.at(v)) for v in g.vertices if g.degree(v) >= 3
        )
        refusals.append(Refusal(key, emb.outer_face, violation))
    return OracleResult(False, None, tuple(refusals))
