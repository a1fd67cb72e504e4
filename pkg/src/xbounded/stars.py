"""Decision procedure for subdivided stars.

A subdivided star is a path bundle: one center of arbitrary degree whose
legs are paths.  Every obstruction lives at the center — a down-reaching
cap pair and an up-reaching cup pair interleave exactly when their level
spans properly overlap — so embeddability reduces to ordering the legs
around the center such that, for every witnessing interval (s, b), the
legs that dip to s (staying below b) and the legs that climb to b (staying
above s) occupy two disjoint circular arcs.  Those constraints, one row
per interval, form a staircase 0/1/* matrix solved by the ambiguous
circular-ones machinery; the witness column order is the center rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ambmatrix import AmbMatrix, solve, star_close
from .characterize import check_isotopy_class
from .errors import Infeasible, PreconditionViolated
from .graphs import CombEmbedding, LabeledGraph, RotationSystem

ZERO, ONE, STAR = "0", "1", "*"


@dataclass(frozen=True)
class SubdividedStar:
    """Center level plus one level sequence per leg (center level first)."""

    center_level: int
    legs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for li, leg in enumerate(self.legs):
            if len(leg) < 2:
                raise ValueError(f"leg {li} has no edge")
            if leg[0] != self.center_level:
                raise ValueError(f"leg {li} does not start at the center level")
            for a, b in zip(leg, leg[1:]):
                if abs(a - b) > 1:
                    raise PreconditionViolated(
                        f"leg {li} jumps more than one level"
                    )
            if any(lv < 0 for lv in leg):
                raise ValueError(f"leg {li} has a negative level")


@dataclass(frozen=True)
class LegProfile:
    """Tightest cap/cup data of one leg.

    ``m_cap[s]`` is the maximum level on the shortest center prefix ending
    at level ``s`` (defined for each s below the center the leg reaches):
    the lowest ceiling under which this leg can serve as half of an s-cap.
    ``m_cup[b]`` mirrors it with the minimum over the prefix to the first
    vertex at level ``b``.
    """

    m_cap: dict[int, int]
    m_cup: dict[int, int]


@dataclass(frozen=True)
class StarVerdict:
    feasible: bool
    rotation: tuple[int, ...] | None = None
    failed_interval: tuple[int, int] | None = None

    def __post_init__(self):
        if self.feasible == (self.rotation is None):
            raise ValueError("feasible verdicts carry a rotation, refusals do not")


def leg_profiles(star: SubdividedStar) -> list[LegProfile]:
    center = star.center_level
    out = []
    for leg in star.legs:
        m_cap: dict[int, int] = {}
        m_cup: dict[int, int] = {}
        run_max = run_min = center
        for lv in leg:
            run_max = max(run_max, lv)
            run_min = min(run_min, lv)
            if lv < center and lv not in m_cap:
                m_cap[lv] = run_max
            if lv > center and lv not in m_cup:
                m_cup[lv] = run_min
        out.append(LegProfile(m_cap, m_cup))
    return out


def cap_cup_edge_sets(
    star: SubdividedStar, s: int, b: int, profiles: list[LegProfile] | None = None
) -> tuple[frozenset[int], frozenset[int]]:
    """Leg indices usable in an s-cap below b, and in a b-cup above s.

    A cap needs two legs, so either set with fewer than two members
    collapses to empty; the two sets are always disjoint, because a leg
    whose first deep visit stays under b cannot also first climb to b
    while staying above s.
    """
    if not (s < star.center_level < b):
        raise ValueError("interval must straddle the center level")
    if profiles is None:
        profiles = leg_profiles(star)
    caps = frozenset(
        i for i, p in enumerate(profiles) if s in p.m_cap and p.m_cap[s] < b
    )
    cups = frozenset(
        i for i, p in enumerate(profiles) if b in p.m_cup and p.m_cup[b] > s
    )
    if len(caps) < 2:
        caps = frozenset()
    if len(cups) < 2:
        cups = frozenset()
    return caps, cups


def interval_set(star: SubdividedStar) -> list[tuple[int, int]]:
    """All restriction-witnessing intervals, in matrix row order.

    An interval (s, b) witnesses a restriction when at least two legs can
    form an s-cap under b and at least two can form a b-cup above s.  Rows
    are emitted in nested blocks: each block starts at the tightest
    remaining interval (largest s, smallest b — a unique interval, since
    witnessing intervals are closed under endpoint exchange), followed by
    the same-top intervals with s descending, then the same-bottom
    intervals with b ascending.  Along that order a leg leaves the active
    support at most once, which is what keeps the matrix a staircase.
    """
    profiles = leg_profiles(star)
    center = star.center_level
    down_levels = sorted({s for p in profiles for s in p.m_cap}, reverse=True)
    up_levels = sorted({b for p in profiles for b in p.m_cup})
    members = set()
    for s in down_levels:
        for b in up_levels:
            caps, cups = cap_cup_edge_sets(star, s, b, profiles)
            if caps and cups:
                members.add((s, b))
    assert all(s < center < b for s, b in members)
    order: list[tuple[int, int]] = []
    remaining = set(members)
    while remaining:
        s0 = max(s for s, _ in remaining)
        b0 = min(b for _, b in remaining)
        assert (s0, b0) in remaining, "witness intervals are exchange-closed"
        order.append((s0, b0))
        remaining.discard((s0, b0))
        same_top = sorted(
            [(s, b) for s, b in remaining if b == b0], key=lambda sb: -sb[0]
        )
        same_bottom = sorted([(s, b) for s, b in remaining if s == s0])
        order.extend(same_top)
        order.extend(same_bottom)
        remaining.difference_update(same_top)
        remaining.difference_update(same_bottom)
    return order


def star_matrix(star: SubdividedStar) -> AmbMatrix:
    """One row per witnessing interval: 0 on cap legs, 1 on cup legs, * off.

    The star closure afterwards re-stars every entry below a column's
    first star, which coincides with recursively trimming each row's
    support to the union of the previous row's support.
    """
    profiles = leg_profiles(star)
    columns = list(range(len(star.legs)))
    rows = []
    for s, b in interval_set(star):
        caps, cups = cap_cup_edge_sets(star, s, b, profiles)
        row = []
        for i in columns:
            if i in caps:
                row.append(ZERO)
            elif i in cups:
                row.append(ONE)
            else:
                row.append(STAR)
        rows.append("".join(row))
    return star_close(AmbMatrix(columns, rows))


def star_to_graph(star: SubdividedStar) -> LabeledGraph:
    """The star as a labeled graph: center ``c``, leg vertices ``L{i}_{j}``."""
    verts: list = ["c"]
    gamma = {"c": star.center_level}
    edges = []
    for li, leg in enumerate(star.legs):
        prev = "c"
        for j, lv in enumerate(leg[1:]):
            name = f"L{li}_{j}"
            verts.append(name)
            gamma[name] = lv
            edges.append((prev, name))
            prev = name
    return LabeledGraph(verts, edges, gamma)


def build_star_embedding(
    star: SubdividedStar, rotation: tuple[int, ...]
) -> CombEmbedding:
    """Embedding with the given cyclic leg order at the center.

    Legs are edge-contiguous in :func:`star_to_graph`, so leg ``i``'s
    center dart is twice the index of its first edge.
    """
    g = star_to_graph(star)
    first_edge = {}
    k = 0
    for li, leg in enumerate(star.legs):
        first_edge[li] = k
        k += len(leg) - 1
    rot = {v: g.darts_at(v) for v in g.vertices}
    rot["c"] = tuple(2 * first_edge[li] for li in rotation)
    return CombEmbedding(g, RotationSystem(g, rot), 0)


def decide_star(star: SubdividedStar) -> StarVerdict:
    """Feasibility plus a certified center rotation.

    Centers of degree at most two are paths and always embed.  Otherwise
    the interval matrix decides: a witness column order is returned as the
    rotation, and the resulting embedding is re-certified by the public
    checker before the verdict leaves this function.
    """
    n = len(star.legs)
    if n <= 2:
        rotation = tuple(range(n))
        if n:
            emb = build_star_embedding(star, rotation)
            assert check_isotopy_class(emb).admits
        return StarVerdict(True, rotation)
    m = star_matrix(star)
    intervals = interval_set(star)
    try:
        _, witness = solve(m)
    except Infeasible as exc:
        return StarVerdict(False, failed_interval=intervals[exc.row_id])
    emb = build_star_embedding(star, tuple(witness))
    assert check_isotopy_class(emb).admits
    return StarVerdict(True, tuple(witness))
