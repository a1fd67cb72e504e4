"""Circular-ones solving for matrices over {0, 1, *}.

A row constrains the circular order of the columns: among the columns where
the row reads 0 or 1, the 1-columns must form one contiguous circular arc.
A ``*`` entry means the row says nothing about that column.

Matrices here obey (or are first closed to) the *staircase* discipline: in
every column, once a ``*`` appears all lower entries are ``*`` too.  A column
is *alive* at a row if it is not yet starred there; dying columns leave the
active order one row at a time, which is what lets a PC-tree sweep solve the
whole system: process rows top to bottom, delete newly starred columns from
the tree, and restrict the tree on the 1-columns of the row.

``solve`` also reconstructs a circular order of *all* columns witnessing
satisfiability, by re-inserting the deleted columns in reverse deletion
order with backtracking; ``brute_solve`` is the small-instance referee.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import Infeasible, StaircaseViolation, TooLarge
from .pctree import (
    LEAF,
    NullTree,
    PCTree,
    delete_leaf,
    enumerate_orders,
    new_star,
    restrict_consecutive,
)

ZERO, ONE, STAR = "0", "1", "*"
_VALID = {ZERO, ONE, STAR}


class AmbMatrix:
    """An ordered list of rows over named columns, entries in {0, 1, *}."""

    __slots__ = ("columns", "rows", "_col_index")

    def __init__(self, columns: Iterable, rows: Iterable[Sequence[str]]) -> None:
        self.columns = tuple(columns)
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column ids")
        packed = []
        for r, row in enumerate(rows):
            s = "".join(row)
            if len(s) != len(self.columns):
                raise ValueError(f"row {r} has {len(s)} entries, expected {len(self.columns)}")
            bad = set(s) - _VALID
            if bad:
                raise ValueError(f"row {r} contains invalid entries {bad}")
            packed.append(s)
        self.rows = tuple(packed)
        self._col_index = {c: j for j, c in enumerate(self.columns)}

    def entry(self, row: int, col) -> str:
        return self.rows[row][self._col_index[col]]

    def star_rows(self) -> dict:
        """First row index where each column is starred (absent if never)."""
        out = {}
        for j, c in enumerate(self.columns):
            for r, row in enumerate(self.rows):
                if row[j] == STAR:
                    out[c] = r
                    break
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"AmbMatrix({len(self.columns)} cols, {len(self.rows)} rows)"


def validate_staircase(m: AmbMatrix) -> AmbMatrix:
    """Require stars to be downward-closed per column.

    Raises :class:`StaircaseViolation` naming the offending column and the
    row with a concrete entry below a ``*``.
    """
    for j, c in enumerate(m.columns):
        starred = False
        for r, row in enumerate(m.rows):
            if row[j] == STAR:
                starred = True
            elif starred:
                raise StaircaseViolation(c, r)
    return m


def star_close(m: AmbMatrix) -> AmbMatrix:
    """Propagate each column's first ``*`` down to the bottom of the matrix."""
    n = len(m.columns)
    dead = [False] * n
    new_rows = []
    for row in m.rows:
        chars = list(row)
        for j in range(n):
            if dead[j]:
                chars[j] = STAR
            elif chars[j] == STAR:
                dead[j] = True
        new_rows.append("".join(chars))
    return AmbMatrix(m.columns, new_rows)


# ---------------------------------------------------------------------------
# solving


def _nearest_leaf(tree: PCTree, label):
    """Closest other leaf in the tree (ties: smallest label); None if alone."""
    start = tree._node_of[label]
    frontier = [start]
    seen = {start}
    while frontier:
        nxt = []
        found = []
        for x in frontier:
            for y in tree._adj[x]:
                if y in seen:
                    continue
                seen.add(y)
                if tree._kind[y] == LEAF:
                    found.append(tree._label[y])
                else:
                    nxt.append(y)
        if found:
            return min(found)
        frontier = nxt
    return None


def solve(m: AmbMatrix, initial: PCTree | None = None) -> tuple[PCTree | NullTree, tuple]:
    """Sweep the rows through a PC-tree; return the final tree and a witness.

    The witness is a circular order of all columns satisfying every row (in
    the arc sense above).  Raises :class:`Infeasible` carrying the index of
    the first row whose constraint empties the family, and
    :class:`StaircaseViolation` if the matrix is not staircase.
    """
    validate_staircase(m)
    if initial is None:
        initial = new_star(m.columns) if m.columns else PCTree({}, {}, {}, {})
    tree: PCTree | NullTree = initial
    if not tree.is_null and tree.leaves != frozenset(m.columns):
        raise ValueError("initial tree leaves must match the matrix columns")

    alive = list(m.columns)
    deletion_log: list[tuple[object, object]] = []  # (column, anchor at deletion)
    for r, row in enumerate(m.rows):
        newly = [c for c in alive if m.entry(r, c) == STAR]
        for c in newly:
            anchor = _nearest_leaf(tree, c) if not tree.is_null else None
            deletion_log.append((c, anchor))
            tree = delete_leaf(tree, c)
        if newly:
            alive = [c for c in alive if m.entry(r, c) != STAR]
        ones = [c for c in alive if m.entry(r, c) == ONE]
        if ones and len(ones) < len(alive):
            tree = restrict_consecutive(tree, ones)
            if tree.is_null:
                raise Infeasible(r)
    witness = _reconstruct_witness(m, tree, deletion_log)
    return tree, witness


def _row_ok_among(m: AmbMatrix, circle: Sequence, star_row: dict, r: int) -> bool:
    flags = []
    for c in circle:
        if star_row.get(c, len(m.rows)) > r:
            flags.append(m.entry(r, c) == ONE)
    if not flags:
        return True
    boundaries = sum(
        1 for i in range(len(flags)) if flags[i] != flags[i - 1]
    )
    return boundaries <= 2


def _reconstruct_witness(
    m: AmbMatrix, tree: PCTree | NullTree, deletion_log: list
) -> tuple:
    star_row = m.star_rows()
    to_insert = list(reversed(deletion_log))

    def backtrack(circle: list, i: int):
        if i == len(to_insert):
            return circle
        col, anchor = to_insert[i]
        n = len(circle)
        if anchor is not None and anchor in circle:
            p = circle.index(anchor)
            preferred = [p + 1, p]
        else:
            preferred = []
        gaps = preferred + [g for g in range(n + 1) if g not in preferred]
        limit = star_row[col]
        for g in gaps:
            candidate = circle[:g] + [col] + circle[g:]
            if all(_row_ok_among(m, candidate, star_row, r) for r in range(limit)):
                result = backtrack(candidate, i + 1)
                if result is not None:
                    return result
        return None

    if tree.is_null:
        raise ValueError("cannot reconstruct a witness from the empty family")
    for base in enumerate_orders(tree):
        result = backtrack(list(base), 0)
        if result is not None:
            return tuple(result)
    if not tree.leaves:
        result = backtrack([], 0)
        if result is not None:
            return tuple(result)
    raise AssertionError("witness reconstruction exhausted all realizations")


def satisfying_orders(
    m: AmbMatrix, final_tree: PCTree | NullTree
) -> Iterator[tuple]:
    """Yield every circular order of all columns that satisfies every row.

    ``final_tree`` must be exactly the tree that :func:`solve` returned for
    ``m`` (with whatever seed the caller used).  Columns missing from that
    tree — the ones retired by an ambiguous entry mid-sweep — are threaded
    back in, in reverse retirement order, into every gap that keeps all rows
    before the column's retirement satisfied.  Insertion never happens ahead
    of the first element, so each circular order is produced exactly once,
    as a tuple anchored at the first leaf of the realization it extends.
    """
    if final_tree.is_null:
        return
    star_row = m.star_rows()
    col_pos = {c: k for k, c in enumerate(m.columns)}
    dead = sorted(
        (c for c in m.columns if c in star_row),
        key=lambda c: (star_row[c], col_pos[c]),
    )
    to_insert = list(reversed(dead))

    def backtrack(circle: list, i: int) -> Iterator[tuple]:
        if i == len(to_insert):
            yield tuple(circle)
            return
        col = to_insert[i]
        limit = star_row[col]
        gaps: Iterable[int] = range(1, len(circle) + 1) if circle else (0,)
        for g in gaps:
            candidate = circle[:g] + [col] + circle[g:]
            if all(_row_ok_among(m, candidate, star_row, r) for r in range(limit)):
                yield from backtrack(candidate, i + 1)

    if final_tree.leaves:
        for base in enumerate_orders(final_tree):
            yield from backtrack(list(base), 0)
    else:
        yield from backtrack([], 0)


# ---------------------------------------------------------------------------
# brute-force referee


def _order_satisfies(m: AmbMatrix, order: Sequence) -> bool:
    for r in range(len(m.rows)):
        flags = [m.entry(r, c) == ONE for c in order if m.entry(r, c) != STAR]
        if not flags:
            continue
        boundaries = sum(1 for i in range(len(flags)) if flags[i] != flags[i - 1])
        if boundaries > 2:
            return False
    return True


def brute_solve(m: AmbMatrix) -> tuple | None:
    """First circular order of all columns satisfying every row, or None.

    Exhaustive over (n-1)! anchored orders; refuses more than 9 columns.
    """
    import itertools

    n = len(m.columns)
    if n > 9:
        raise TooLarge(f"brute force supports at most 9 columns, got {n}")
    if n == 0:
        return ()
    first, rest = m.columns[0], m.columns[1:]
    for perm in itertools.permutations(rest):
        order = (first,) + perm
        if _order_satisfies(m, order):
            return order
    return None


def brute_orders(m: AmbMatrix) -> Iterator[tuple]:
    """All satisfying anchored circular orders (same bound as brute_solve)."""
    import itertools

    n = len(m.columns)
    if n > 9:
        raise TooLarge(f"brute force supports at most 9 columns, got {n}")
    if n == 0:
        yield ()
        return
    first, rest = m.columns[0], m.columns[1:]
    for perm in itertools.permutations(rest):
        order = (first,) + perm
        if _order_satisfies(m, order):
            yield order
