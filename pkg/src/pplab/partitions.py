"""Linear and plane partitions, their statistics, and exhaustive enumeration.

A plane partition is stored as a tuple of rows, each row a tuple of
positive integers; zeros are never stored.  Rows and columns are
weakly decreasing.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

ENUMERATION_CAP = 24


class PartitionError(ValueError):
    """Raised for malformed partitions; ``position`` is the 1-based (h, j)."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        super().__init__(message)
        self.position = position


def conjugate_linear(parts: Sequence[int]) -> tuple[int, ...]:
    """Transpose the Ferrers diagram of a weakly decreasing sequence."""
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p >= j) for j in range(1, parts[0] + 1))


def is_linear_partition(parts: Sequence[int]) -> bool:
    return all(p > 0 for p in parts) and all(
        parts[i] >= parts[i + 1] for i in range(len(parts) - 1)
    )


@dataclass(frozen=True)
class PlanePartition:
    rows: tuple[tuple[int, ...], ...] = ()

    @property
    def weight(self) -> int:
        return sum(sum(r) for r in self.rows)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def largest_part(self) -> int:
        return self.rows[0][0] if self.rows else 0

    @property
    def num_parts(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    def entry(self, h: int, j: int) -> int:
        """1-based entry, zero outside the support."""
        if 1 <= h <= len(self.rows) and 1 <= j <= len(self.rows[h - 1]):
            return self.rows[h - 1][j - 1]
        return 0

    def cells(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(h, j, value)`` for every part, 1-based."""
        for h, row in enumerate(self.rows, 1):
            for j, v in enumerate(row, 1):
                yield h, j, v

    def to_json(self) -> str:
        return json.dumps([list(r) for r in self.rows], separators=(",", ":"))

    def to_text(self) -> str:
        if not self.rows:
            return ""
        width = len(str(self.largest_part))
        return "\n".join(" ".join(str(v).rjust(width) for v in row) for row in self.rows)

    def __str__(self) -> str:
        return self.to_text()


EMPTY = PlanePartition()


def validate_plane_partition(rows: Iterable[Iterable[int]]) -> PlanePartition:
    """Check monotonicity and strip zeros.

    Raises :class:`PartitionError` naming the first offending (h, j).
    """
    raw = [list(r) for r in rows]
    for h, row in enumerate(raw, 1):
        for j, v in enumerate(row, 1):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise PartitionError(f"entry ({h},{j}) is not a non-negative integer", (h, j))
    width = max((len(r) for r in raw), default=0)
    grid = [r + [0] * (width - len(r)) for r in raw]
    for h, row in enumerate(grid, 1):
        for j in range(1, width + 1):
            v = row[j - 1]
            if j < width and row[j] > v:
                raise PartitionError(
                    f"row order violated at ({h},{j + 1}): {row[j]} > {v}", (h, j + 1)
                )
            if h < len(grid) and grid[h][j - 1] > v:
                raise PartitionError(
                    f"column order violated at ({h + 1},{j}): {grid[h][j - 1]} > {v}",
                    (h + 1, j),
                )
    stripped = tuple(tuple(v for v in row if v > 0) for row in grid)
    return PlanePartition(tuple(r for r in stripped if r))


def from_json(text: str) -> PlanePartition:
    return validate_plane_partition(json.loads(text))


def conjugate_trace(w: PlanePartition) -> int:
    return sum(1 for h, _, v in w.cells() if v >= h)


def trace(w: PlanePartition) -> int:
    return sum(row[h] for h, row in enumerate(w.rows) if len(row) > h)


def row_conjugate_aspect(w: PlanePartition) -> PlanePartition:
    """Replace every row by its conjugate linear partition.

    Row h of ``w`` dominates row h+1 entrywise, i.e. the Ferrers diagrams
    are nested, and conjugation preserves nesting, so the result is again
    a plane partition with the same weight and number of rows.
    """
    return PlanePartition(tuple(conjugate_linear(r) for r in w.rows))


def part_counts(w: PlanePartition) -> dict[int, int]:
    """Map k to the number of parts equal to k lying in a row h <= k."""
    return dict(sorted(Counter(v for h, _, v in w.cells() if v >= h).items()))


def x_statistic(w: PlanePartition, m: float) -> int:
    """Number of parts with value >= row index and value strictly above ``m``."""
    return sum(1 for h, _, v in w.cells() if v >= h and v > m)


# --------------------------------------------------------------------------
# enumeration


def _rows_under(total: int, bound: tuple[int, ...] | None, cap: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing rows summing to ``total`` dominated by ``bound``.

    ``bound=None`` means no row above; entries are then capped by ``cap``.
    """
    limits = bound if bound is not None else (cap,) * total

    def rec(i: int, left: int, prev: int) -> Iterator[tuple[int, ...]]:
        if left == 0:
            yield ()
            return
        if i >= len(limits):
            return
        hi = min(prev, limits[i], left)
        for v in range(hi, 0, -1):
            for rest in rec(i + 1, left - v, v):
                yield (v,) + rest

    yield from rec(0, total, cap)


def _generate(n: int, max_rows: int, max_part: int) -> Iterator[PlanePartition]:
    def rec(left: int, above: tuple[int, ...] | None, depth: int) -> Iterator[tuple]:
        if left == 0:
            yield ()
            return
        if depth >= max_rows:
            return
        top = left if above is None else min(left, sum(above))
        for s in range(top, 0, -1):
            for row in _rows_under(s, above, max_part):
                for rest in rec(left - s, row, depth + 1):
                    yield (row,) + rest

    for rows in rec(n, None, 0):
        yield PlanePartition(rows)


def _canonical_key(w: PlanePartition):
    return (w.shape, w.rows)


def _check_cap(n: int) -> None:
    if n < 0:
        raise ValueError("weight must be non-negative")
    if n > ENUMERATION_CAP:
        raise ValueError(f"exhaustive enumeration is capped at n={ENUMERATION_CAP}, got {n}")


@lru_cache(maxsize=None)
def _all_plane_partitions(n: int) -> tuple[PlanePartition, ...]:
    return tuple(sorted(_generate(n, n, n), key=_canonical_key))


def enumerate_plane_partitions(n: int) -> Iterator[PlanePartition]:
    """Yield every plane partition of ``n`` once.

    Order is lexicographic by shape (tuple of row lengths), then by the
    row entries.
    """
    _check_cap(n)
    return iter(_all_plane_partitions(n))


def plane_partition_at(n: int, index: int) -> PlanePartition:
    _check_cap(n)
    return _all_plane_partitions(n)[index]


def count_plane_partitions(n: int) -> int:
    _check_cap(n)
    return len(_all_plane_partitions(n))


def enumerate_restricted(n: int, r: int, l: int) -> Iterator[PlanePartition]:
    """Plane partitions of ``n`` with at most ``r`` rows and parts at most ``l``."""
    _check_cap(n)
    if r < 1 or l < 1:
        raise ValueError("r and l must be positive")
    return iter(sorted(_generate(n, r, l), key=_canonical_key))


def enumerate_linear_partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Linear partitions of ``n`` in reverse lexicographic order."""
    if n < 0:
        raise ValueError("weight must be non-negative")

    def rec(left: int, hi: int) -> Iterator[tuple[int, ...]]:
        if left == 0:
            yield ()
            return
        for p in range(min(left, hi), 0, -1):
            for rest in rec(left - p, p):
                yield (p,) + rest

    yield from rec(n, n if max_part is None else max_part)
