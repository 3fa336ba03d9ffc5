"""Knuth's matrix correspondence and the Bender-Knuth diagonal splitting.

Column-strict here means rows weakly decreasing and columns strictly
decreasing, so Knuth's row insertion runs with the order reversed: an
inserted value bumps the leftmost entry strictly smaller than itself.

The composite chain sends a matrix ``b`` to a plane partition of weight
``sum((j + k - 1) * b[j, k])`` whose conjugate trace is ``sum(b)``.  The
row index j of every unit ends up in the second tableau (whose largest
entry is the number of rows of the plane partition) and the column index
k in the first (whose largest entry is the largest part).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .partitions import (
    PartitionError,
    PlanePartition,
    conjugate_linear,
    row_conjugate_aspect,
    validate_plane_partition,
)


@dataclass(frozen=True)
class CorrespondenceMatrix:
    """Finitely supported non-negative integer matrix with 1-based indices."""

    items: tuple[tuple[tuple[int, int], int], ...] = ()

    @classmethod
    def from_dict(cls, entries: Mapping[tuple[int, int], int]) -> "CorrespondenceMatrix":
        clean = {}
        for (j, k), b in entries.items():
            if j < 1 or k < 1:
                raise ValueError(f"matrix indices are 1-based, got ({j},{k})")
            if b < 0:
                raise ValueError(f"negative entry at ({j},{k})")
            if b:
                clean[(j, k)] = b
        return cls(tuple(sorted(clean.items())))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "CorrespondenceMatrix":
        return cls.from_dict(
            {(j, k): b for j, row in enumerate(rows, 1) for k, b in enumerate(row, 1)}
        )

    @classmethod
    def from_json(cls, text: str) -> "CorrespondenceMatrix":
        return cls.from_rows(json.loads(text))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.items)

    def get(self, j: int, k: int) -> int:
        return self.as_dict().get((j, k), 0)

    @property
    def weight(self) -> int:
        return sum((j + k - 1) * b for (j, k), b in self.items)

    @property
    def total(self) -> int:
        return sum(b for _, b in self.items)

    def class_totals(self) -> dict[int, int]:
        """Sum of entries along each anti-diagonal ``w = j + k - 1``."""
        out: Counter = Counter()
        for (j, k), b in self.items:
            out[j + k - 1] += b
        return dict(sorted(out.items()))

    def to_rows(self) -> list[list[int]]:
        if not self.items:
            return []
        nr = max(j for (j, _), _ in self.items)
        nc = max(k for (_, k), _ in self.items)
        d = self.as_dict()
        return [[d.get((j, k), 0) for k in range(1, nc + 1)] for j in range(1, nr + 1)]

    def to_json(self) -> str:
        return json.dumps(self.to_rows(), separators=(",", ":"))


@dataclass(frozen=True)
class ColumnStrictPair:
    first: PlanePartition
    second: PlanePartition

    @property
    def shape(self) -> tuple[int, ...]:
        return self.first.shape

    @property
    def num_parts(self) -> int:
        return self.first.num_parts


def is_column_strict(w: PlanePartition) -> bool:
    for h in range(1, len(w.rows)):
        upper, lower = w.rows[h - 1], w.rows[h]
        if any(lower[j] >= upper[j] for j in range(len(lower))):
            return False
    return True


def validate_pair(p: ColumnStrictPair) -> None:
    for name, w in (("first", p.first), ("second", p.second)):
        validate_plane_partition(w.rows)
        if not is_column_strict(w):
            raise PartitionError(f"{name} tableau is not column strict")
    if p.first.shape != p.second.shape:
        raise PartitionError(f"shape mismatch: {p.first.shape} vs {p.second.shape}")


# --------------------------------------------------------------------------
# Knuth correspondence


def _insert(rows: list[list[int]], x: int) -> tuple[int, int]:
    """Row-insert ``x``; return the 0-based cell that was created."""
    i = 0
    while True:
        if i == len(rows):
            rows.append([x])
            return i, 0
        row = rows[i]
        for c, v in enumerate(row):
            if v < x:
                row[c], x = x, v
                break
        else:
            row.append(x)
            return i, len(row) - 1
        i += 1


def knuth_map(M: CorrespondenceMatrix) -> ColumnStrictPair:
    """Send a matrix to a pair of column-strict plane partitions of equal shape.

    Value k occurs in ``first`` as often as column k of ``M`` sums to, and
    value j occurs in ``second`` as often as row j sums to.
    """
    word = []
    for (j, k), b in sorted(M.items, reverse=True):
        word.extend([(j, k)] * b)
    P: list[list[int]] = []
    Q: list[list[int]] = []
    for j, k in word:
        i, c = _insert(P, k)
        if i == len(Q):
            Q.append([])
        assert c == len(Q[i])
        Q[i].append(j)
    return ColumnStrictPair(
        PlanePartition(tuple(map(tuple, P))), PlanePartition(tuple(map(tuple, Q)))
    )


def knuth_inverse(p: ColumnStrictPair) -> CorrespondenceMatrix:
    validate_pair(p)
    P = [list(r) for r in p.first.rows]
    Q = [list(r) for r in p.second.rows]
    counts: Counter = Counter()
    while Q:
        # the last unit inserted carries the smallest row label; among equal
        # labels it sits furthest right
        j = min(r[-1] for r in Q)
        i = max((i for i, r in enumerate(Q) if r[-1] == j), key=lambda i: len(Q[i]))
        Q[i].pop()
        x = P[i].pop()
        if not Q[i]:
            Q.pop(i)
            P.pop(i)
        for a in range(i - 1, -1, -1):
            row = P[a]
            c = max(c for c, v in enumerate(row) if v > x)
            row[c], x = x, row[c]
        counts[(j, x)] += 1
    return CorrespondenceMatrix.from_dict(counts)


# --------------------------------------------------------------------------
# Bender-Knuth correspondence


def bender_knuth_map(p: ColumnStrictPair, check: bool = True) -> PlanePartition:
    """Glue two column-strict tableaux of shape mu along a diagonal.

    The level sets ``{value > s}`` of ``first`` give the slices on and
    right of the main diagonal of an intermediate plane partition, those
    of ``second`` the slices left of it.  Row conjugation of that array
    returns a plane partition whose conjugate trace is ``|mu|``.
    """
    if check:
        validate_pair(p)
    if not p.first.rows:
        return PlanePartition()
    right = [conjugate_linear(r) for r in p.first.rows]
    below = [conjugate_linear(r) for r in p.second.rows]
    n_rows = p.second.rows[0][0]
    rows = []
    for a in range(n_rows):
        row = []
        for b in range(min(a, len(below))):
            col = below[b]
            if a - b >= len(col):
                break
            row.append(col[a - b])
        else:
            if a < len(right):
                row.extend(right[a])
        rows.append(tuple(row))
    aspect = PlanePartition(tuple(rows))
    if check:
        validate_plane_partition(aspect.rows)
    return row_conjugate_aspect(aspect)


def bender_knuth_inverse(w: PlanePartition) -> ColumnStrictPair:
    aspect = row_conjugate_aspect(w).rows
    first, second = [], []
    i = 0
    while i < len(aspect) and len(aspect[i]) > i:
        first.append(conjugate_linear(aspect[i][i:]))
        column = []
        for a in range(i, len(aspect)):
            if len(aspect[a]) <= i:
                break
            column.append(aspect[a][i])
        second.append(conjugate_linear(column))
        i += 1
    return ColumnStrictPair(PlanePartition(tuple(first)), PlanePartition(tuple(second)))


# --------------------------------------------------------------------------
# composite chain


def matrix_to_plane_partition(M: CorrespondenceMatrix) -> PlanePartition:
    return bender_knuth_map(knuth_map(M))


def plane_partition_to_matrix(w: PlanePartition) -> CorrespondenceMatrix:
    return knuth_inverse(bender_knuth_inverse(w))


def unit_size_counts(w: PlanePartition) -> dict[int, int]:
    """Number of units of each size w = j + k - 1 in the matrix of ``w``.

    These are the statistics whose joint generating function is the
    product of ``(1 - y_w x^w)^(-w)``; their total is the conjugate trace.
    """
    return plane_partition_to_matrix(w).class_totals()


def large_unit_count(w: PlanePartition, m: float) -> int:
    """Number of units of size strictly above ``m``."""
    return sum(c for size, c in unit_size_counts(w).items() if size > m)


def row_label_counts(w: PlanePartition) -> dict[int, int]:
    """How often each label j occurs in the second tableau of ``w``."""
    return dict(sorted(Counter(v for _, _, v in bender_knuth_inverse(w).second.cells()).items()))
