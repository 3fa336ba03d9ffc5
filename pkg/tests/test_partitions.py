from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import linear_partitions, plane_partitions
from pplab.partitions import (
    EMPTY,
    PartitionError,
    PlanePartition,
    conjugate_linear,
    conjugate_trace,
    count_plane_partitions,
    enumerate_linear_partitions,
    enumerate_plane_partitions,
    enumerate_restricted,
    from_json,
    part_counts,
    plane_partition_at,
    row_conjugate_aspect,
    trace,
    validate_plane_partition,
    x_statistic,
)

EXAMPLE = [[5, 4, 1, 1], [3, 2, 1], [2, 1, 0]]


@pytest.fixture
def ex():
    return validate_plane_partition(EXAMPLE)


def test_conjugate_linear():
    assert conjugate_linear((5, 4, 3, 3, 2, 2, 2, 1)) == (8, 7, 4, 2, 1)
    assert conjugate_linear((1,)) == (1,)
    assert conjugate_linear((3,)) == (1, 1, 1)
    assert conjugate_linear(()) == ()


def test_example_shape(ex):
    assert ex.weight == 20
    assert ex.num_rows == 3
    assert ex.num_parts == 9
    assert ex.rows == ((5, 4, 1, 1), (3, 2, 1), (2, 1))
    assert ex.entry(2, 3) == 1 and ex.entry(3, 3) == 0


def test_example_statistics(ex):
    assert conjugate_trace(ex) == 6
    # the diagonal is (5, 2); row 3 has no third entry
    assert trace(ex) == 7
    aspect = row_conjugate_aspect(ex)
    assert aspect.rows == ((4, 2, 2, 2, 1), (3, 2, 1), (2, 1))
    assert trace(aspect) == 6
    assert part_counts(ex) == {1: 2, 2: 1, 3: 1, 4: 1, 5: 1}
    assert sum(part_counts(ex).values()) == 6
    assert [x_statistic(ex, m) for m in range(4)] == [6, 4, 3, 2]
    assert x_statistic(ex, 5) == 0


def test_small_statistics():
    row = validate_plane_partition([[2, 2]])
    assert part_counts(row) == {2: 2}
    assert conjugate_trace(validate_plane_partition([[3, 2, 2, 1]])) == 4
    assert conjugate_trace(validate_plane_partition([[1]] * 5)) == 1
    assert trace(validate_plane_partition([[7]])) == 7
    assert row_conjugate_aspect(validate_plane_partition([[3]])).rows == ((1, 1, 1),)


def test_validation_errors():
    with pytest.raises(PartitionError) as e:
        validate_plane_partition([[1, 2]])
    assert e.value.position == (1, 2)
    with pytest.raises(PartitionError) as e:
        validate_plane_partition([[2, 1], [1, 2]])
    assert e.value.position == (2, 2)
    with pytest.raises(PartitionError) as e:
        validate_plane_partition([[1], [3]])
    assert e.value.position == (2, 1)
    with pytest.raises(PartitionError):
        validate_plane_partition([[1, -1]])
    with pytest.raises(PartitionError):
        validate_plane_partition([[1.5]])
    assert validate_plane_partition([]) == EMPTY
    assert validate_plane_partition([[0, 0], [0]]) == EMPTY


def test_serialization(ex):
    assert ex.to_json() == "[[5,4,1,1],[3,2,1],[2,1]]"
    assert from_json(ex.to_json()) == ex
    assert ex.to_text().splitlines() == ["5 4 1 1", "3 2 1", "2 1"]


def test_enumeration_counts():
    assert list(enumerate_plane_partitions(0)) == [EMPTY]
    assert count_plane_partitions(2) == 3
    assert count_plane_partitions(6) == 48


def test_enumeration_matches_independent_generator():
    for n in range(9):
        ours = list(enumerate_plane_partitions(n))
        theirs = {PlanePartition(w) for w in plane_partitions(n)}
        assert len(ours) == len(set(ours)) == len(theirs)
        assert set(ours) == theirs


def test_enumeration_order_is_canonical():
    parts = list(enumerate_plane_partitions(7))
    keys = [(w.shape, w.rows) for w in parts]
    assert keys == sorted(keys)
    assert plane_partition_at(7, 5) == parts[5]


def test_enumeration_cap():
    with pytest.raises(ValueError):
        list(enumerate_plane_partitions(10_000))


def test_restricted():
    assert [w.rows for w in enumerate_restricted(2, 1, 1)] == [((1, 1),)]
    assert {w.rows for w in enumerate_restricted(3, 1, 3)} == {((3,),), ((2, 1),), ((1, 1, 1),)}
    assert set(enumerate_restricted(5, 5, 5)) == set(enumerate_plane_partitions(5))
    for w in enumerate_restricted(8, 2, 3):
        assert w.num_rows <= 2 and w.largest_part <= 3


def test_linear_enumeration():
    for n in range(16):
        assert list(enumerate_linear_partitions(n)) == sorted(linear_partitions(n), reverse=True)
    assert list(enumerate_linear_partitions(5, max_part=2)) == [(2, 2, 1), (2, 1, 1, 1), (1, 1, 1, 1, 1)]


def test_trace_identity_on_enumeration():
    for n in range(11):
        ws = list(enumerate_plane_partitions(n))
        for w in ws:
            assert trace(row_conjugate_aspect(w)) == conjugate_trace(w)
        assert Counter(map(trace, ws)) == Counter(map(conjugate_trace, ws))


plane = st.integers(0, 9).flatmap(lambda n: st.sampled_from(list(enumerate_plane_partitions(n))))


@settings(max_examples=150, deadline=None)
@given(w=plane)
def test_aspect_is_weight_preserving_involution(w):
    a = row_conjugate_aspect(w)
    assert a.weight == w.weight and a.num_rows == w.num_rows
    assert row_conjugate_aspect(a) == w
    validate_plane_partition(a.rows)


@settings(max_examples=150, deadline=None)
@given(w=plane, m1=st.floats(0, 10), m2=st.floats(0, 10))
def test_x_statistic_properties(w, m1, m2):
    assert x_statistic(w, m1) == sum(c for k, c in part_counts(w).items() if k > m1)
    lo, hi = sorted((m1, m2))
    assert x_statistic(w, hi) <= x_statistic(w, lo)


@settings(max_examples=100)
@given(parts=st.lists(st.integers(1, 12), max_size=12).map(lambda l: tuple(sorted(l, reverse=True))))
def test_conjugate_linear_involution(parts):
    c = conjugate_linear(parts)
    assert conjugate_linear(c) == parts
    assert sum(c) == sum(parts)
