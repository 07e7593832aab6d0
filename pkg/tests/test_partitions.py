import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigbethe.partitions import (
    InfeasiblePartition,
    Split,
    count_splits,
    enumerate_partitions,
    is_feasible,
    split_set,
)


def test_split_set_small():
    out = list(split_set("abc", {"I": 1}))
    assert [s.I for s in out] == [("a",), ("b",), ("c",)]
    assert [s.II for s in out] == [("b", "c"), ("a", "c"), ("a", "b")]
    assert all(s.III == () for s in out)


def test_split_set_three_way_is_disjoint_cover():
    items = tuple(range(5))
    for s in split_set(items, {"I": 2, "III": 1}):
        assert sorted(s.I + s.II + s.III) == list(items)
        assert len(s.I) == 2 and len(s.III) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(0, 3), st.integers(0, 3))
def test_count_matches_enumeration(n, a, b):
    sizes = {"I": a, "III": b}
    got = sum(1 for _ in split_set(range(n), sizes)) if a + b <= n else 0
    assert got == (count_splits(n, sizes) if a + b <= n else 0)


def test_enumerate_product_over_colors():
    sets = {1: "ab", 2: "xyz"}
    cons = {1: {"I": 1}, 2: {"III": 2}}
    parts = list(enumerate_partitions(sets, cons))
    assert len(parts) == 2 * 3
    assert {(p[1].I, p[2].II) for p in parts} == set(itertools.product([("a",), ("b",)], [("z",), ("y",), ("x",)]))


def test_enumerate_keeps_fixed_boundaries():
    parts = list(enumerate_partitions({1: "ab"}, {1: {"I": 1}}, fixed={0: Split(I=("z",))}))
    assert all(p[0].I == ("z",) for p in parts)


def test_infeasible():
    assert not is_feasible({1: "a"}, {1: {"I": 1, "III": 1}})
    with pytest.raises(InfeasiblePartition):
        list(enumerate_partitions({1: "a"}, {1: {"I": 1, "III": 1}}))


def test_as_dict():
    assert Split(I=(1,), II=(2, 3)).as_dict() == {"I": [1], "II": [2, 3], "III": []}
