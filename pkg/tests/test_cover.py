import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_covers, intersection_by_definition, maximal_filter
from sensorsynth import Cover, CoverError, ResourceError
from sensorsynth.cover import (
    EPSILON_COVER,
    canonical,
    compatible,
    from_sensor_map,
    intersect,
    intersect_lists,
    intersect_upper,
    project,
    to_sensor_map,
    upper_covers,
)

SYMBOLS = ["a", "b", "c", "d", "e"]


def C(*blocks):
    return Cover(blocks)


blocks_st = st.frozensets(st.sampled_from(SYMBOLS[:3]), min_size=1)
covers_st = st.frozensets(blocks_st, min_size=1, max_size=5).map(Cover)


def test_cover_rejects_empty_block():
    with pytest.raises(CoverError):
        Cover([[]])


def test_canonical_block_order():
    assert C({"b", "c"}, {"c"}, {"a"}).indexed() == (frozenset("a"), frozenset("c"), frozenset("bc"))


def test_project_examples():
    assert project(C({"a", "b"}, {"b", "c"}), {"a", "b"}) == C({"a", "b"}, {"b"})
    c = C({"a", "b"}, {"b", "c"})
    assert project(c, c.domain) == c
    assert project(C({"a"}, {"b"}), {"a"}) == C({"a"})


def test_intersect_disjoint_singletons_gives_five():
    got = intersect(C({"a"}), C({"b"}))
    expected = [C({"a"}, {"b"}), C({"a", "b"}), C({"a"}, {"a", "b"}), C({"b"}, {"a", "b"}), C({"a"}, {"b"}, {"a", "b"})]
    assert set(got) == set(expected)
    assert len(got) == 5


def test_intersect_incompatible():
    assert intersect(C({"a", "b"}), C({"a"}, {"b"})) == []
    assert not compatible(C({"a", "b"}), C({"a"}, {"b"}))


def test_epsilon_is_identity():
    c1 = C({"a"}, {"a", "b"})
    assert intersect(c1, EPSILON_COVER) == [c1]
    assert intersect(EPSILON_COVER, c1) == [c1]


def test_intersect_lists_examples():
    assert set(intersect_lists([C({"a"})], [C({"b"})])) == set(intersect(C({"a"}), C({"b"})))
    assert intersect_lists([], [C({"b"})]) == []


def test_intersect_budget():
    with pytest.raises(ResourceError):
        intersect(C({"a"}), C({"b"}), budget=2)


def test_upper_covers_examples():
    assert upper_covers([C({"a"}, {"b"}), C({"a"}, {"b"}, {"a", "b"})]) == [C({"a"}, {"b"}, {"a", "b"})]
    assert set(upper_covers([C({"a"}), C({"b"})])) == {C({"a"}), C({"b"})}


def test_upper_covers_matches_pairwise_scan():
    rng = random.Random(3)
    pool = [Cover(c) for c in all_covers("abc")] + [Cover(c) for c in all_covers("ab")]
    for _ in range(50):
        sample = rng.sample(pool, 20)
        expected = {Cover(c) for c in maximal_filter([c.blocks for c in sample])}
        assert set(upper_covers(sample)) == expected


def test_sensor_map_examples():
    assert from_sensor_map({"y1": {"x1"}, "y2": {"x1"}}) == C({"y1", "y2"})
    assert from_sensor_map({"y1": {"x1", "x2"}, "y2": {"x2", "x3"}}) == C({"y1"}, {"y1", "y2"}, {"y2"})
    assert from_sensor_map({"y1": {"x1", "x2"}, "y2": {"x1", "x2"}}) == C({"y1", "y2"})
    assert to_sensor_map(C({"y1"}, {"y1", "y2"})) == {"y1": {1, 2}, "y2": {2}}
    assert to_sensor_map(C({"a"}, {"b"})) == {"a": {1}, "b": {2}}
    with pytest.raises(CoverError):
        from_sensor_map({"y": set()})


@given(covers_st, covers_st)
@settings(max_examples=150, deadline=None)
def test_intersect_matches_definition(c1, c2):
    expected = {Cover(c) for c in intersection_by_definition(c1.blocks, c2.blocks)}
    assert set(intersect(c1, c2)) == expected


@given(covers_st, covers_st)
@settings(max_examples=150, deadline=None)
def test_intersect_upper_is_the_maximum(c1, c2):
    full = intersect(c1, c2)
    top = intersect_upper(c1, c2)
    if not full:
        assert top is None
    else:
        assert top in full and all(c <= top for c in full)


@given(covers_st, covers_st)
@settings(max_examples=100, deadline=None)
def test_intersect_commutes(c1, c2):
    assert set(intersect(c1, c2)) == set(intersect(c2, c1))


@given(st.frozensets(st.frozensets(st.sampled_from(SYMBOLS), min_size=1), min_size=1, max_size=8).map(Cover))
def test_sensor_map_round_trip(c):
    assert from_sensor_map(to_sensor_map(c)) == c


def test_canonical_dedupes_and_sorts():
    cs = [C({"a", "b"}), C({"a"}), C({"a"})]
    assert canonical(cs) == [C({"a"}), C({"a", "b"})]
