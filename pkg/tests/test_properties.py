import random
from itertools import combinations

import pytest

from oracles import largest_contiguous_cover, nonempty_subsets
from sensorsynth import ConstraintSpec, Cover, InputError, NeighborRelation, SpecificationError, check, discretize_partition
from sensorsynth.properties import block_traces, generate_blocks
from sensorsynth.workspace.scenarios import track_observations


def test_partition_check_and_witness():
    assert check(Cover([["a"], ["b", "c"]]), ConstraintSpec(partition=True)).ok
    r = check(Cover([["a", "b"], ["b", "c"]]), ConstraintSpec(partition=True))
    assert not r.ok
    assert set(r["partition"].witness) == {frozenset("ab"), frozenset("bc")}


def test_track_example_cover_properties():
    nb = NeighborRelation.circular(track_observations(6))
    c = Cover([["o2", "o3", "o4", "o5"], ["o5", "o"], ["o", "o6", "o1"]])
    r = check(c, ConstraintSpec(contiguous=True, neighbor=nb, overlapping=1, outputting=3))
    assert r.ok, r.failures()


def test_chain_contiguity_and_width():
    nb = NeighborRelation.chain("abc")
    assert not check(Cover([["a", "c"], ["b"]]), ConstraintSpec(contiguous=True, neighbor=nb)).ok
    assert check(Cover([["a", "b"], ["b", "c"]]), ConstraintSpec(wide=2)).ok
    assert not check(Cover([["a"], ["b", "c"]]), ConstraintSpec(wide=2)).ok
    assert check(Cover([["a"], ["b", "c"]]), ConstraintSpec(wide=2, max_width=True)).ok


def test_contiguity_needs_neighbors():
    with pytest.raises(SpecificationError):
        check(Cover([["a"]]), ConstraintSpec(contiguous=True))


def test_bad_k_rejected():
    with pytest.raises(SpecificationError):
        ConstraintSpec(overlapping=0)


def test_generate_blocks():
    nb = NeighborRelation.chain("abc")
    got = set(generate_blocks("abc", ConstraintSpec(contiguous=True, neighbor=nb)))
    assert got == {frozenset(s) for s in ["a", "b", "c", "ab", "bc", "abc"]}
    assert set(generate_blocks("abc", ConstraintSpec(wide=1))) == {frozenset(s) for s in "abc"}
    assert len(generate_blocks("abcd")) == 15


def test_block_traces_restrict_admissible_blocks():
    nb = NeighborRelation.chain("abc")
    spec = ConstraintSpec(contiguous=True, neighbor=nb)
    assert block_traces({"a", "c"}, spec, frozenset("abc")) == {frozenset("a"), frozenset("c"), frozenset("ac")}
    assert block_traces({"a", "c"}, ConstraintSpec(wide=1), frozenset("abc")) == {frozenset("a"), frozenset("c")}


def test_contiguity_matches_inductive_closure_small():
    symbols = list("abcd")
    pairs = list(combinations(symbols, 2))
    for mask in range(1 << len(pairs)):
        chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
        nb = NeighborRelation(chosen, carrier=symbols)
        closure = largest_contiguous_cover(symbols, chosen)
        for b in nonempty_subsets(symbols):
            assert nb.connected(b) == (b in closure)


def test_discretize_examples():
    c = discretize_partition([0, 1.5, 2], [(0, 1), (1, 2)])
    assert c == Cover([["c1", "c2"], ["c2"]])
    assert check(c, ConstraintSpec(overlapping=1)).ok
    aligned = discretize_partition([0, 1, 2], [(0, 1), (1, 2)])
    assert check(aligned, ConstraintSpec(partition=True)).ok


@pytest.mark.parametrize(
    "bounds, cells",
    [([0], [(0, 1)]), ([0, 1], []), ([0, 2], [(0, 1)]), ([0, 2], [(0, 1), (1.5, 2)]), ([1, 0], [(0, 1)])],
)
def test_discretize_rejects_bad_input(bounds, cells):
    with pytest.raises(InputError):
        discretize_partition(bounds, cells)


def test_discretize_random_is_one_overlapping():
    rng = random.Random(11)
    for _ in range(200):
        cuts = sorted(rng.sample(range(1, 40), rng.randint(1, 6)))
        cells = list(zip([0] + cuts, cuts + [40]))
        bounds = [0] + sorted(rng.sample(range(1, 40), rng.randint(0, 5))) + [40]
        c = discretize_partition(bounds, cells)
        assert check(c, ConstraintSpec(overlapping=1)).ok


def test_neighbor_pairs_sorted_and_symmetric():
    nb = NeighborRelation([("b", "a"), (2, 1)])
    assert nb.pairs() == [(1, 2), ("a", "b")]
    assert nb.related("a", "b") and nb.related("b", "a") and nb.related("a", "a")
