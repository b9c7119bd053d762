import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sensorsynth import StipulationError
from sensorsynth.stipulation import (
    FALSE,
    TRUE,
    And,
    Contains,
    DisjointFrom,
    Not,
    Or,
    SizeAtMost,
    SubsetOf,
    evaluate,
    parse,
    to_text,
)


def test_examples():
    f = parse("disjoint-from(secret)")
    assert f({"a", "b"}) and not f({"a", "secret"})
    g = parse("size-at-most(1)")
    assert g({"a"}) and not g({"a", "b"})
    assert not parse("not(subset-of(a))")({"a"})


def test_nested_parse_and_text_round_trip():
    text = "and(or(contains(a), size-at-most(2)), not(disjoint-from(b, c)), true)"
    f = parse(text)
    assert parse(to_text(f)) == f


def test_states_resolve_to_world_ids():
    f = parse("contains(3)", states=[1, 2, 3])
    assert f({3}) and not f({"3"})


@pytest.mark.parametrize(
    "text",
    ["", "contains(", "contains(a, b)", "not(true, false)", "size-at-most(x)", "foo(a)", "true false", "and()"],
)
def test_parse_errors(text):
    with pytest.raises(StipulationError):
        parse(text)


def test_unknown_state_rejected_at_parse_time():
    with pytest.raises(StipulationError):
        parse("contains(z)", states=["a", "b"])


STATES = ["a", "b", "c", "d"]


def formulas(depth=3):
    atoms = st.one_of(
        st.just(TRUE),
        st.just(FALSE),
        st.sampled_from(STATES).map(Contains),
        st.frozensets(st.sampled_from(STATES), min_size=1).map(SubsetOf),
        st.frozensets(st.sampled_from(STATES), min_size=1).map(DisjointFrom),
        st.integers(0, 4).map(SizeAtMost),
    )
    return st.recursive(
        atoms,
        lambda inner: st.one_of(
            inner.map(Not),
            st.lists(inner, min_size=1, max_size=3).map(lambda xs: And(tuple(xs))),
            st.lists(inner, min_size=1, max_size=3).map(lambda xs: Or(tuple(xs))),
        ),
        max_leaves=8,
    )


beliefs = st.frozensets(st.sampled_from(STATES))


@given(formulas(), formulas(), beliefs)
def test_de_morgan(f, g, b):
    assert evaluate(Not(And((f, g))), b) == evaluate(Or((Not(f), Not(g))), b)
    assert evaluate(Not(Or((f, g))), b) == evaluate(And((Not(f), Not(g))), b)


@given(formulas(), beliefs)
def test_text_round_trip_preserves_meaning(f, b):
    assert parse(to_text(f))(b) == f(b)


def test_operators_build_formulas():
    f = Contains("a") & ~Contains("b") | SizeAtMost(0)
    rng = random.Random(0)
    for _ in range(20):
        b = frozenset(rng.sample(STATES, rng.randint(0, 4)))
        assert f(b) == (("a" in b and "b" not in b) or not b)
