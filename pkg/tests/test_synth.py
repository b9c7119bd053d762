import pytest

from worlds import corpus
from sensorsynth import (
    ACTION,
    OBSERVATION,
    ConstraintSpec,
    Cover,
    NotASolutionError,
    PGraph,
    PlanningProblem,
    ResourceError,
    build_tree,
    covering_combinations,
    extract_plan,
    oracle,
    solves,
    synthesize,
)
from sensorsynth.workspace.scenarios import builtin_scenario


def F(*xs):
    return frozenset(xs)


def test_covering_combinations_examples():
    combos = covering_combinations([F("a"), F("b"), F("a", "b")], F("a", "b"))
    assert {frozenset(c) for c in combos} == {
        F(F("a"), F("b")),
        F(F("a", "b")),
        F(F("a"), F("a", "b")),
        F(F("b"), F("a", "b")),
        F(F("a"), F("b"), F("a", "b")),
    }
    assert covering_combinations([F("a")], F("a")) == [(F("a"),)]
    assert covering_combinations([F("a")], F("a", "b")) == []


def test_covering_combinations_minimal_only():
    combos = covering_combinations([F("a"), F("b"), F("a", "b")], F("a", "b"), minimal_only=True)
    assert {frozenset(c) for c in combos} == {F(F("a"), F("b")), F(F("a", "b"))}


def test_goal_at_root_needs_no_sensing():
    g = PGraph({"a": ACTION, "o": OBSERVATION}, [("a", "o", {"u"})], ["a"], ["u"], [])
    problem = PlanningProblem(g, ["a"])
    sol = synthesize(build_tree(problem))
    assert sol.no_sensing_required
    assert sol.root_covers == [Cover()]
    plan = extract_plan(sol, Cover())
    assert len(plan.graph.vertices) == 1 and plan.termination == {0}
    assert solves(plan, problem, Cover())


def test_unsolvable_problem_has_no_covers():
    g = PGraph({"a": ACTION, "o": OBSERVATION, "z": OBSERVATION}, [("a", "o", {"u"})], ["a"], ["u"])
    problem = PlanningProblem(g, ["z"])
    sol = synthesize(build_tree(problem))
    assert sol.root_covers == [] and sol.count() == 0
    with pytest.raises(NotASolutionError):
        extract_plan(sol, Cover([["y"]]))


def test_corridor_every_sensor_works():
    problem, spec = builtin_scenario("corridor")
    sol = synthesize(build_tree(problem, spec), spec)
    assert set(sol.closure()) == set(oracle(problem))
    assert sol.count() == 109


def test_compaction_neutral_on_corpus():
    for problem in corpus(21, 40):
        tree = build_tree(problem)
        a = set(synthesize(tree).closure())
        b = set(synthesize(tree, compact=False).closure())
        assert a == b


def test_root_list_is_an_antichain_per_domain():
    for problem in corpus(4, 60):
        covers = synthesize(build_tree(problem)).root_covers
        for c in covers:
            assert not any(c < o and c.domain == o.domain for o in covers)


def test_count_matches_enumeration_on_small_track():
    problem, spec = builtin_scenario("track-cyclic", segments=4)
    sol = synthesize(build_tree(problem, spec), spec)
    assert sol.count() == sum(1 for _ in sol.closure()) == 25453


def test_global_constraints_filter_closure():
    problem, spec = builtin_scenario("track-cyclic", segments=4)
    sol = synthesize(build_tree(problem, spec), spec)
    part = ConstraintSpec(contiguous=True, neighbor=spec.neighbor, partition=True)
    covers = list(sol.closure(part))
    assert covers and all(sum(len(b) for b in c.blocks) == len(c.domain) for c in covers)
    assert sol.count(part) == len(covers)


def test_extract_plan_accepts_subcovers_and_rejects_others():
    problem, spec = builtin_scenario("grid-office")
    sol = synthesize(build_tree(problem, spec), spec)
    gps = Cover([[y] for y in problem.world.observations])
    assert solves(extract_plan(sol, gps), problem, gps)
    blind = Cover([problem.world.observations])
    assert not sol.contains(blind)
    with pytest.raises(NotASolutionError):
        extract_plan(sol, blind)


def test_plans_visit_each_belief_once():
    problem, spec = builtin_scenario("grid-office")
    sol = synthesize(build_tree(problem, spec), spec)
    for c in sol.root_covers:
        plan = extract_plan(sol, c)
        stack = [(v, (plan.beliefs[v],)) for v in plan.graph.initial]
        while stack:
            v, seen = stack.pop()
            for e in plan.graph.out_edges(v):
                b = plan.beliefs[e.target]
                assert b not in seen
                stack.append((e.target, seen + (b,)))


def test_cover_list_budget():
    problem, spec = builtin_scenario("track-cyclic", segments=4)
    with pytest.raises(ResourceError) as exc:
        synthesize(build_tree(problem, spec), spec, max_covers=1)
    assert exc.value.cap == "max_cover_list"


def test_readiness_of_witness_combinations():
    for problem in corpus(8, 40):
        sol = synthesize(build_tree(problem))
        for (vid, _), w in sol.witness.items():
            if w[0] == "observation":
                vertex = sol.tree.vertices[vid]
                assert frozenset().union(*(g for g, _, _ in w[1])) == vertex.events


def test_closure_counters_agree_with_enumeration():
    from sensorsynth import synth as S

    for problem in corpus(31, 80):
        sol = synthesize(build_tree(problem))
        maxima, full = sol.full_maxima_masks(), sol.index.full
        n = sum(1 for _ in sol.closure())
        assert S._count_union_ie(maxima, full) == S._count_union_dp(maxima, full) == n == sol.count()


def test_grid_office_count_is_cheap(monkeypatch):
    from sensorsynth import synth as S

    problem, spec = builtin_scenario("grid-office")
    sol = synthesize(build_tree(problem, spec), spec)
    assert sol.count() > 10**100
    monkeypatch.setattr(S, "MAX_COUNT_STATES", 1000)
    with pytest.raises(ResourceError) as exc:
        S._count_union_dp(sol.full_maxima_masks(), sol.index.full)
    assert exc.value.cap == "max_count_states"
