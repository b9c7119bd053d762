import json

import pytest

from sensorsynth import Cover, build_tree, extract_plan, synthesize
from sensorsynth.workspace import export, io
from sensorsynth.workspace.cli import main
from sensorsynth.workspace.scenarios import SCENARIOS, builtin_scenario
from sensorsynth.errors import InputError

MINIMAL = """{
  "schema": "sensorsynth/problem",
  "version": 1,
  "world": {
    "vertices": [{"id": "a", "kind": "action"}, {"id": "o", "kind": "observation"}],
    "edges": [{"from": "a", "to": "o", "labels": ["u"]}],
    "initial": ["a"],
    "actions": ["u"],
    "observations": ["y"]
  },
  "goal": ["o"]
}
"""


def diag_codes(text):
    with pytest.raises(io.ProblemFileError) as exc:
        io.parse_problem(text)
    return [d.code for d in exc.value.diagnostics], exc.value.diagnostics


def test_minimal_problem_parses():
    pf = io.parse_problem(MINIMAL.encode())
    assert pf.problem.goal == {"o"}
    assert pf.stipulation is None and pf.budgets == {}


def test_empty_label_set_diagnostic_has_line():
    codes, diags = diag_codes(MINIMAL.replace('"labels": ["u"]', '"labels": []'))
    assert codes == ["empty-label-set"]
    assert diags[0].message == "empty label set"
    assert diags[0].line == 6 and diags[0].path == "world.edges[0].labels"


def test_unknown_goal_state():
    codes, diags = diag_codes(MINIMAL.replace('"goal": ["o"]', '"goal": ["nowhere"]'))
    assert codes == ["unknown-goal-state"]
    assert diags[0].line == 11


def test_non_bipartite_and_syntax_and_version():
    bad = MINIMAL.replace('{"id": "o", "kind": "observation"}', '{"id": "o", "kind": "action"}')
    assert "non-bipartite" in diag_codes(bad)[0]
    assert diag_codes(MINIMAL[:-5])[0] == ["syntax"]
    assert diag_codes(MINIMAL.replace('"version": 1', '"version": 7'))[0] == ["unsupported-version"]


def test_unknown_edge_vertex_and_bad_stipulation():
    bad = MINIMAL.replace('"to": "o"', '"to": "q"')
    assert diag_codes(bad)[0] == ["unknown-vertex"]
    stip = MINIMAL.replace('"goal": ["o"]', '"goal": ["o"], "stipulation": {"grammar": 1, "formula": "contains(q)"}')
    assert diag_codes(stip)[0] == ["bad-stipulation"]


def test_constraints_and_budgets():
    text = MINIMAL.replace(
        '"goal": ["o"]',
        '"goal": ["o"], "constraints": {"overlapping": 0}, "budgets": {"max_cover_list": -3}',
    )
    codes, _ = diag_codes(text)
    assert codes == ["bad-constraint", "schema"]


def test_track_file_round_trip():
    problem, spec = builtin_scenario("track-cyclic")
    pf = io.ProblemFile(problem, spec, budgets={"max_cover_list": 10000})
    text = io.dump_problem(pf)
    again = io.parse_problem(text)
    assert again.problem.world.observations == {"o", "o1", "o2", "o3", "o4", "o5", "o6"}
    assert again.problem.world == problem.world and again.spec == spec
    assert io.dump_problem(again) == text


def test_stipulation_round_trip():
    problem, spec = builtin_scenario("corridor")
    from sensorsynth.stipulation import parse

    pf = io.ProblemFile(problem, spec, parse("disjoint-from(c2)", problem.world.vertices))
    text = io.dump_problem(pf)
    assert io.dump_problem(io.parse_problem(text)) == text


@pytest.mark.parametrize("name", SCENARIOS)
def test_scenarios_validate(name):
    problem, spec = builtin_scenario(name)
    assert build_tree(problem, spec).root is not None


def test_scenario_facts():
    track, _ = builtin_scenario("track-cyclic")
    assert len([v for v in track.world.vertices if str(v).startswith("s") and "'" not in str(v)]) == 6
    assert len(track.world.observations) == 7 and track.goal == {"s5"}
    grid, _ = builtin_scenario("grid-office")
    assert (len(grid.world.vertices), len(grid.world.observations)) == (22, 11)
    corridor, _ = builtin_scenario("corridor")
    assert len(corridor.world.initial) == 3
    with pytest.raises(InputError):
        builtin_scenario("moon-base")


def test_plan_and_cover_files_round_trip():
    problem, spec = builtin_scenario("grid-office")
    sol = synthesize(build_tree(problem, spec), spec)
    cover = sol.root_covers[0]
    plan = extract_plan(sol, cover)
    again = io.parse_plan(io.dump_plan(plan))
    assert again.graph == plan.graph and again.termination == plan.termination
    assert io.parse_cover(io.dump_cover(cover)) == cover
    sm = json.dumps({"schema": "sensorsynth/cover", "version": 1, "sensor_map": {"a": [1, 2], "b": [2]}})
    assert io.parse_cover(sm) == Cover([["a"], ["a", "b"]])


def test_dot_shapes():
    problem, spec = builtin_scenario("track-cyclic", segments=4)
    tree = build_tree(problem, spec)
    dot = export.export(tree, "dot").decode()
    for v in tree.vertices:
        if v.dummy:
            continue
        line = next(l for l in dot.splitlines() if l.strip().startswith(f"{v.id} ["))
        assert ("shape=box" in line) == (v.kind == "action")
        assert ("shape=circle" in line) == (v.kind == "observation")


def test_single_vertex_plan_dot():
    problem, _ = builtin_scenario("corridor")
    from sensorsynth import ACTION, PGraph, Plan

    plan = Plan(PGraph({0: ACTION}, [], [0]), [0])
    dot = export.export(plan, "dot").decode()
    assert dot.count("shape=box") == 1 and "->" not in dot


def test_structured_export_is_deterministic():
    problem, spec = builtin_scenario("grid-office")
    a = export.export(synthesize(build_tree(problem, spec), spec))
    b = export.export(synthesize(build_tree(problem, spec), spec))
    assert a == b
    assert json.loads(a)["schema"] == "sensorsynth/solutions"


def test_cli_round_trip(tmp_path, capsys):
    assert main(["scenario", "corridor", "--out", str(tmp_path)]) == 0
    prob = tmp_path / "corridor.json"
    assert main(["synth", str(prob), "--out", str(tmp_path / "out"), "--plans", "--verify"]) == 0
    out = capsys.readouterr().out
    assert "upper covers at the root:" in out and "verified plans: 1/1 solve" in out
    plans = tmp_path / "out" / "plans"
    assert main(["verify", str(prob), str(plans / "plan-0001.json"), str(plans / "cover-0001.json")]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "solves"
    assert main(["oracle", str(prob)]) == 0
    diff = json.loads(capsys.readouterr().out)
    assert diff["missing_from_synth"] == diff["extra_in_synth"] == []
    assert main(["tree", "--scenario", "corridor"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(MINIMAL.replace('"labels": ["u"]', '"labels": []'))
    assert main(["synth", str(bad)]) == 1
    assert "empty-label-set" in capsys.readouterr().err
    assert main(["synth", "--scenario", "grid-office", "--max-tree-vertices", "3"]) == 2
    monkeypatch.setenv("SENSORSYNTH_MAX_TREE_VERTICES", "3")
    assert main(["synth", "--scenario", "grid-office"]) == 2


def test_cli_counts_track_with_overlap(capsys):
    assert main(["synth", "--scenario", "track-cyclic", "--segments", "4", "--overlapping", "1"]) == 0
    out = capsys.readouterr().out
    assert "25453" in out and "1333" in out


def test_readme_example_parses():
    from pathlib import Path

    text = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    example = text.split("```json\n", 1)[1].split("```", 1)[0]
    pf = io.parse_problem(example)
    assert pf.spec.contiguous and pf.spec.overlapping == 1
    codes, diags = diag_codes(example.replace('"labels": ["u"]', '"labels": []', 1))
    assert codes == ["empty-label-set"] and diags[0].line == 12
