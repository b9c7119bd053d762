"""DOT and structured (JSON) renderings of trees, solutions, plans and reports.

In DOT output action vertices are boxes and observation vertices circles.
Structured output is schema-tagged and key-ordered so that identical
inputs give byte-identical text.
"""

from __future__ import annotations

from ..belief import BeliefTree
from ..cover import Cover
from ..pgraph import ACTION, PGraph, Plan, sorted_symbols
from ..synth import SolutionSet
from ..verify import VerifyReport
from .io import VERSION, cover_document, dumps, plan_document

SHAPES = {ACTION: "box", None: "point"}


def _shape(kind):
    return SHAPES.get(kind, "circle")


def _q(x) -> str:
    s = str(x).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def _set(xs) -> str:
    return "{" + ", ".join(map(str, sorted_symbols(xs))) + "}"


def _graph_dot(graph: PGraph, name, term=frozenset(), notes=None) -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;"]
    for v in sorted_symbols(graph.vertices):
        attrs = [f"shape={_shape(graph.kind(v))}"]
        label = str(v) if notes is None or v not in notes else f"{v}\\n{notes[v]}"
        attrs.append(f"label={_q(label)}")
        if v in term:
            attrs.append("peripheries=2")
        if v in graph.initial:
            attrs.append("style=bold")
        lines.append(f"  {_q(v)} [{', '.join(attrs)}];")
    for e in sorted(graph.edges, key=lambda e: (str(e.source), str(e.target), _set(e.labels))):
        lines.append(f"  {_q(e.source)} -> {_q(e.target)} [label={_q(_set(e.labels))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_dot(tree: BeliefTree) -> str:
    lines = ['digraph "belief_tree" {', "  rankdir=TB;"]
    for v in tree.vertices:
        if v.dummy:
            lines.append(f'  {v.id} [shape=point, label="dummy"];')
            continue
        attrs = [f"shape={_shape(v.kind)}", f"label={_q(_set(v.states))}"]
        if v.goal:
            attrs.append("peripheries=2")
        lines.append(f"  {v.id} [{', '.join(attrs)}];")
    for v in tree.vertices:
        for label, child in v.children:
            lines.append(f"  {v.id} -> {child.id} [label={_q(_set(label))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def plan_dot(plan: Plan) -> str:
    notes = {v: _set(b) for v, b in plan.beliefs.items()}
    return _graph_dot(plan.graph, "plan", plan.termination, notes)


def world_dot(graph: PGraph, goal=frozenset()) -> str:
    return _graph_dot(graph, "world", frozenset(goal))


def to_dot(artifact) -> str:
    if isinstance(artifact, BeliefTree):
        return tree_dot(artifact)
    if isinstance(artifact, Plan):
        return plan_dot(artifact)
    if isinstance(artifact, PGraph):
        return world_dot(artifact)
    if isinstance(artifact, SolutionSet):
        return tree_dot(artifact.tree)
    raise TypeError(f"no DOT rendering for {type(artifact).__name__}")


def _blocks(cover: Cover):
    return [sorted_symbols(b) for b in cover.indexed()]


def tree_document(tree: BeliefTree) -> dict:
    return {
        "schema": "sensorsynth/belief-tree",
        "version": VERSION,
        "root": tree.root.id,
        "vertices": [
            {
                "id": v.id,
                "kind": v.kind,
                "states": sorted_symbols(v.states),
                "goal": v.goal,
                "dummy": v.dummy,
                "children": [{"label": sorted_symbols(g), "child": c.id} for g, c in v.children],
            }
            for v in tree.vertices
        ],
    }


def solution_document(sol: SolutionSet, counts=None) -> dict:
    doc = {
        "schema": "sensorsynth/solutions",
        "version": VERSION,
        "observations": sorted_symbols(sol.universe),
        "no_sensing_required": sol.no_sensing_required,
        "root_upper_covers": [_blocks(c) for c in sol.root_covers],
        "full_upper_covers": [_blocks(c) for c in sol.full_maxima()],
    }
    if counts:
        doc["counts"] = dict(counts)
    return doc


def report_document(report: VerifyReport) -> dict:
    doc = {"schema": "sensorsynth/verdict", "version": VERSION, "verdict": report.verdict}
    if report.violation is not None:
        v = report.violation
        doc["violation"] = {
            "condition": v.condition,
            "message": v.message,
            "plan_vertex": v.state.plan_vertex,
            "world_vertex": v.state.world_vertex,
            "depth": v.state.depth,
            "execution": list(v.execution),
        }
    if report.bound is not None:
        doc["bound"] = report.bound
    doc["joint_states"] = report.joint_states
    return doc


def to_document(artifact) -> dict:
    if isinstance(artifact, BeliefTree):
        return tree_document(artifact)
    if isinstance(artifact, SolutionSet):
        return solution_document(artifact)
    if isinstance(artifact, Plan):
        return plan_document(artifact)
    if isinstance(artifact, VerifyReport):
        return report_document(artifact)
    if isinstance(artifact, Cover):
        return cover_document(artifact)
    raise TypeError(f"no structured rendering for {type(artifact).__name__}")


def export(artifact, format: str = "structured") -> bytes:
    """Render ``artifact`` as ``dot`` or ``structured`` (JSON) bytes."""
    if format == "dot":
        return to_dot(artifact).encode("utf-8")
    if format == "structured":
        return dumps(to_document(artifact)).encode("utf-8")
    raise ValueError(f"unknown export format {format!r}")
