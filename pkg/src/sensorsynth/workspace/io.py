"""Problem, plan and cover files.

All files are JSON documents with a ``schema`` tag and an integer
``version``.  A problem file looks like::

    {
      "schema": "sensorsynth/problem", "version": 1,
      "world": {
        "vertices": [{"id": "s1", "kind": "observation"}, ...],
        "edges": [{"from": "s1", "to": "a1", "labels": ["o1"]}, ...],
        "initial": ["s1"],
        "actions": ["forward"], "observations": ["o1"]
      },
      "goal": ["s5"],
      "neighbors": [["o1", "o2"], ...],
      "constraints": {"contiguous": true, "overlapping": 1},
      "stipulation": {"grammar": 1, "formula": "disjoint-from(s2)"},
      "budgets": {"max_tree_vertices": 500000}
    }

Only ``world`` and ``goal`` are required.  Parsing errors carry a list of
:class:`Diagnostic` records with a code, the JSON path of the offending
field and its line in the source text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..cover import Cover, from_sensor_map
from ..errors import InputError, SpecificationError, StipulationError
from ..pgraph import KINDS, PGraph, Plan, PlanningProblem, sort_key, sorted_symbols, validate
from ..properties import ConstraintSpec, NeighborRelation
from ..stipulation import GRAMMAR_VERSION, Formula, parse as parse_stipulation, to_text

PROBLEM_SCHEMA = "sensorsynth/problem"
PLAN_SCHEMA = "sensorsynth/plan"
COVER_SCHEMA = "sensorsynth/cover"
VERSION = 1

BUDGET_KEYS = ("max_tree_vertices", "max_tree_depth", "max_cover_list", "max_intersect_results")
CONSTRAINT_KEYS = ("partition", "contiguous", "outputting", "overlapping", "wide", "max_width")

# validate() codes mapped to diagnostic codes
_GRAPH_CODES = {
    "bipartite": "non-bipartite",
    "empty-label-set": "empty-label-set",
    "unknown-vertex": "unknown-vertex",
    "mixed-initial": "mixed-initial",
    "empty-initial": "empty-initial",
    "label-alphabet": "label-alphabet",
    "alphabet-overlap": "alphabet-overlap",
    "bad-kind": "bad-kind",
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    path: str = ""
    line: int | None = None

    def __str__(self):
        where = self.path or "<document>"
        if self.line is not None:
            where += f" (line {self.line})"
        return f"{where}: [{self.code}] {self.message}"


class ProblemFileError(InputError):
    """A file failed to parse; ``diagnostics`` lists every problem found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(map(str, self.diagnostics)))


@dataclass
class ProblemFile:
    problem: PlanningProblem
    spec: ConstraintSpec
    stipulation: Formula | None = None
    budgets: dict = field(default_factory=dict)


# ---- position-aware JSON loading ------------------------------------------

_WS = " \t\r\n"


def _load(text):
    """Decode ``text`` and map every JSON path to its starting line."""
    decoder = json.JSONDecoder()
    lines = {}

    def line_of(i):
        return text.count("\n", 0, i) + 1

    def skip(i):
        while i < len(text) and text[i] in _WS:
            i += 1
        return i

    def value(i, path):
        i = skip(i)
        lines[path] = line_of(i)
        if i < len(text) and text[i] == "{":
            out = {}
            i = skip(i + 1)
            if text[i : i + 1] == "}":
                return out, i + 1
            while True:
                key, i = decoder.scan_once(text, skip(i))
                i = skip(i)
                if text[i : i + 1] != ":":
                    raise json.JSONDecodeError("Expecting ':' delimiter", text, i)
                out[key], i = value(i + 1, f"{path}.{key}" if path else key)
                i = skip(i)
                if text[i : i + 1] == ",":
                    i += 1
                    continue
                if text[i : i + 1] == "}":
                    return out, i + 1
                raise json.JSONDecodeError("Expecting ',' delimiter", text, i)
        if i < len(text) and text[i] == "[":
            out = []
            i = skip(i + 1)
            if text[i : i + 1] == "]":
                return out, i + 1
            while True:
                item, i = value(i, f"{path}[{len(out)}]")
                out.append(item)
                i = skip(i)
                if text[i : i + 1] == ",":
                    i += 1
                    continue
                if text[i : i + 1] == "]":
                    return out, i + 1
                raise json.JSONDecodeError("Expecting ',' delimiter", text, i)
        try:
            return decoder.scan_once(text, i)
        except StopIteration:
            raise json.JSONDecodeError("Expecting value", text, i) from None

    try:
        doc, end = value(0, "")
        if skip(end) != len(text):
            raise json.JSONDecodeError("Extra data", text, skip(end))
    except json.JSONDecodeError as exc:
        raise ProblemFileError([Diagnostic("syntax", exc.msg, "", exc.lineno)]) from None
    return doc, lines


class _Reader:
    def __init__(self, text):
        if isinstance(text, (bytes, bytearray)):
            try:
                text = text.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ProblemFileError([Diagnostic("encoding", str(exc))]) from None
        self.doc, self.lines = _load(text)
        self.diags = []

    def error(self, code, message, path=""):
        line = None
        p = path
        while p and line is None:
            line = self.lines.get(p)
            cut = max(p.rfind("."), p.rfind("["))
            p = p[:cut] if cut > 0 else ""
        self.diags.append(Diagnostic(code, message, path, line if line is not None else self.lines.get("")))

    def fail_if_any(self):
        if self.diags:
            raise ProblemFileError(self.diags)

    def expect(self, obj, key, kind, path, required=True):
        if not isinstance(obj, dict) or key not in obj:
            if required:
                self.error("schema", f"missing field {key!r}", path)
            return None
        v = obj[key]
        full = f"{path}.{key}" if path else key
        if not isinstance(v, kind) or (kind is int and isinstance(v, bool)):
            self.error("schema", f"field {key!r} has the wrong type", full)
            return None
        return v

    def header(self, schema):
        doc = self.doc
        if not isinstance(doc, dict):
            self.error("schema", "top level must be an object")
            self.fail_if_any()
        if doc.get("schema") != schema:
            self.error("schema", f"expected schema {schema!r}, found {doc.get('schema')!r}", "schema")
        ver = doc.get("version")
        if ver != VERSION:
            self.error("unsupported-version", f"version {ver!r} is not supported (expected {VERSION})", "version")
        self.fail_if_any()


def _symbol(x):
    return isinstance(x, (str, int)) and not isinstance(x, bool)


def _symbols(r, value, path, what):
    if not isinstance(value, list):
        r.error("schema", f"{what} must be an array", path)
        return []
    out = []
    for i, x in enumerate(value):
        if _symbol(x):
            out.append(x)
        else:
            r.error("schema", f"{what} entries must be strings or integers", f"{path}[{i}]")
    return out


def _read_graph(r, g, path, vertex_field="vertices"):
    vertices = {}
    for i, v in enumerate(r.expect(g, vertex_field, list, path) or []):
        vp = f"{path}.{vertex_field}[{i}]"
        vid = v.get("id") if isinstance(v, dict) else None
        kind = v.get("kind") if isinstance(v, dict) else None
        if not _symbol(vid):
            r.error("schema", "vertex needs an 'id' string or integer", vp)
            continue
        if kind not in KINDS:
            r.error("bad-kind", f"vertex {vid!r} has kind {kind!r}; use 'action' or 'observation'", vp)
            continue
        if vid in vertices:
            r.error("duplicate-vertex", f"vertex {vid!r} is declared twice", vp)
        vertices[vid] = kind
    edges = []
    for i, e in enumerate(r.expect(g, "edges", list, path) or []):
        ep = f"{path}.edges[{i}]"
        if not isinstance(e, dict):
            r.error("schema", "edge must be an object", ep)
            continue
        src, dst, labels = e.get("from"), e.get("to"), e.get("labels")
        if not _symbol(src) or not _symbol(dst) or not isinstance(labels, list):
            r.error("schema", "edge needs 'from', 'to' and a 'labels' array", ep)
            continue
        edges.append((src, dst, _symbols(r, labels, f"{ep}.labels", "labels")))
    initial = _symbols(r, g.get("initial", []) if isinstance(g, dict) else [], f"{path}.initial", "initial")
    actions = _symbols(r, r.expect(g, "actions", list, path) or [], f"{path}.actions", "actions")
    observations = _symbols(r, r.expect(g, "observations", list, path) or [], f"{path}.observations", "observations")
    return PGraph(vertices, edges, initial, actions, observations)


def _graph_diagnostics(r, graph, path):
    for v in validate(graph):
        code = _GRAPH_CODES.get(v.code, v.code)
        if v.edge is not None:
            where = f"{path}.edges[{v.edge}]"
            if v.code == "empty-label-set":
                where += ".labels"
                v = v.__class__(v.code, "empty label set", v.vertex, v.edge)
        elif v.code in ("empty-initial", "mixed-initial") or (v.code == "unknown-vertex" and v.edge is None):
            where = f"{path}.initial"
        else:
            where = path
        r.error(code, v.message, where)


def _read_constraints(r, doc, observations):
    nb = None
    if "neighbors" in doc:
        pairs = []
        for i, p in enumerate(r.expect(doc, "neighbors", list, "") or []):
            pp = f"neighbors[{i}]"
            if not (isinstance(p, list) and len(p) == 2 and all(_symbol(x) for x in p)):
                r.error("bad-neighbor", "neighbor entries are [observation, observation] pairs", pp)
                continue
            stray = [x for x in p if x not in observations]
            if stray:
                r.error("unknown-observation", f"neighbor pair names unknown observation(s) {stray}", pp)
                continue
            pairs.append(tuple(p))
        nb = NeighborRelation(pairs, carrier=observations)
    c = r.expect(doc, "constraints", dict, "", required=False) or {}
    for key in c:
        if key not in CONSTRAINT_KEYS:
            r.error("bad-constraint", f"unknown constraint {key!r}", f"constraints.{key}")
    kwargs = {}
    for key in ("partition", "contiguous", "max_width"):
        if key in c:
            if isinstance(c[key], bool):
                kwargs[key] = c[key]
            else:
                r.error("bad-constraint", f"{key} must be true or false", f"constraints.{key}")
    for key in ("outputting", "overlapping", "wide"):
        if key in c and c[key] is not None:
            kwargs[key] = c[key]
    if kwargs.get("contiguous") and nb is None:
        r.error("bad-constraint", "contiguity needs a 'neighbors' relation", "constraints.contiguous")
        kwargs.pop("contiguous")
    try:
        return ConstraintSpec(neighbor=nb, **kwargs)
    except SpecificationError as exc:
        r.error("bad-constraint", str(exc), "constraints")
        return ConstraintSpec(neighbor=nb)


def parse_problem(data) -> ProblemFile:
    """Parse a problem file from text or bytes.

    Raises :class:`ProblemFileError` listing every diagnostic found.
    """
    r = _Reader(data)
    r.header(PROBLEM_SCHEMA)
    doc = r.doc
    world_doc = r.expect(doc, "world", dict, "")
    goal = _symbols(r, doc.get("goal", []), "goal", "goal") if "goal" in doc else []
    if "goal" not in doc:
        r.error("schema", "missing field 'goal'", "")
    r.fail_if_any()
    world = _read_graph(r, world_doc, "world")
    r.fail_if_any()
    _graph_diagnostics(r, world, "world")
    if not goal:
        r.error("empty-goal", "goal region is empty", "goal")
    for i, g in enumerate(goal):
        if g not in world.vertices:
            r.error("unknown-goal-state", f"unknown goal state {g!r}", f"goal[{i}]")
    spec = _read_constraints(r, doc, world.observations)
    stip = None
    if "stipulation" in doc:
        s = doc["stipulation"]
        text = s.get("formula") if isinstance(s, dict) else s
        grammar = s.get("grammar", GRAMMAR_VERSION) if isinstance(s, dict) else GRAMMAR_VERSION
        if grammar != GRAMMAR_VERSION:
            r.error("unsupported-version", f"stipulation grammar {grammar!r} is not supported", "stipulation.grammar")
        elif not isinstance(text, str):
            r.error("schema", "stipulation needs a 'formula' string", "stipulation")
        else:
            try:
                stip = parse_stipulation(text, world.vertices)
            except StipulationError as exc:
                r.error("bad-stipulation", str(exc), "stipulation")
    budgets = {}
    b = r.expect(doc, "budgets", dict, "", required=False) or {}
    for key, v in b.items():
        if key not in BUDGET_KEYS:
            r.error("schema", f"unknown budget {key!r}", f"budgets.{key}")
        elif not isinstance(v, int) or isinstance(v, bool) or v < 1:
            r.error("schema", f"budget {key} must be a positive integer", f"budgets.{key}")
        else:
            budgets[key] = v
    r.fail_if_any()
    return ProblemFile(PlanningProblem(world, goal), spec, stip, budgets)


def _sorted(xs):
    return sorted_symbols(xs)


def _graph_doc(graph: PGraph, vertex_extra=None):
    vs = []
    for v in _sorted(graph.vertices):
        entry = {"id": v, "kind": graph.kind(v)}
        if vertex_extra:
            entry.update(vertex_extra(v))
        vs.append(entry)
    edges = sorted(
        graph.edges,
        key=lambda e: (sort_key(e.source), sort_key(e.target), [sort_key(x) for x in _sorted(e.labels)]),
    )
    return {
        "vertices": vs,
        "edges": [{"from": e.source, "to": e.target, "labels": _sorted(e.labels)} for e in edges],
        "initial": _sorted(graph.initial),
        "actions": _sorted(graph.actions),
        "observations": _sorted(graph.observations),
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def problem_document(pf: ProblemFile) -> dict:
    doc = {"schema": PROBLEM_SCHEMA, "version": VERSION, "world": _graph_doc(pf.problem.world)}
    doc["goal"] = _sorted(pf.problem.goal)
    spec = pf.spec
    if spec.neighbor is not None:
        doc["neighbors"] = [list(p) for p in spec.neighbor.pairs()]
    c = {}
    for key in CONSTRAINT_KEYS:
        v = getattr(spec, key)
        if v not in (None, False):
            c[key] = v
    if c:
        doc["constraints"] = c
    if pf.stipulation is not None:
        doc["stipulation"] = {"grammar": GRAMMAR_VERSION, "formula": to_text(pf.stipulation)}
    if pf.budgets:
        doc["budgets"] = {k: pf.budgets[k] for k in BUDGET_KEYS if k in pf.budgets}
    return doc


def dump_problem(pf: ProblemFile) -> str:
    return dumps(problem_document(pf))


# ---- plans and covers -------------------------------------------------------


def plan_document(plan: Plan) -> dict:
    def extra(v):
        if v in plan.beliefs:
            return {"belief": _sorted(plan.beliefs[v])}
        return {}

    doc = {"schema": PLAN_SCHEMA, "version": VERSION}
    doc.update(_graph_doc(plan.graph, extra))
    doc["termination"] = _sorted(plan.termination)
    return doc


def dump_plan(plan: Plan) -> str:
    return dumps(plan_document(plan))


def parse_plan(data) -> Plan:
    r = _Reader(data)
    r.header(PLAN_SCHEMA)
    graph = _read_graph(r, r.doc, "")
    term = _symbols(r, r.doc.get("termination", []), "termination", "termination")
    r.fail_if_any()
    _graph_diagnostics(r, graph, "")
    for i, t in enumerate(term):
        if t not in graph.vertices:
            r.error("unknown-vertex", f"termination vertex {t!r} does not exist", f"termination[{i}]")
    beliefs = {}
    for v in r.doc.get("vertices", []):
        if isinstance(v, dict) and isinstance(v.get("belief"), list):
            beliefs[v.get("id")] = frozenset(v["belief"])
    r.fail_if_any()
    return Plan(graph, term, beliefs)


def cover_document(cover: Cover) -> dict:
    return {
        "schema": COVER_SCHEMA,
        "version": VERSION,
        "blocks": [_sorted(b) for b in cover.indexed()],
    }


def dump_cover(cover: Cover) -> str:
    return dumps(cover_document(cover))


def parse_cover(data) -> Cover:
    """Read a cover file holding ``blocks`` or a ``sensor_map``."""
    r = _Reader(data)
    r.header(COVER_SCHEMA)
    doc = r.doc
    if "blocks" in doc:
        blocks = []
        for i, b in enumerate(r.expect(doc, "blocks", list, "") or []):
            items = _symbols(r, b, f"blocks[{i}]", "block")
            if not items:
                r.error("empty-block", "blocks must be non-empty", f"blocks[{i}]")
            blocks.append(items)
        r.fail_if_any()
        return Cover(blocks)
    if "sensor_map" in doc:
        h = {}
        for y, xs in (r.expect(doc, "sensor_map", dict, "") or {}).items():
            readings = _symbols(r, xs, f"sensor_map.{y}", "readings")
            if not readings:
                r.error("empty-image", f"observation {y!r} has no readings", f"sensor_map.{y}")
            h[y] = readings
        r.fail_if_any()
        return from_sensor_map(h)
    r.error("schema", "cover file needs 'blocks' or 'sensor_map'")
    r.fail_if_any()
