"""P-graphs: edge-labeled bipartite graphs used for both worlds and plans.

A p-graph alternates between *action* vertices, whose out-edges bear
action labels, and *observation* vertices, whose out-edges bear
observation labels.  Vertex ids and event labels are opaque hashable
symbols; the two alphabets must be disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .errors import MappingError, ValidationError

ACTION = "action"
OBSERVATION = "observation"
KINDS = (ACTION, OBSERVATION)


def sort_key(x):
    """Total order over mixed int/str symbols (ints first, numerically)."""
    if isinstance(x, int) and not isinstance(x, bool):
        return (0, x, "")
    return (1, 0, str(x))


def sorted_symbols(items):
    return sorted(items, key=sort_key)


def other_kind(kind):
    return OBSERVATION if kind == ACTION else ACTION


@dataclass(frozen=True)
class Edge:
    source: Hashable
    target: Hashable
    labels: frozenset


class PGraph:
    """Immutable p-graph.

    Construction never fails on semantic problems; call :func:`validate`
    to obtain a list of violations.  Label sets are stored as frozensets,
    so duplicate labels on one edge collapse.
    """

    __slots__ = ("_kinds", "_edges", "_initial", "_actions", "_observations", "_out")

    def __init__(
        self,
        vertices: Mapping[Hashable, str],
        edges: Iterable,
        initial: Iterable[Hashable],
        actions: Iterable[Hashable] = (),
        observations: Iterable[Hashable] = (),
    ):
        self._kinds = dict(vertices)
        self._edges = tuple(
            e if isinstance(e, Edge) else Edge(e[0], e[1], frozenset(e[2]))
            for e in edges
        )
        self._initial = frozenset(initial)
        self._actions = frozenset(actions)
        self._observations = frozenset(observations)
        out = {v: [] for v in self._kinds}
        for e in self._edges:
            out.setdefault(e.source, []).append(e)
        self._out = {v: tuple(es) for v, es in out.items()}

    @property
    def vertices(self):
        return self._kinds.keys()

    @property
    def edges(self):
        return self._edges

    @property
    def initial(self):
        return self._initial

    @property
    def actions(self):
        return self._actions

    @property
    def observations(self):
        return self._observations

    def kind(self, v):
        return self._kinds[v]

    def out_edges(self, v):
        if v not in self._kinds:
            raise KeyError(v)
        return self._out.get(v, ())

    def vertices_of_kind(self, kind):
        return [v for v, k in self._kinds.items() if k == kind]

    def __eq__(self, other):
        if not isinstance(other, PGraph):
            return NotImplemented
        return (
            self._kinds == other._kinds
            and sorted(map(_edge_key, self._edges)) == sorted(map(_edge_key, other._edges))
            and self._initial == other._initial
            and self._actions == other._actions
            and self._observations == other._observations
        )

    def __hash__(self):
        return hash((frozenset(self._kinds.items()), frozenset(self._edges), self._initial))

    def __repr__(self):
        return (
            f"PGraph({len(self._kinds)} vertices, {len(self._edges)} edges, "
            f"initial={sorted_symbols(self._initial)})"
        )


def _edge_key(e):
    return (sort_key(e.source), sort_key(e.target), [sort_key(x) for x in sorted_symbols(e.labels)])


@dataclass(frozen=True)
class PlanningProblem:
    world: PGraph
    goal: frozenset

    def __post_init__(self):
        object.__setattr__(self, "goal", frozenset(self.goal))
        missing = self.goal - set(self.world.vertices)
        if missing:
            raise ValidationError(f"goal vertices not in world: {sorted_symbols(missing)}")


@dataclass(frozen=True)
class Plan:
    graph: PGraph
    termination: frozenset
    # Optional annotation: plan vertex -> belief (set of world states) it tracks.
    beliefs: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "termination", frozenset(self.termination))
        missing = self.termination - set(self.graph.vertices)
        if missing:
            raise ValidationError(f"termination vertices not in plan: {sorted_symbols(missing)}")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    vertex: Hashable = None
    edge: int | None = None


def validate(graph: PGraph) -> list[Violation]:
    """Return every invariant violation of ``graph`` (empty list if valid)."""
    report = []
    kinds = graph._kinds
    for v, k in kinds.items():
        if k not in KINDS:
            report.append(Violation("bad-kind", f"vertex {v!r} has unknown kind {k!r}", vertex=v))
    shared = graph.actions & graph.observations
    if shared:
        report.append(Violation("alphabet-overlap", f"symbols in both alphabets: {sorted_symbols(shared)}"))

    if not graph.initial:
        report.append(Violation("empty-initial", "initial set is empty"))
    else:
        unknown = [v for v in graph.initial if v not in kinds]
        for v in sorted_symbols(unknown):
            report.append(Violation("unknown-vertex", f"initial vertex {v!r} does not exist", vertex=v))
        init_kinds = {kinds[v] for v in graph.initial if v in kinds}
        if len(init_kinds) > 1:
            report.append(Violation("mixed-initial", "initial set mixes action and observation vertices"))

    for i, e in enumerate(graph.edges):
        if e.source not in kinds or e.target not in kinds:
            bad = e.source if e.source not in kinds else e.target
            report.append(Violation("unknown-vertex", f"edge {i} references unknown vertex {bad!r}", vertex=bad, edge=i))
            continue
        sk, tk = kinds[e.source], kinds[e.target]
        if sk == tk:
            what = "self-loop" if e.source == e.target else f"{sk}->{tk} edge"
            report.append(Violation("bipartite", f"edge {i} is a {what}", vertex=e.source, edge=i))
        if not e.labels:
            report.append(Violation("empty-label-set", f"edge {i} has an empty label set", vertex=e.source, edge=i))
            continue
        alphabet = graph.actions if sk == ACTION else graph.observations
        stray = e.labels - alphabet
        if stray:
            report.append(
                Violation(
                    "label-alphabet",
                    f"edge {i} from {sk} vertex {e.source!r} bears labels outside the {sk} alphabet: "
                    f"{sorted_symbols(stray)}",
                    vertex=e.source,
                    edge=i,
                )
            )
    return report


def ensure_valid(graph: PGraph, what="graph"):
    report = validate(graph)
    if report:
        raise ValidationError(f"invalid {what}: " + "; ".join(v.message for v in report), report)


def outgoing_events(graph: PGraph, vertex) -> frozenset:
    """Union of the label sets on the out-edges of ``vertex``."""
    try:
        edges = graph.out_edges(vertex)
    except KeyError:
        raise LookupError(f"unknown vertex {vertex!r}") from None
    events = set()
    for e in edges:
        events |= e.labels
    return frozenset(events)


def initial_kind(graph: PGraph):
    kinds = {graph.kind(v) for v in graph.initial}
    if len(kinds) != 1:
        raise ValidationError("initial set is empty or heterogeneous")
    return kinds.pop()


def apply_preimage(plan: Plan, cover) -> Plan:
    """Relabel observation edges of a reading-labeled plan by cover preimages.

    Plan observation labels are 1-based reading indices into the cover's
    canonical block order; each label set becomes the union of the
    indexed blocks.
    """
    blocks = cover.indexed()
    g = plan.graph
    edges = []
    for e in g.edges:
        if g.kind(e.source) != OBSERVATION:
            edges.append(e)
            continue
        ys = set()
        for x in e.labels:
            if not isinstance(x, int) or isinstance(x, bool) or not 1 <= x <= len(blocks):
                raise MappingError(f"reading {x!r} does not index a block of {cover!r}")
            ys |= blocks[x - 1]
        edges.append(Edge(e.source, e.target, frozenset(ys)))
    graph = PGraph(g._kinds, edges, g.initial, g.actions, cover.domain)
    return Plan(graph, plan.termination, plan.beliefs)
