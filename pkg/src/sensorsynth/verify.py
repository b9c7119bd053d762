"""Independent checks: plan verification, cover enumeration, and a
brute-force oracle for the sensor-design problem on small instances.

Nothing here reuses the belief tree or the cover intersection machinery,
so these functions can serve as ground truth for :mod:`synth`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Mapping

from .cover import Cover, canonical, to_sensor_map
from .errors import ResourceError, ValidationError
from .pgraph import ACTION, Edge, PGraph, Plan, PlanningProblem, ensure_valid, initial_kind, sorted_symbols
from .properties import ConstraintSpec, check

SOLVES = "solves"
FAILS = "fails"

SAFETY_ACTION = "safety-action"
SAFETY_OBSERVATION = "safety-observation"
CORRECTNESS = "correctness"
LIVENESS = "liveness"
BOUNDEDNESS = "boundedness"


@dataclass(frozen=True)
class JointState:
    plan_vertex: Hashable
    world_vertex: Hashable
    depth: int = 0


@dataclass(frozen=True)
class Violation:
    condition: str
    state: JointState
    message: str
    #: Events leading from an initial joint state to ``state``.
    execution: tuple = ()


@dataclass(frozen=True)
class VerifyReport:
    verdict: str
    violation: Violation | None = None
    #: Longest joint execution, when the plan solves the problem.
    bound: int | None = None
    joint_states: int = 0

    def __bool__(self):
        return self.verdict == SOLVES


def _as_sensor_map(sensor):
    if isinstance(sensor, Cover):
        return to_sensor_map(sensor.normalized())
    return {y: frozenset(xs) for y, xs in sensor.items()}


def solves(plan: Plan, problem: PlanningProblem, sensor: Cover | Mapping) -> VerifyReport:
    """Check whether ``plan`` solves ``problem`` under ``sensor``.

    ``sensor`` is either a cover, whose readings are the 1-based indices
    of its canonical block order, or a sensor map ``observation ->
    readings``.  The joint space of world and plan is explored from all
    initial pairs.  When the world emits observation ``y`` the sensor may
    report any reading in ``h(y)``, and the plan follows every out-edge
    bearing that reading.  Safety on observations therefore requires the
    plan to carry a branch for every reading the sensor can produce at a
    reachable joint state.
    """
    world = problem.world
    ensure_valid(world, "world")
    ensure_valid(plan.graph, "plan")
    if initial_kind(world) != initial_kind(plan.graph):
        raise ValidationError("plan and world initial vertices are of different kinds")
    h = _as_sensor_map(sensor)
    pg = plan.graph
    term = plan.termination
    goal = problem.goal

    start = [(v, w) for v in sorted_symbols(pg.initial) for w in sorted_symbols(world.initial)]
    parent = {s: None for s in start}
    depth = {s: 0 for s in start}
    succ = {}
    queue = deque(start)

    def fail(condition, state, message):
        events = []
        s = state
        while parent.get(s) is not None:
            prev, ev = parent[s]
            events.append(ev)
            s = prev
        js = JointState(state[0], state[1], depth[state])
        return VerifyReport(FAILS, Violation(condition, js, message, tuple(reversed(events))), joint_states=len(parent))

    while queue:
        s = queue.popleft()
        v, w = s
        if v in term:
            if w not in goal:
                return fail(CORRECTNESS, s, f"plan terminates at {v!r} while world is at non-goal {w!r}")
            succ[s] = ()
            continue
        nxt = []
        if pg.kind(v) == ACTION:
            w_actions = {u for e in world.out_edges(w) for u in e.labels}
            for pe in pg.out_edges(v):
                missing = pe.labels - w_actions
                if missing:
                    u = sorted_symbols(missing)[0]
                    return fail(SAFETY_ACTION, s, f"action {u!r} unavailable at world vertex {w!r}")
            for pe in pg.out_edges(v):
                for we in world.out_edges(w):
                    shared = pe.labels & we.labels
                    if shared:
                        nxt.append(((pe.target, we.target), sorted_symbols(shared)[0]))
        else:
            handled = set()
            for pe in pg.out_edges(v):
                handled |= pe.labels
            for we in world.out_edges(w):
                for y in sorted_symbols(we.labels):
                    readings = h.get(y, frozenset())
                    if not readings:
                        return fail(SAFETY_OBSERVATION, s, f"sensor produces no reading for {y!r}")
                    missing = readings - handled
                    if missing:
                        x = sorted_symbols(missing)[0]
                        return fail(
                            SAFETY_OBSERVATION, s, f"plan has no branch for reading {x!r} of observation {y!r}"
                        )
            for pe in pg.out_edges(v):
                for we in world.out_edges(w):
                    ys = [y for y in sorted_symbols(we.labels) if h.get(y, frozenset()) & pe.labels]
                    if ys:
                        nxt.append(((pe.target, we.target), ys[0]))
        succ[s] = tuple(dict.fromkeys(t for t, _ in nxt))
        for t, ev in nxt:
            if t not in parent:
                parent[t] = (s, ev)
                depth[t] = depth[s] + 1
                queue.append(t)

    # Boundedness: no cycle among reachable non-terminated joint states.
    colour = {}
    for s0 in start:
        if s0 in colour:
            continue
        stack = [(s0, iter(succ[s0]))]
        colour[s0] = 1
        while stack:
            s, it = stack[-1]
            t = next(it, None)
            if t is None:
                colour[s] = 2
                stack.pop()
                continue
            c = colour.get(t, 0)
            if c == 1:
                return fail(BOUNDEDNESS, t, f"joint execution can cycle through ({t[0]!r}, {t[1]!r})")
            if c == 0:
                colour[t] = 1
                stack.append((t, iter(succ[t])))

    # Liveness: every reachable non-terminated state can reach termination.
    live = {s for s in succ if s[0] in term}
    changed = True
    while changed:
        changed = False
        for s, ts in succ.items():
            if s not in live and any(t in live for t in ts):
                live.add(s)
                changed = True
    for s in parent:
        if s not in live:
            return fail(LIVENESS, s, f"no continuation from ({s[0]!r}, {s[1]!r}) reaches termination")

    # Longest execution in the (acyclic) joint graph.
    longest = {}
    for s in reversed(_topological(succ, start)):
        longest[s] = max((1 + longest[t] for t in succ[s]), default=0)
    bound = max((longest[s] for s in start), default=0)
    return VerifyReport(SOLVES, None, bound, len(parent))


def _topological(succ, start):
    order, seen = [], set()
    for s0 in start:
        if s0 in seen:
            continue
        seen.add(s0)
        stack = [(s0, iter(succ[s0]))]
        while stack:
            s, it = stack[-1]
            t = next(it, None)
            if t is None:
                order.append(s)
                stack.pop()
            elif t not in seen:
                seen.add(t)
                stack.append((t, iter(succ[t])))
    order.reverse()
    return order


DEFAULT_COVER_CAP = 4


def enumerate_covers(domain, max_blocks: int | None = None, hard_cap: int = DEFAULT_COVER_CAP) -> list[Cover]:
    """Every cover of ``domain`` by brute force over sets of non-empty subsets."""
    items = sorted_symbols(domain)
    if len(items) > hard_cap:
        raise ResourceError("max_enumeration_domain", hard_cap, where=f"|domain|={len(items)}")
    if not items:
        return [Cover()]
    subsets = [frozenset(c) for r in range(1, len(items) + 1) for c in combinations(items, r)]
    target = frozenset(items)
    top = len(subsets) if max_blocks is None else min(max_blocks, len(subsets))
    out = []
    for r in range(1, top + 1):
        for blocks in combinations(subsets, r):
            if frozenset().union(*blocks) == target:
                out.append(Cover(blocks))
    return canonical(out)


@dataclass
class OracleBounds:
    max_observations: int = DEFAULT_COVER_CAP
    max_vertices: int = 16
    #: Admissible-block cap when per-block constraints shrink the space.
    max_blocks: int = 22


class WorldModel:
    """Sensor-independent belief transitions of a world, memoized.

    Shared across the many covers an oracle run tries.
    """

    def __init__(self, world, action_subsets=False):
        self.world = world
        self.action_subsets = action_subsets
        self._actions = {}
        self._events = {}
        self._images = {}
        self._kinds = {}

    def kind(self, b):
        k = self._kinds.get(b)
        if k is None:
            k = self._kinds[b] = self.world.kind(next(iter(b)))
        return k

    def image(self, b, labels):
        key = (b, labels)
        out = self._images.get(key)
        if out is None:
            world = self.world
            out = frozenset(e.target for w in b for e in world.out_edges(w) if e.labels & labels)
            self._images[key] = out
        return out

    def action_children(self, b):
        """One successor belief per available action choice."""
        out = self._actions.get(b)
        if out is None:
            world = self.world
            common = None
            for w in b:
                acts = {u for e in world.out_edges(w) for u in e.labels}
                common = acts if common is None else common & acts
            acts = sorted_symbols(common or ())
            if self.action_subsets:
                choices = [frozenset(c) for r in range(1, len(acts) + 1) for c in combinations(acts, r)]
            else:
                choices = [frozenset([a]) for a in acts]
            out = self._actions[b] = [self.image(b, c) for c in choices]
        return out

    def events(self, b):
        """Observations emitted from ``b``, or ``None`` if a member state emits none."""
        if b not in self._events:
            world = self.world
            per_state = [frozenset(y for e in world.out_edges(w) for y in e.labels) for w in b]
            self._events[b] = frozenset().union(*per_state) if all(per_state) else None
        return self._events[b]


def solvable(
    problem: PlanningProblem,
    sensor: Cover | Mapping,
    *,
    action_subsets: bool = False,
    stipulation=None,
    model: WorldModel | None = None,
) -> bool:
    """Does some plan solve ``problem`` under the fixed ``sensor``?

    Least fixed point over beliefs reachable under the sensor: a belief is
    solved if it lies in the goal, or (action) some available action choice
    leads to a solved belief, or (observation) every reading the sensor can
    produce there leads to a solved belief.
    """
    if model is None:
        model = WorldModel(problem.world, action_subsets)
    h = _as_sensor_map(sensor)
    preimages = {}
    for y, xs in h.items():
        for x in xs:
            preimages.setdefault(x, set()).add(y)
    readings = [frozenset(p) for p in preimages.values()]
    return _solve(model, problem, readings, frozenset(h), stipulation)


def _solve(model, problem, readings, sensed, stipulation):
    """Fixpoint core of :func:`solvable`; ``readings`` are reading preimages."""
    goal = problem.goal

    def allowed(b):
        return stipulation is None or stipulation(b)

    root = problem.world.initial
    if not allowed(root):
        return False
    graph = {}
    order = []
    todo = [root]
    while todo:
        b = todo.pop()
        if b in graph:
            continue
        if b <= goal or not allowed(b):
            graph[b] = None
            continue
        order.append(b)
        if model.kind(b) == ACTION:
            kids = ("any", model.action_children(b))
        else:
            ys = model.events(b)
            if ys is None or not ys <= sensed:
                kids = ("any", [])
            else:
                traces = {r & ys for r in readings} - {frozenset()}
                kids = ("all", [model.image(b, t) for t in traces])
        graph[b] = kids
        todo.extend(c for c in kids[1] if c not in graph)

    solved = {b for b, g in graph.items() if g is None and b <= goal and allowed(b)}
    order.reverse()
    changed = True
    while changed:
        changed = False
        for b in order:
            if b in solved:
                continue
            mode, kids = graph[b]
            if mode == "any":
                ok = any(c in solved for c in kids)
            else:
                ok = bool(kids) and all(c in solved for c in kids)
            if ok:
                solved.add(b)
                changed = True
    return root in solved


def oracle(
    problem: PlanningProblem,
    spec: ConstraintSpec | None = None,
    bounds: OracleBounds | None = None,
    *,
    action_subsets: bool = False,
    stipulation=None,
) -> list[Cover]:
    """All covers of the world's observation alphabet admitting a plan.

    Covers failing ``spec`` are skipped before solving.
    """
    bounds = bounds or OracleBounds()
    world = problem.world
    ensure_valid(world, "world")
    if len(world.vertices) > bounds.max_vertices:
        raise ResourceError("oracle_max_vertices", bounds.max_vertices)
    limit = bounds.max_observations + (1 if spec is not None and spec.has_block_constraints else 0)
    if len(world.observations) > limit:
        raise ResourceError("oracle_max_observations", limit)
    model = WorldModel(world, action_subsets)
    sensed = frozenset(world.observations)
    out = []
    for blocks in candidates(world.observations, spec, bounds):
        if _solve(model, problem, blocks, sensed, stipulation):
            out.append(Cover(blocks))
    return canonical(out)


def candidates(domain, spec: ConstraintSpec | None, bounds: OracleBounds):
    """Block lists of the covers of ``domain`` passing ``spec``, by brute force.

    Without per-block constraints this is :func:`enumerate_covers`.  With
    them, subsets of the admissible blocks are enumerated directly, which
    reaches one more symbol than the unconstrained cap allows.
    """
    if spec is None or not spec.has_block_constraints:
        for c in enumerate_covers(domain, hard_cap=bounds.max_observations):
            if spec is None or check(c, spec).ok:
                yield list(c.blocks)
        return
    items = sorted_symbols(domain)
    subsets = [frozenset(cb) for r in range(1, len(items) + 1) for cb in combinations(items, r)]
    blocks = [b for b in subsets if spec.block_ok(b)]
    if len(blocks) > bounds.max_blocks:
        raise ResourceError("oracle_max_blocks", bounds.max_blocks, where=f"{len(blocks)} admissible blocks")
    target = frozenset(items)
    overlap = 0 if spec.partition else spec.overlapping
    chosen = []

    def rec(i, covered):
        if i == len(blocks):
            if covered == target and (spec.outputting is None or len(chosen) == spec.outputting):
                yield list(chosen)
            return
        b = blocks[i]
        if overlap is None or all(len(b & c) <= overlap for c in chosen):
            chosen.append(b)
            yield from rec(i + 1, covered | b)
            chosen.pop()
        yield from rec(i + 1, covered)

    yield from rec(0, frozenset())


def relabel_readings(plan: Plan, mapping: Mapping) -> Plan:
    """Rename the readings on a plan's observation edges.

    ``mapping`` sends each old reading to an iterable of new readings;
    readings it omits are dropped, and edges left without labels vanish.
    Used to move a plan between a sensor map and its cover.
    """
    g = plan.graph
    edges = []
    readings = set()
    for e in g.edges:
        if g.kind(e.source) == ACTION:
            edges.append(e)
            continue
        new = frozenset(x for r in e.labels for x in mapping.get(r, ()))
        if new:
            edges.append(Edge(e.source, e.target, new))
            readings |= new
    graph = PGraph({v: g.kind(v) for v in g.vertices}, edges, g.initial, g.actions, readings)
    return Plan(graph, plan.termination, plan.beliefs)
