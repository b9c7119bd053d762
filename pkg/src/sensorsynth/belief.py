"""Belief tree construction.

Beliefs are sets of world states.  Action beliefs branch on the actions
common to all member states; observation beliefs branch on every admitted
subset of the observations their states can emit.  A child belief that
already occurs on the path from the root is replaced by an edge to the
shared dummy vertex, which keeps the tree finite.

Identical subtrees are stored once.  The subtree under a belief depends
only on the belief and on which of its descendants lie on the path above
it, so vertices are hash-consed on that key; the logical tree is unchanged.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from itertools import combinations

from .cover import block_key
from .errors import ResourceError, ValidationError
from .pgraph import ACTION, OBSERVATION, PlanningProblem, ensure_valid, other_kind, outgoing_events, sorted_symbols
from .properties import NO_CONSTRAINTS, ConstraintSpec, block_traces

DEFAULT_MAX_VERTICES = 500_000
DEFAULT_MAX_DEPTH = 2_000


@dataclass(eq=False)
class BeliefVertex:
    id: int
    states: frozenset
    kind: str | None
    goal: bool = False
    dummy: bool = False
    #: ``(label, child)`` pairs in canonical label order.
    children: list = field(default_factory=list)
    #: Observations the member states can emit (observation vertices only).
    events: frozenset = frozenset()

    @property
    def is_leaf(self):
        return not self.children

    def __repr__(self):
        if self.dummy:
            return "BeliefVertex(dummy)"
        tag = " goal" if self.goal else ""
        return f"BeliefVertex({self.id}, {self.kind}, {{{', '.join(map(str, sorted_symbols(self.states)))}}}{tag})"


@dataclass
class BeliefTree:
    problem: PlanningProblem
    spec: ConstraintSpec
    root: BeliefVertex
    dummy: BeliefVertex
    vertices: list
    stipulation: object = None
    action_subsets: bool = False
    #: Set when the initial belief violates the stipulation.
    root_violation: bool = False

    @property
    def universe(self) -> frozenset:
        return self.problem.world.observations

    def logical_size(self) -> int:
        """Vertex count of the unshared tree (dummy edges count one each)."""
        memo = {}

        def size(v):
            if v.dummy:
                return 1
            if v.id not in memo:
                memo[v.id] = 1 + sum(size(c) for _, c in v.children)
            return memo[v.id]

        return size(self.root)

    def iter_paths(self):
        """Yield every root-to-leaf path as a list of vertices (small trees only)."""
        stack = [(self.root, [self.root])]
        while stack:
            v, path = stack.pop()
            if not v.children:
                yield path
                continue
            for _, c in reversed(v.children):
                stack.append((c, path + [c]))


def image(world, states, labels) -> frozenset:
    """States reached from ``states`` along edges bearing any of ``labels``."""
    out = set()
    for w in states:
        for e in world.out_edges(w):
            if e.labels & labels:
                out.add(e.target)
    return frozenset(out)


def common_actions(world, states) -> frozenset:
    it = iter(states)
    acts = set(outgoing_events(world, next(it)))
    for w in it:
        acts &= outgoing_events(world, w)
    return frozenset(acts)


def belief_kind(world, states):
    kinds = {world.kind(w) for w in states}
    if len(kinds) != 1:
        raise ValidationError(f"heterogeneous belief {sorted_symbols(states)}")
    return kinds.pop()


class _Expander:
    def __init__(self, problem, spec, action_subsets):
        self.world = problem.world
        self.universe = problem.world.observations
        self.spec = spec
        self.action_subsets = action_subsets
        self._cache = {}

    def successors(self, states, kind):
        key = states
        if key in self._cache:
            return self._cache[key]
        world = self.world
        if kind == ACTION:
            acts = sorted_symbols(common_actions(world, states))
            if self.action_subsets:
                labels = [frozenset(c) for r in range(1, len(acts) + 1) for c in combinations(acts, r)]
            else:
                labels = [frozenset([a]) for a in acts]
            events = frozenset()
        else:
            per_state = [outgoing_events(world, w) for w in states]
            if not all(per_state):
                # A member state with nothing to emit leaves the world stuck there.
                self._cache[key] = (frozenset(), [])
                return self._cache[key]
            events = frozenset().union(*per_state)
            labels = sorted(block_traces(events, self.spec, self.universe), key=block_key)
        succ = [(label, image(world, states, label)) for label in labels]
        self._cache[key] = (events, succ)
        return events, succ


def _descendants(expander, root_states, goal, stipulation):
    """Map each reachable, expandable belief to the set of beliefs below it."""
    graph = {}
    kinds = {root_states: belief_kind(expander.world, root_states)}
    stack = [root_states]
    while stack:
        b = stack.pop()
        if b in graph:
            continue
        if b <= goal or (stipulation is not None and not stipulation(b)):
            graph[b] = ()
            continue
        _, succ = expander.successors(b, kinds[b])
        kids = tuple({c for _, c in succ})
        graph[b] = kids
        for c in kids:
            if c not in graph:
                kinds.setdefault(c, other_kind(kinds[b]))
                stack.append(c)
    desc = {}
    for b in graph:
        seen = set()
        todo = list(graph[b])
        while todo:
            c = todo.pop()
            if c in seen:
                continue
            seen.add(c)
            todo.extend(graph.get(c, ()))
        desc[b] = frozenset(seen)
    return desc


def build_tree(
    problem: PlanningProblem,
    spec: ConstraintSpec | None = None,
    stipulation=None,
    *,
    action_subsets: bool | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> BeliefTree:
    """Build the belief tree of ``problem``.

    ``action_subsets`` defaults to ``True`` exactly when a stipulation is
    given; in that mode action vertices branch on every non-empty subset of
    the common actions.  Per-block constraints in ``spec`` restrict the
    observation subsets expanded to restrictions of admissible blocks.
    """
    spec = spec or NO_CONSTRAINTS
    world = problem.world
    ensure_valid(world, "world")
    if not problem.goal:
        raise ValidationError("goal region is empty")
    if action_subsets is None:
        action_subsets = stipulation is not None
    expander = _Expander(problem, spec, action_subsets)
    goal = problem.goal
    root_states = world.initial
    root_kind = belief_kind(world, root_states)

    dummy = BeliefVertex(0, frozenset(), None, dummy=True)
    vertices = [dummy]
    tree = BeliefTree(problem, spec, None, dummy, vertices, stipulation, action_subsets)

    if stipulation is not None and not stipulation(root_states):
        root = BeliefVertex(1, root_states, root_kind)
        vertices.append(root)
        tree.root = root
        tree.root_violation = True
        return tree

    desc = _descendants(expander, root_states, goal, stipulation)
    shared = {}

    def make(states, kind, path, depth):
        key = (states, path & desc[states])
        node = shared.get(key)
        if node is not None:
            return node
        if depth > max_depth:
            raise ResourceError("max_tree_depth", max_depth, where=sorted_symbols(states))
        if len(vertices) >= max_vertices:
            raise ResourceError("max_tree_vertices", max_vertices)
        if belief_kind(world, states) != kind:
            raise ValidationError(f"belief {sorted_symbols(states)} breaks kind alternation")
        node = BeliefVertex(len(vertices), states, kind)
        vertices.append(node)
        shared[key] = node
        if states <= goal:
            node.goal = True
            return node
        events, succ = expander.successors(states, kind)
        node.events = events
        below = path | {states}
        child_kind = other_kind(kind)
        for label, child in succ:
            if child in below or (stipulation is not None and not stipulation(child)):
                node.children.append((label, dummy))
            else:
                node.children.append((label, make(child, child_kind, below, depth + 1)))
        return node

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 3 * max_depth + 1000))
    try:
        tree.root = make(root_states, root_kind, frozenset(), 0)
    finally:
        sys.setrecursionlimit(old)
    return tree
