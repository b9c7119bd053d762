"""Bottom-up joint search for sensor covers and plans over a belief tree.

Every belief vertex carries a list of covers under which some plan drives
its subtree to goal leaves.  Goal leaves carry the ε cover (stored in its
normalized form, the empty cover); action vertices take the union of their
children's lists; observation vertices choose a combination of outgoing
labels covering the vertex's observations and intersect it with one cover
from each chosen child.  Lists are compacted to their maximal elements
after every vertex.

Internally a cover is ``(domain_mask, frozenset_of_block_masks)`` over a
bit index of the world's observation alphabet.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass, field
from itertools import combinations

from . import _masks
from .belief import BeliefTree, BeliefVertex
from .cover import Cover, canonical
from .errors import NotASolutionError, ResourceError
from .pgraph import ACTION, OBSERVATION, Edge, PGraph, Plan, sorted_symbols
from .properties import NO_CONSTRAINTS, ConstraintSpec, generate_blocks

log = logging.getLogger(__name__)

GOAL_ENTRY = (0, frozenset())


def covering_combinations(labels, target, minimal_only=False) -> list[tuple]:
    """All sub-collections of ``labels`` whose union is exactly ``target``.

    Labels outside ``target`` never take part.  Combinations come out
    ordered by size, then by label position.  With ``minimal_only`` only
    combinations with no redundant member are returned.
    """
    target = frozenset(target)
    labels = [frozenset(g) for g in dict.fromkeys(frozenset(g) for g in labels) if frozenset(g) <= target]
    out = []
    if not target:
        return out
    for r in range(1, len(labels) + 1):
        for combo in combinations(labels, r):
            if frozenset().union(*combo) != target:
                continue
            if minimal_only and any(frozenset().union(*(g for g in combo if g is not drop)) == target for drop in combo):
                continue
            out.append(combo)
    return out


@dataclass
class SolutionSet:
    """Root covers of a synthesis run, with one witness per (vertex, cover)."""

    tree: BeliefTree
    spec: ConstraintSpec
    index: _masks.Index
    root_entries: list
    witness: dict = field(repr=False)
    compact: bool = True

    @property
    def universe(self) -> frozenset:
        return self.tree.universe

    @property
    def root_covers(self) -> list[Cover]:
        return canonical(Cover.from_masks(self.index, d, a) for d, a in self.root_entries)

    @property
    def no_sensing_required(self) -> bool:
        """True when a root cover has empty domain: every sensor map solves."""
        return any(d == 0 for d, _ in self.root_entries)

    # ---- closure over the full observation alphabet -------------------
    def _ok_masks(self):
        return [self.index.mask(b) for b in generate_blocks(self.universe, self.spec)]

    def full_maxima_masks(self):
        ok = self._ok_masks()
        full = self.index.full
        out = []
        for d, a in self.root_entries:
            m = frozenset(b for b in ok if not b & d or (b & d) in a)
            if _masks.union(m) == full:
                out.append((full, m))
        return [m for _, m in _masks.upper(out)]

    def full_maxima(self) -> list[Cover]:
        """Maximal solution covers over the whole alphabet, per-block constraints applied."""
        full = self.index.full
        return canonical(Cover.from_masks(self.index, full, m) for m in self.full_maxima_masks())

    def count(self, spec: ConstraintSpec | None = None) -> int:
        """Number of distinct solution covers over the whole alphabet.

        Per-block constraints always come from the synthesis spec; global
        ones (partition, outputting, overlapping) from ``spec`` if given,
        else from the synthesis spec.
        """
        spec = spec or self.spec
        if not spec.has_global_constraints:
            return _count_union(self.full_maxima_masks(), self.index.full)
        return sum(1 for _ in self._enumerate(spec))

    def closure(self, spec: ConstraintSpec | None = None, limit: int | None = None):
        """Yield solution covers over the whole alphabet (optionally filtered)."""
        spec = spec or self.spec
        for i, blocks in enumerate(self._enumerate(spec)):
            if limit is not None and i >= limit:
                return
            yield Cover.from_masks(self.index, self.index.full, blocks)

    def _enumerate(self, spec):
        maxima = self.full_maxima_masks()
        return _enumerate_union(maxima, self.index.full, spec)

    def find_root(self, cover: Cover):
        """Root entry whose closure contains ``cover``, or ``None``."""
        cover = cover.normalized()
        if not cover.domain <= set(self.index.symbols):
            return None
        cd, cb = cover.to_masks(self.index)
        for d, a in self.root_entries:
            if d & cd != d:
                continue
            if all(not b & d or (b & d) in a for b in cb):
                return (d, a)
        return None

    def contains(self, cover: Cover) -> bool:
        """Is ``cover`` (over the whole alphabet) a reported solution?"""
        from .properties import check

        cover = cover.normalized()
        if cover.domain != self.universe:
            return False
        if not all(self.spec.block_ok(b) for b in cover.blocks):
            return False
        if self.spec.has_global_constraints and not check(cover, self.spec).ok:
            return False
        return self.find_root(cover) is not None


# work limits for the two closure counters
_IE_WORK = 50_000_000
MAX_COUNT_STATES = 2_000_000


def _count_union(maxima, full):
    """Count subsets of any maximum whose union is ``full``."""
    if not maxima:
        return 0
    n = full.bit_length()
    if (1 << len(maxima)) * (1 << n) * max(n, 1) <= _IE_WORK:
        return _count_union_ie(maxima, full)
    return _count_union_dp(maxima, full)


def _covering_subsets(blocks, full):
    """Subsets of ``blocks`` whose union is ``full``, by inclusion-exclusion.

    ``inside[u]`` counts blocks contained in ``u``; subsets avoiding the
    symbols outside ``u`` number ``2 ** inside[u]``.
    """
    n = full.bit_length()
    size = 1 << n
    inside = [0] * size
    for b in blocks:
        inside[b] += 1
    for i in range(n):
        bit = 1 << i
        for u in range(size):
            if u & bit:
                inside[u] += inside[u ^ bit]
    total = 0
    for u in range(size):
        if u & ~full:
            continue
        term = 1 << inside[u]
        total += -term if (full ^ u).bit_count() & 1 else term
    return total


def _count_union_ie(maxima, full):
    """Inclusion-exclusion over sets of maxima; a set sharing too few blocks contributes nothing."""
    maxima = [frozenset(m) for m in maxima]
    total = 0

    def rec(start, shared, k):
        nonlocal total
        for i in range(start, len(maxima)):
            common = maxima[i] if shared is None else shared & maxima[i]
            if _masks.union(common) != full:
                continue
            term = _covering_subsets(common, full)
            total += term if k % 2 == 0 else -term
            rec(i + 1, common, k + 1)

    rec(0, None, 0)
    return total


def _count_union_dp(maxima, full):
    """Block-by-block DP tracking which maxima remain compatible."""
    blocks = sorted(set().union(*maxima), key=_masks.block_order)
    member = [sum(1 << i for i, m in enumerate(maxima) if b in m) for b in blocks]
    n = len(blocks)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | blocks[i]
    memo = {}

    def f(i, compat, covered):
        if (covered | suffix[i]) & full != full:
            return 0
        if i == n:
            return 1 if covered == full else 0
        key = (i, compat, covered)
        if key in memo:
            return memo[key]
        total = f(i + 1, compat, covered)
        inter = compat & member[i]
        if inter:
            total += f(i + 1, inter, covered | blocks[i])
        if len(memo) >= MAX_COUNT_STATES:
            raise ResourceError("max_count_states", MAX_COUNT_STATES, where="closure count")
        memo[key] = total
        return total

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 1000))
    try:
        return f(0, (1 << len(maxima)) - 1, 0)
    finally:
        sys.setrecursionlimit(old)


def _enumerate_union(maxima, full, spec):
    """Yield distinct covering subsets of the maxima honoring global constraints."""
    if not maxima:
        return
    blocks = sorted(set().union(*maxima), key=_masks.block_order)
    member = [sum(1 << i for i, m in enumerate(maxima) if b in m) for b in blocks]
    n = len(blocks)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | blocks[i]
    overlap = 0 if spec.partition else spec.overlapping
    kmax = spec.outputting
    chosen = []

    def rec(i, compat, covered):
        if (covered | suffix[i]) & full != full:
            return
        if i == n:
            if kmax is None or len(chosen) == kmax:
                yield frozenset(chosen)
            return
        b = blocks[i]
        inter = compat & member[i]
        if inter and (kmax is None or len(chosen) < kmax) and (
            overlap is None or all((b & c).bit_count() <= overlap for c in chosen)
        ):
            chosen.append(b)
            yield from rec(i + 1, inter, covered | b)
            chosen.pop()
        yield from rec(i + 1, compat, covered)

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 1000))
    try:
        yield from rec(0, (1 << len(maxima)) - 1, 0)
    finally:
        sys.setrecursionlimit(old)


class _Synthesizer:
    def __init__(self, tree, spec, compact, max_covers, max_intersect):
        self.tree = tree
        self.spec = spec
        self.compact = compact
        self.max_covers = max_covers
        self.max_intersect = max_intersect
        self.index = _masks.Index(tree.universe)
        self.lists = {}
        self.witness = {}
        self._ok = None
        self._trace_cache = {}

    # per-block constraints ------------------------------------------------
    def traces(self, d):
        """Admissible block restrictions to domain ``d`` (``None``: no filter)."""
        if not self.spec.has_block_constraints:
            return None
        t = self._trace_cache.get(d)
        if t is None:
            if self._ok is None:
                self._ok = [self.index.mask(b) for b in generate_blocks(self.tree.universe, self.spec)]
            t = frozenset(b & d for b in self._ok if b & d)
            self._trace_cache[d] = t
        return t

    def meet(self, d, a, cd, ca):
        """Maximal intersection of two entries, filtered; ``None`` if incompatible."""
        if cd == 0:
            return d, a
        d2, a2 = _masks.max_intersect(d, a, cd, ca)
        t = self.traces(d2)
        if t is not None:
            a2 = a2 & t
        if _masks.union(a2) != d2:
            return None
        return d2, a2

    def meet_all(self, d, a, cd, ca):
        """Every cover in the intersection of two entries (uncompacted mode)."""
        if cd == 0:
            return [(d, a)]
        top = self.meet(d, a, cd, ca)
        if top is None:
            return []
        d2, a2 = top
        return [(d2, bs) for bs in _masks.covering_subsets(d2, a2, self.max_intersect)]

    # traversal ------------------------------------------------------------
    def run(self, root):
        order = []
        seen = set()
        stack = [(root, False)]
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
                continue
            if v.id in seen:
                continue
            seen.add(v.id)
            stack.append((v, True))
            for _, c in reversed(v.children):
                if c.id not in seen:
                    stack.append((c, False))
        for v in order:
            self.lists[v.id] = self.visit(v)
        return self.lists[root.id]

    def finish(self, v, entries):
        if self.compact:
            entries = _masks.upper(entries)
        if self.max_covers is not None and len(entries) > self.max_covers:
            raise ResourceError("max_cover_list", self.max_covers, where=v)
        return entries

    def visit(self, v: BeliefVertex):
        if v.dummy:
            return []
        if v.goal:
            self.witness[(v.id, GOAL_ENTRY)] = ("goal",)
            return [GOAL_ENTRY]
        if not v.children:
            return []
        if v.kind == ACTION:
            return self.visit_action(v)
        return self.visit_observation(v)

    def visit_action(self, v):
        entries = {}
        for label, child in v.children:
            for e in self.lists[child.id]:
                if e not in entries:
                    entries[e] = ("action", label, child)
        out = self.finish(v, list(entries))
        for e in out:
            self.witness[(v.id, e)] = entries[e]
        return out

    def visit_observation(self, v):
        idx = self.index
        yp = idx.mask(v.events)
        if not yp:
            return []
        labels = [(idx.mask(g), child, self.lists[child.id]) for g, child in v.children]
        if self.compact:
            found = self._combine_compact(yp, labels)
        else:
            found = self._combine_literal(yp, labels)
        out = self.finish(v, list(found))
        for e in out:
            choice = found[e]
            self.witness[(v.id, e)] = (
                "observation",
                tuple((idx.items(labels[j][0]), labels[j][1], ce) for j, ce in choice),
            )
        return out

    def _combine_compact(self, yp, labels):
        """Dynamic program over include/exclude decisions per label.

        A state is ``(covered, domain, admissible_blocks)``.  Excluding a
        label removes blocks whose trace on ``yp`` equals it; including it
        intersects with one cover from the child's list.
        """
        m = len(labels)
        suffix = [0] * (m + 1)
        for j in range(m - 1, -1, -1):
            suffix[j] = suffix[j + 1] | (labels[j][0] if labels[j][2] else 0)
        if suffix[0] != yp:
            return {}
        start = frozenset(g for g, _, _ in labels)
        states = {(0, yp, start): ()}
        for j, (g, _child, clist) in enumerate(labels):
            nxt = {}
            need = suffix[j + 1]
            for (covered, d, a), wit in states.items():
                if (covered | need) == yp:
                    ex = frozenset(b for b in a if b & yp != g)
                    if _masks.union(ex) == d:
                        nxt.setdefault((covered, d, ex), wit)
                cov2 = covered | g
                if (cov2 | need) != yp:
                    continue
                for ce in clist:
                    met = self.meet(d, a, ce[0], ce[1])
                    if met is not None:
                        nxt.setdefault((cov2, met[0], met[1]), wit + ((j, ce),))
            states = nxt
            if not states:
                return {}
        found = {}
        for (covered, d, a), wit in states.items():
            if covered == yp:
                found.setdefault((d, a), wit)
        return found

    def _combine_literal(self, yp, labels):
        """Enumerate every covering combination and fold full intersections."""
        found = {}
        masks = [g for g, _, _ in labels]
        for r in range(1, len(labels) + 1):
            for js in combinations(range(len(labels)), r):
                if _masks.union(masks[j] for j in js) != yp:
                    continue
                k_blocks = frozenset(masks[j] for j in js)
                cur = {(yp, k_blocks): ()}
                for j in js:
                    nxt = {}
                    for (d, a), wit in cur.items():
                        for ce in labels[j][2]:
                            for e in self.meet_all(d, a, ce[0], ce[1]):
                                nxt.setdefault(e, wit + ((j, ce),))
                    cur = nxt
                    if not cur:
                        break
                for e, wit in cur.items():
                    found.setdefault(e, wit)
        return found


def synthesize(
    tree: BeliefTree,
    spec: ConstraintSpec | None = None,
    *,
    compact: bool = True,
    max_covers: int | None = None,
    max_intersect: int | None = None,
) -> SolutionSet:
    """Propagate cover lists from the leaves of ``tree`` to its root.

    ``spec`` defaults to the spec the tree was built with.  Per-block
    constraints prune blocks during propagation; global constraints are
    only applied when the root closure is enumerated or counted.
    """
    spec = spec or tree.spec or NO_CONSTRAINTS
    s = _Synthesizer(tree, spec, compact, max_covers, max_intersect)
    if tree.root_violation:
        log.warning("initial belief violates the stipulation; no solutions")
        root_entries = []
    else:
        root_entries = s.run(tree.root)
    root_entries = sorted(root_entries, key=lambda e: Cover.from_masks(s.index, *e).key())
    return SolutionSet(tree, spec, s.index, root_entries, s.witness, compact)


def extract_plan(solution: SolutionSet, cover: Cover) -> Plan:
    """Build a plan that solves the problem under ``cover``.

    ``cover`` may be any cover in the closure of a root cover: it must
    contain that root cover's domain and project into it.  Observation
    edges of the plan carry 1-based reading indices into ``cover``'s
    canonical block order.
    """
    cover = cover.normalized()
    root = solution.find_root(cover)
    if root is None:
        raise NotASolutionError(f"{cover!r} is not covered by any solution")
    idx = solution.index
    blocks = [idx.mask(b) for b in cover.indexed()]
    world = solution.tree.problem.world
    ids = {}
    kinds = {}
    beliefs = {}
    edges = []
    term = set()
    stack = []

    def vid(node, entry):
        key = (node.id, entry)
        if key not in ids:
            ids[key] = len(ids)
            kinds[ids[key]] = node.kind
            beliefs[ids[key]] = node.states
            stack.append((node, entry))
        return ids[key]

    vid(solution.tree.root, root)
    while stack:
        node, entry = stack.pop()
        me = ids[(node.id, entry)]
        w = solution.witness.get((node.id, entry))
        if w is None:
            raise NotASolutionError(f"missing witness for vertex {node.id}")
        if w[0] == "goal":
            term.add(me)
        elif w[0] == "action":
            _, label, child = w
            edges.append(Edge(me, vid(child, entry), label))
        else:
            yp = idx.mask(node.events)
            by_label = {idx.mask(g): (child, ce) for g, child, ce in w[1]}
            groups = {}
            for i, b in enumerate(blocks, start=1):
                t = b & yp
                if t:
                    groups.setdefault(t, set()).add(i)
            for t in sorted(groups, key=_masks.block_order):
                if t not in by_label:
                    raise NotASolutionError(f"reading trace {sorted_symbols(idx.items(t))} has no branch")
                child, ce = by_label[t]
                edges.append(Edge(me, vid(child, ce), frozenset(groups[t])))
    graph = PGraph(kinds, edges, [0], world.actions, range(1, len(blocks) + 1))
    return Plan(graph, term, beliefs)
