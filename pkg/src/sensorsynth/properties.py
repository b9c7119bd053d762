"""Fabrication constraints on covers.

Per-block properties (contiguity, width) can prune the observation subsets
generated during search; global properties (partition, output count,
overlap) only make sense on whole covers and are applied as filters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Hashable, Iterable

from .cover import Cover
from .errors import InputError, SpecificationError
from .pgraph import sort_key, sorted_symbols


class NeighborRelation:
    """Reflexive, symmetric relation over observations.

    Only distinct pairs need to be supplied; reflexive pairs are implied for
    every symbol in ``carrier`` (which defaults to the symbols in ``pairs``).
    """

    def __init__(self, pairs: Iterable[tuple[Hashable, Hashable]] = (), carrier: Iterable[Hashable] = ()):
        adj = {}
        for y in carrier:
            adj.setdefault(y, {y})
        for a, b in pairs:
            adj.setdefault(a, {a}).add(b)
            adj.setdefault(b, {b}).add(a)
        self._adj = {y: frozenset(ns) for y, ns in adj.items()}

    @classmethod
    def circular(cls, symbols):
        symbols = list(symbols)
        n = len(symbols)
        return cls(((symbols[i], symbols[(i + 1) % n]) for i in range(n)), carrier=symbols)

    @classmethod
    def chain(cls, symbols):
        symbols = list(symbols)
        return cls(zip(symbols, symbols[1:]), carrier=symbols)

    @property
    def carrier(self) -> frozenset:
        return frozenset(self._adj)

    def neighbors(self, y) -> frozenset:
        return self._adj.get(y, frozenset())

    def related(self, a, b) -> bool:
        return b in self._adj.get(a, ())

    def pairs(self):
        """Distinct unordered pairs, sorted."""
        out = set()
        for a, ns in self._adj.items():
            for b in ns:
                if a != b:
                    out.add(tuple(sorted_symbols((a, b))))
        return sorted(out, key=lambda p: [sort_key(s) for s in p])

    def connected(self, block) -> bool:
        block = set(block)
        if not block:
            return False
        start = next(iter(block))
        seen = {start}
        stack = [start]
        while stack:
            y = stack.pop()
            for z in self._adj.get(y, ()):
                if z in block and z not in seen:
                    seen.add(z)
                    stack.append(z)
        return seen == block

    def __eq__(self, other):
        return isinstance(other, NeighborRelation) and self._adj == other._adj

    def __hash__(self):
        return hash(frozenset(self._adj.items()))

    def __repr__(self):
        return f"NeighborRelation({self.pairs()})"


@dataclass(frozen=True)
class ConstraintSpec:
    """Conjunction of cover properties.

    ``wide=k`` means every block has exactly ``k`` members, or at most ``k``
    when ``max_width`` is set.
    """

    partition: bool = False
    contiguous: bool = False
    neighbor: NeighborRelation | None = None
    outputting: int | None = None
    overlapping: int | None = None
    wide: int | None = None
    max_width: bool = False

    def __post_init__(self):
        for name in ("outputting", "overlapping", "wide"):
            k = getattr(self, name)
            if k is not None and (not isinstance(k, int) or k < 1):
                raise SpecificationError(f"{name} must be an integer >= 1, got {k!r}")

    @property
    def has_block_constraints(self) -> bool:
        return self.contiguous or self.wide is not None

    @property
    def has_global_constraints(self) -> bool:
        return self.partition or self.outputting is not None or self.overlapping is not None

    def block_ok(self, block) -> bool:
        if self.wide is not None:
            if len(block) > self.wide or (not self.max_width and len(block) != self.wide):
                return False
        if self.contiguous:
            return self._require_neighbor().connected(block)
        return True

    def _require_neighbor(self):
        if self.neighbor is None:
            raise SpecificationError("contiguity requested without a neighbor relation")
        return self.neighbor


NO_CONSTRAINTS = ConstraintSpec()


@dataclass(frozen=True)
class PropertyResult:
    ok: bool
    witness: tuple = ()


@dataclass
class PropertyReport:
    results: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    def __getitem__(self, name):
        return self.results[name]

    def failures(self):
        return {k: r for k, r in self.results.items() if not r.ok}


def check(cover: Cover, spec: ConstraintSpec) -> PropertyReport:
    """Evaluate every property requested by ``spec`` on ``cover``."""
    report = PropertyReport()
    blocks = cover.indexed()
    pairs = list(combinations(blocks, 2))
    if spec.partition:
        bad = next(((a, b) for a, b in pairs if a & b), None)
        report.results["partition"] = PropertyResult(bad is None, bad or ())
    if spec.contiguous:
        nb = spec._require_neighbor()
        outside = cover.domain - nb.carrier
        if outside:
            raise SpecificationError(f"observations outside the neighbor relation: {sorted_symbols(outside)}")
        bad = next((b for b in blocks if not nb.connected(b)), None)
        report.results["contiguous"] = PropertyResult(bad is None, (bad,) if bad else ())
    if spec.outputting is not None:
        report.results["outputting"] = PropertyResult(len(blocks) == spec.outputting, (len(blocks),))
    if spec.overlapping is not None:
        bad = next(((a, b) for a, b in pairs if len(a & b) > spec.overlapping), None)
        report.results["overlapping"] = PropertyResult(bad is None, bad or ())
    if spec.wide is not None:
        if spec.max_width:
            bad = next((b for b in blocks if len(b) > spec.wide), None)
        else:
            bad = next((b for b in blocks if len(b) != spec.wide), None)
        report.results["wide"] = PropertyResult(bad is None, (bad,) if bad else ())
    return report


def _nonempty_subsets(domain):
    items = sorted_symbols(domain)
    for r in range(1, len(items) + 1):
        for combo in combinations(items, r):
            yield frozenset(combo)


def generate_blocks(domain, spec: ConstraintSpec = NO_CONSTRAINTS) -> list[frozenset]:
    """Non-empty subsets of ``domain`` satisfying the per-block constraints."""
    domain = frozenset(domain)
    if spec.contiguous:
        nb = spec._require_neighbor()
        outside = domain - nb.carrier
        if outside:
            raise SpecificationError(f"observations outside the neighbor relation: {sorted_symbols(outside)}")
    return [b for b in _nonempty_subsets(domain) if spec.block_ok(b)]


@lru_cache(maxsize=4096)
def _traces(domain, spec, universe):
    full = generate_blocks(universe, spec)
    return frozenset(b & domain for b in full if b & domain)


def block_traces(domain, spec: ConstraintSpec, universe) -> frozenset:
    """Restrictions to ``domain`` of admissible blocks over ``universe``.

    A cover over ``universe`` whose blocks satisfy the per-block constraints
    can only ever present these subsets when observed at a state whose
    observations are ``domain``.
    """
    domain = frozenset(domain)
    if not spec.has_block_constraints:
        return frozenset(_nonempty_subsets(domain))
    return _traces(domain, spec, frozenset(universe))


def discretize_partition(boundaries, cells, names=None) -> Cover:
    """Cover over discretization cells induced by a noiseless 1-D sensor.

    ``boundaries`` are increasing cut points ``b0 < b1 < ... < bn``; reading
    ``i`` is produced on ``[b_{i-1}, b_i)``.  ``cells`` are ``(lo, hi)``
    intervals that must tile ``[b0, bn)`` in order.  A cell joins block
    ``i`` when it overlaps reading ``i``'s interval with positive length.
    """
    bounds = [float(b) for b in boundaries]
    if len(bounds) < 2 or any(b >= c for b, c in zip(bounds, bounds[1:])):
        raise InputError("boundaries must be at least two strictly increasing cut points")
    cells = [(float(lo), float(hi)) for lo, hi in cells]
    if not cells:
        raise InputError("no cells given")
    if names is None:
        names = [f"c{i}" for i in range(1, len(cells) + 1)]
    if len(names) != len(cells):
        raise InputError("one name per cell required")
    if cells[0][0] != bounds[0] or cells[-1][1] != bounds[-1]:
        raise InputError("cells do not span the measurement space")
    for (lo, hi), nxt in zip(cells, cells[1:] + [None]):
        if lo >= hi:
            raise InputError(f"empty cell [{lo}, {hi})")
        if nxt is not None and nxt[0] != hi:
            raise InputError(f"cells not contiguous at {hi}")
    blocks = []
    for lo, hi in zip(bounds, bounds[1:]):
        blocks.append({n for n, (a, b) in zip(names, cells) if min(b, hi) > max(a, lo)})
    return Cover(blocks)
