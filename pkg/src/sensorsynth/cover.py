"""Observation covers and their algebra.

A :class:`Cover` is a set of non-empty observation subsets; it is the
canonical representation of a sensor map.  This module provides the
projection and intersection (``⋒``) operations on covers and lists of
covers, maximal-element compaction, and conversion to and from
reading-valued sensor maps.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping

from . import _masks
from .errors import CoverError, ResourceError
from .pgraph import sort_key, sorted_symbols

#: Reserved symbol marking "no constraint" at goal leaves.
EPSILON = "ε"


def block_key(block):
    return (len(block), [sort_key(y) for y in sorted_symbols(block)])


class Cover:
    """An immutable set of non-empty observation blocks.

    Equality and hashing are by block set.  Iteration yields blocks in
    canonical order: by size, then lexicographically by sorted members.
    """

    __slots__ = ("_blocks", "_domain", "_order")

    def __init__(self, blocks: Iterable[Iterable[Hashable]] = ()):
        bs = frozenset(frozenset(b) for b in blocks)
        if frozenset() in bs:
            raise CoverError("covers cannot contain the empty block")
        self._blocks = bs
        self._domain = frozenset().union(*bs) if bs else frozenset()
        self._order = None

    @property
    def blocks(self) -> frozenset:
        return self._blocks

    @property
    def domain(self) -> frozenset:
        return self._domain

    def indexed(self) -> tuple:
        """Blocks in canonical order; reading ``i`` names ``indexed()[i-1]``."""
        if self._order is None:
            self._order = tuple(sorted(self._blocks, key=block_key))
        return self._order

    def key(self):
        return (
            len(self._domain),
            [sort_key(y) for y in sorted_symbols(self._domain)],
            len(self._blocks),
            [block_key(b) for b in self.indexed()],
        )

    def normalized(self) -> "Cover":
        """Strip :data:`EPSILON` from every block, dropping blocks left empty."""
        if EPSILON not in self._domain:
            return self
        return Cover(b - {EPSILON} for b in self._blocks if b - {EPSILON})

    def __iter__(self):
        return iter(self.indexed())

    def __len__(self):
        return len(self._blocks)

    def __contains__(self, block):
        return frozenset(block) in self._blocks

    def __eq__(self, other):
        if not isinstance(other, Cover):
            return NotImplemented
        return self._blocks == other._blocks

    def __hash__(self):
        return hash(self._blocks)

    def __le__(self, other):
        return self._blocks <= other._blocks

    def __lt__(self, other):
        return self._blocks < other._blocks

    def __ge__(self, other):
        return self._blocks >= other._blocks

    def __gt__(self, other):
        return self._blocks > other._blocks

    def __repr__(self):
        inner = ", ".join("{" + ", ".join(map(str, sorted_symbols(b))) + "}" for b in self.indexed())
        return f"Cover([{inner}])"

    # mask conversion
    def to_masks(self, index):
        return index.mask(self._domain), frozenset(index.mask(b) for b in self._blocks)

    @classmethod
    def from_masks(cls, index, domain, blocks):
        c = cls(index.items(b) for b in blocks)
        if c.domain != index.items(domain):
            raise CoverError("blocks do not cover the stated domain")
        return c


EMPTY = Cover()
EPSILON_COVER = Cover([[EPSILON]])


def canonical(covers: Iterable[Cover]) -> list[Cover]:
    """Deduplicate and sort covers into canonical list order."""
    return sorted(set(covers), key=Cover.key)


def project(cover: Cover, domain) -> Cover:
    """Restrict every block to ``domain``; empty restrictions are dropped."""
    domain = frozenset(domain)
    return Cover(b & domain for b in cover.blocks if b & domain)


def _identity_case(c1, c2):
    if not c2.domain:
        return c1
    if not c1.domain:
        return c2
    return None


def intersect_upper(c1: Cover, c2: Cover) -> Cover | None:
    """The largest member of ``intersect(c1, c2)``, or ``None`` if incompatible.

    The intersection is closed under taking equal-domain subcovers, so it
    is exactly the set of covering subsets of this maximum.
    """
    c1, c2 = c1.normalized(), c2.normalized()
    ident = _identity_case(c1, c2)
    if ident is not None:
        return ident
    index = _masks.Index(c1.domain | c2.domain)
    d1, a1 = c1.to_masks(index)
    d2, a2 = c2.to_masks(index)
    d, a = _masks.max_intersect(d1, a1, d2, a2)
    if _masks.union(a) != d:
        return None
    return Cover.from_masks(index, d, a)


def intersect(c1: Cover, c2: Cover, budget: int | None = None) -> list[Cover]:
    """All covers ``C'`` over the union domain whose projections onto each
    operand's domain are subsets of that operand.

    The ε cover (and the empty cover it normalizes to) is the identity.
    ``budget`` caps the number of result covers; exceeding it raises
    :class:`ResourceError`.
    """
    c1, c2 = c1.normalized(), c2.normalized()
    ident = _identity_case(c1, c2)
    if ident is not None:
        return [ident]
    top = intersect_upper(c1, c2)
    if top is None:
        return []
    index = _masks.Index(top.domain)
    d, a = top.to_masks(index)
    out = [Cover.from_masks(index, d, bs) for bs in _masks.covering_subsets(d, a, budget)]
    return canonical(out)


def compatible(c1: Cover, c2: Cover) -> bool:
    return intersect_upper(c1, c2) is not None


def intersect_lists(l1: Iterable[Cover], l2: Iterable[Cover], budget: int | None = None) -> list[Cover]:
    """Union of pairwise intersections of two cover lists."""
    l2 = list(l2)
    out = set()
    for c1 in l1:
        for c2 in l2:
            out.update(intersect(c1, c2, budget))
            if budget is not None and len(out) > budget:
                raise ResourceError("max_intersect_results", budget)
    return canonical(out)


def upper_covers(covers: Iterable[Cover]) -> list[Cover]:
    """Keep the covers not strictly contained in a same-domain cover of the list."""
    covers = list(dict.fromkeys(covers))
    by_domain = {}
    for c in covers:
        by_domain.setdefault(c.domain, []).append(c)
    keep = set()
    for group in by_domain.values():
        ranked = sorted(group, key=len, reverse=True)
        maxima = []
        for c in ranked:
            if not any(c < m for m in maxima):
                maxima.append(c)
        keep.update(maxima)
    return canonical(keep)


def from_sensor_map(h: Mapping[Hashable, Iterable[Hashable]]) -> Cover:
    """Cover of preimages of a sensor map ``observation -> readings``.

    Readings sharing a preimage collapse into one block.
    """
    preimage = {}
    for y, xs in h.items():
        xs = frozenset(xs)
        if not xs:
            raise CoverError(f"observation {y!r} has an empty image")
        for x in xs:
            preimage.setdefault(x, set()).add(y)
    return Cover(preimage.values())


def to_sensor_map(cover: Cover) -> dict:
    """Sensor map with readings ``1..k`` indexing the canonical block order."""
    h = {}
    for i, block in enumerate(cover.indexed(), start=1):
        for y in block:
            h.setdefault(y, set()).add(i)
    return {y: frozenset(xs) for y, xs in h.items()}
