"""Bitmask kernel for covers.

Observation symbols are interned as bit positions of an ``Index``; a block
is an ``int`` mask and a cover is ``(domain_mask, frozenset_of_masks)``.
Everything here is private plumbing for :mod:`cover` and :mod:`synth`.
"""

from __future__ import annotations

from itertools import combinations

from .errors import ResourceError
from .pgraph import sorted_symbols


class Index:
    def __init__(self, symbols):
        self.symbols = tuple(sorted_symbols(set(symbols)))
        self.bit = {s: 1 << i for i, s in enumerate(self.symbols)}
        self.full = (1 << len(self.symbols)) - 1

    def __len__(self):
        return len(self.symbols)

    def mask(self, items):
        m = 0
        for s in items:
            m |= self.bit[s]
        return m

    def items(self, mask):
        return frozenset(s for i, s in enumerate(self.symbols) if mask >> i & 1)


def block_order(mask):
    return (mask.bit_count(), mask)


def submasks(mask):
    """Non-empty submasks of ``mask`` in (size, value) order."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = []
    for r in range(1, len(bits) + 1):
        for combo in combinations(bits, r):
            out.append(sum(combo))
    return out


def union(blocks):
    u = 0
    for b in blocks:
        u |= b
    return u


def max_intersect(d1, a1, d2, a2):
    """Largest block set over ``d1 | d2`` admissible for both operands.

    A block ``B`` is admissible when ``B & d1`` is empty or in ``a1`` and
    ``B & d2`` is empty or in ``a2``.  Every cover in the intersection of
    the operands is a subset of this set; the set is itself in the
    intersection iff it covers the union domain.
    """
    by_trace = {}
    for c in a2:
        by_trace.setdefault(c & d1, []).append(c)
    by_trace.setdefault(0, []).append(0)
    out = set()
    for a in a1:
        for c in by_trace.get(a & d2, ()):
            out.add(a | c)
    for c in by_trace.get(0, ()):
        if c:
            out.add(c)
    return d1 | d2, frozenset(out)


def covering_subsets(domain, blocks, budget=None):
    """Yield every subset of ``blocks`` whose union equals ``domain``."""
    blocks = sorted(blocks, key=block_order)
    n = len(blocks)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | blocks[i]
    if suffix[0] & domain != domain:
        return
    count = 0
    chosen = []

    def rec(i, covered):
        nonlocal count
        if i == n:
            if covered == domain:
                count += 1
                if budget is not None and count > budget:
                    raise ResourceError("max_intersect_results", budget)
                yield frozenset(chosen)
            return
        if (covered | suffix[i]) & domain != domain:
            return
        chosen.append(blocks[i])
        yield from rec(i + 1, covered | blocks[i])
        chosen.pop()
        yield from rec(i + 1, covered)

    yield from rec(0, 0)


def upper(entries):
    """Keep entries ``(d, blocks)`` not strictly contained in a same-domain entry.

    Input order is preserved among survivors; duplicates collapse to the
    first occurrence.
    """
    seen = {}
    for d, bs in entries:
        seen.setdefault((d, bs), None)
    groups = {}
    for d, bs in seen:
        groups.setdefault(d, []).append(bs)
    keep = set()
    for d, group in groups.items():
        ranked = sorted(group, key=len, reverse=True)
        maxima = []
        for bs in ranked:
            if not any(len(m) > len(bs) and bs < m for m in maxima):
                maxima.append(bs)
        keep.update((d, m) for m in maxima)
    return [e for e in seen if e in keep]
