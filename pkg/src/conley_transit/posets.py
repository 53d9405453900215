"""Finite strict partial orders and their interval calculus.

Elements are integers 0..n-1.  Intervals are represented as sorted tuples
of elements; the empty interval is ().  All enumeration orders are
deterministic: subsets sort by (size, lexicographic members).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import CycleDetected, DegreeNotConcentrated

Interval = tuple[int, ...]


@dataclass(frozen=True)
class Poset:
    n: int
    lt: frozenset[tuple[int, int]]
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))

    def less(self, a: int, b: int) -> bool:
        return (a, b) in self.lt

    def leq(self, a: int, b: int) -> bool:
        return a == b or (a, b) in self.lt

    def comparable(self, a: int, b: int) -> bool:
        return (a, b) in self.lt or (b, a) in self.lt

    def elements(self) -> range:
        return range(self.n)

    def is_interval(self, members) -> bool:
        s = set(members)
        for p in s:
            for q in s:
                if (p, q) in self.lt:
                    for r in range(self.n):
                        if r not in s and (p, r) in self.lt and (r, q) in self.lt:
                            return False
        return True

    def intervals(self) -> tuple[Interval, ...]:
        return _intervals(self)

    def is_adjacent_tuple(self, parts: tuple[Interval, ...]) -> bool:
        """Ordered disjoint nonempty intervals, union an interval, later
        parts never below earlier ones."""
        if any(len(part) == 0 for part in parts):
            return False
        seen: set[int] = set()
        for part in parts:
            ps = set(part)
            if ps & seen or not self.is_interval(part):
                return False
            seen |= ps
        if not self.is_interval(tuple(sorted(seen))):
            return False
        for j in range(len(parts)):
            for k in range(j + 1, len(parts)):
                for pi in parts[j]:
                    for pk in parts[k]:
                        if (pk, pi) in self.lt:
                            return False
        return True

    def adjacent_pairs(self) -> tuple[tuple[Interval, Interval], ...]:
        return _adjacent_pairs(self)

    def adjacent_triples(self) -> tuple[tuple[Interval, Interval, Interval], ...]:
        return _adjacent_triples(self)

    def noncomparable_intervals(self, I: Interval, J: Interval) -> bool:
        return not any(self.comparable(p, q) for p in I for q in J)

    def linear_extension(self) -> tuple[int, ...]:
        """Smallest-element-first topological order."""
        placed: list[int] = []
        remaining = set(range(self.n))
        while remaining:
            ready = sorted(p for p in remaining
                           if all(q not in remaining for q in range(self.n) if (q, p) in self.lt))
            placed.append(ready[0])
            remaining.remove(ready[0])
        return tuple(placed)

    def covers(self) -> list[tuple[int, int]]:
        """Transitive reduction, for serialization."""
        out = []
        for (a, b) in sorted(self.lt):
            if not any((a, m) in self.lt and (m, b) in self.lt for m in range(self.n)):
                out.append((a, b))
        return out

    def restricted_to(self, members: Interval) -> "Poset":
        """Order restricted to a subset, elements renumbered in sorted order."""
        idx = {p: i for i, p in enumerate(members)}
        rel = frozenset((idx[a], idx[b]) for (a, b) in self.lt if a in idx and b in idx)
        return Poset(len(members), rel, tuple(self.labels[p] for p in members))

    def is_total(self) -> bool:
        return all(self.comparable(a, b) for a in range(self.n) for b in range(a + 1, self.n))

    def is_trivial_order(self) -> bool:
        return not self.lt


@dataclass(frozen=True)
class StackDecomposition:
    """Ordered partition into trivially ordered blocks, each block totally
    greater than its predecessors."""

    blocks: tuple[Interval, ...]


def close_and_validate(cover_relation, n: int, labels=()) -> Poset:
    """Transitive closure of the given strict relation; rejects cycles."""
    rel = set()
    for (a, b) in cover_relation:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair ({a},{b}) out of range for n={n}")
        rel.add((a, b))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    for a in range(n):
        if (a, a) in rel:
            raise CycleDetected(f"element {a} is below itself after closure")
    return Poset(n, frozenset(rel), tuple(labels))


@lru_cache(maxsize=None)
def _intervals(P: Poset) -> tuple[Interval, ...]:
    found = [s for r in range(P.n + 1)
             for s in itertools.combinations(range(P.n), r)
             if P.is_interval(s)]
    found.sort(key=lambda s: (len(s), s))
    return tuple(found)


@lru_cache(maxsize=None)
def _adjacent_pairs(P: Poset):
    out = []
    for I in _intervals(P):
        if not I:
            continue
        for J in _intervals(P):
            if not J:
                continue
            if P.is_adjacent_tuple((I, J)):
                out.append((I, J))
    return tuple(out)


@lru_cache(maxsize=None)
def _adjacent_triples(P: Poset):
    out = []
    nonempty = [I for I in _intervals(P) if I]
    for I in nonempty:
        for J in nonempty:
            if set(I) & set(J):
                continue
            if not P.is_adjacent_tuple((I, J)):
                continue
            for K in nonempty:
                if (set(I) | set(J)) & set(K):
                    continue
                if P.is_adjacent_tuple((I, J, K)):
                    out.append((I, J, K))
    return tuple(out)


def union_interval(I: Interval, J: Interval) -> Interval:
    return tuple(sorted(set(I) | set(J)))


def find_stack(P: Poset) -> StackDecomposition | None:
    """Most-blocks stack decomposition, or None.

    Exhaustive over ordered set partitions; ties broken by the
    lexicographically smallest block sequence.
    """
    elems = list(range(P.n))
    best: tuple[Interval, ...] | None = None

    def blocks_valid(blocks: list[tuple[int, ...]]) -> bool:
        for bi, block in enumerate(blocks):
            for a in block:
                for b in block:
                    if (a, b) in P.lt:
                        return False
            for later in blocks[bi + 1:]:
                for a in block:
                    for b in later:
                        if (a, b) not in P.lt:
                            return False
        return True

    for blocks in _ordered_partitions(elems):
        if blocks_valid(blocks):
            cand = tuple(tuple(sorted(b)) for b in blocks)
            if best is None or _stack_better(cand, best):
                best = cand
    if best is None:
        return None
    return StackDecomposition(best)


def _stack_better(cand, best) -> bool:
    if len(cand) != len(best):
        return len(cand) > len(best)
    return cand < best


def _ordered_partitions(elems: list[int]):
    """All ordered partitions of elems into nonempty blocks."""
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for blocks in _ordered_partitions(rest):
        for i in range(len(blocks)):
            yield blocks[:i] + [blocks[i] + (first,)] + blocks[i + 1:]
        for i in range(len(blocks) + 1):
            yield blocks[:i] + [(first,)] + blocks[i:]


def order_k(concentrations: dict[int, int | None], n: int, labels=()) -> Poset:
    """Order by concentration degree: p < p' iff k(p) < k(p').

    ``concentrations`` maps element -> its single nonzero degree, or None
    for an entirely zero space (incomparable to everything).
    """
    rel = set()
    for p in range(n):
        for q in range(n):
            kp, kq = concentrations.get(p), concentrations.get(q)
            if kp is not None and kq is not None and kp < kq:
                rel.add((p, q))
    return close_and_validate(rel, n, labels)


def concentration_degree(space) -> int | None:
    """The unique nonzero degree of a GradedSpace, None if zero."""
    degs = [k for k, d in space.items() if d > 0]
    if not degs:
        return None
    if len(degs) > 1:
        raise DegreeNotConcentrated(f"nonzero in degrees {sorted(degs)}")
    return degs[0]


def doubled_poset(P: Poset, order_minus: Poset, order_plus: Poset) -> Poset:
    """Poset on {p-, p+}: every minus below every plus, minus side ordered
    by order_minus, plus side by order_plus.

    Minus copies are elements 0..n-1, plus copies n..2n-1.
    """
    n = P.n
    if order_minus.n != n or order_plus.n != n:
        raise ValueError("orders must live on the same element set")
    rel = set()
    for q in range(n):
        for p in range(n):
            rel.add((q, n + p))
    for (q, p) in order_minus.lt:
        rel.add((q, p))
    for (q, p) in order_plus.lt:
        rel.add((n + q, n + p))
    labels = tuple(f"{P.labels[i]}-" for i in range(n)) + tuple(f"{P.labels[i]}+" for i in range(n))
    return close_and_validate(rel, 2 * n, labels)
