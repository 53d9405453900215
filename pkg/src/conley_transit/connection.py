"""Connection matrix validation, recognition and desk-scale enumeration.

A connection matrix candidate is a strictly upper triangular degree-1
boundary map on a poset-graded direct sum.  Recognition against a target
braid searches for a degree-0 braid isomorphism witness; enumeration
walks every strictly triangular assignment over a finite field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .budget import resolve_budget
from .braid import (BraidMorphism, HomologyBraid, ModuleBraid, PairMaps,
                    build_homology_braid, verify_braid_morphism)
from .errors import SearchBudgetExceeded, ShapeMismatch
from .fields import FieldSpec
from .graded import BlockGradedMap, GradedMap, GradedSpace
from .matrices import Matrix, gl_matrices
from .posets import Interval, Poset, union_interval


@dataclass(frozen=True)
class ConnectionCandidate:
    """Boundary-map candidate: strictly triangular, degree 1, squares to zero."""

    delta: BlockGradedMap

    @property
    def poset(self) -> Poset:
        return self.delta.poset

    @property
    def spaces(self) -> tuple[GradedSpace, ...]:
        return self.delta.source

    def __post_init__(self):
        if self.delta.source != self.delta.target:
            raise ShapeMismatch("a boundary map must be an endomap")


def validate(cand: ConnectionCandidate | BlockGradedMap) -> bool:
    """Strict upper triangularity, degree 1, and square zero."""
    delta = cand.delta if isinstance(cand, ConnectionCandidate) else cand
    if delta.source != delta.target:
        raise ShapeMismatch("a boundary map must be an endomap")
    if delta.degree != 1:
        return False
    if not delta.is_upper_triangular(strict=True):
        return False
    return delta.compose(delta).is_zero()


@dataclass(frozen=True)
class CMVerdict:
    ok: bool
    witness: BraidMorphism | None
    strong_clause: bool
    reason: str

    def to_json(self):
        return {"is_connection_matrix": self.ok,
                "per_element_dims_match": self.strong_clause,
                "reason": self.reason}


def _dims_match(hb: HomologyBraid, target: ModuleBraid) -> bool:
    return all(hb.space(I) == target.space(I)
               for I in hb.poset.intervals() if I)


def _strong_clause(hb: HomologyBraid, target: ModuleBraid) -> bool:
    """C(p) isomorphic to G({p}) for each p: dimension equality over a field."""
    return all(hb.delta.source[p] == target.space((p,))
               for p in range(hb.poset.n))


def iso_candidates(fld: FieldSpec, src: GradedSpace, tgt: GradedSpace):
    """All degree-0 isomorphisms src -> tgt over a finite field."""
    if src != tgt and dict(src.dims) != dict(tgt.dims):
        return
    degs = src.degrees()
    pools = [gl_matrices(fld, src.dim(k)) for k in degs]
    for combo in itertools.product(*pools):
        yield GradedMap.build(fld, src, tgt, 0, dict(zip(degs, combo)))


def _pair_squares_ok(src: PairMaps, tgt: PairMaps, f_i: GradedMap, f_ij: GradedMap,
                     f_j: GradedMap) -> bool:
    if not tgt.incl.compose(f_i).sub(f_ij.compose(src.incl)).is_zero():
        return False
    if not tgt.proj.compose(f_ij).sub(f_j.compose(src.proj)).is_zero():
        return False
    return tgt.connect.compose(f_j).sub(f_i.compose(src.connect)).is_zero()


def search_braid_isomorphism(src: HomologyBraid, target: ModuleBraid,
                             budget: int | None = None) -> BraidMorphism | None:
    """Backtracking search for a degree-0 braid isomorphism src -> target.

    Intervals are assigned small-to-large; each assignment is filtered by
    every ladder square whose three intervals are already assigned.
    Finite fields only.
    """
    fld = src.field
    if not fld.is_finite:
        raise ShapeMismatch("witness search requires a finite field")
    budget = resolve_budget(budget)
    intervals = [I for I in src.poset.intervals() if I]
    for I in intervals:
        if dict(src.space(I).dims) != dict(target.space(I).dims):
            return None
    position = {I: n for n, I in enumerate(intervals)}
    # pairs checkable once interval at position n is assigned
    ready_at: dict[int, list] = {n: [] for n in range(len(intervals))}
    for (I, J) in src.poset.adjacent_pairs():
        IJ = union_interval(I, J)
        n = max(position[I], position[J], position[IJ])
        ready_at[n].append((I, J, IJ))
    assigned: dict[Interval, GradedMap] = {}
    spent = 0

    def backtrack(n: int):
        nonlocal spent
        if n == len(intervals):
            return dict(assigned)
        I = intervals[n]
        for cand in iso_candidates(fld, src.space(I), target.space(I)):
            spent += 1
            if spent > budget:
                raise SearchBudgetExceeded("braid isomorphism search", budget)
            assigned[I] = cand
            ok = all(_pair_squares_ok(src.braid.pair(A, B), target.pair(A, B),
                                      assigned[A], assigned[U], assigned[B])
                     for (A, B, U) in ready_at[n])
            if ok:
                found = backtrack(n + 1)
                if found is not None:
                    return found
            del assigned[I]
        return None

    found = backtrack(0)
    if found is None:
        return None
    return BraidMorphism.build(src.braid, target, 0, found)


def is_connection_matrix(cand: ConnectionCandidate | BlockGradedMap, target: ModuleBraid,
                         phi: BraidMorphism | None = None,
                         budget: int | None = None) -> CMVerdict:
    """Whether the candidate generates a braid isomorphic to the target.

    With phi supplied the witness is verified; otherwise a brute-force
    search runs over the finite field.  The strong clause reports whether
    the chain spaces match the target's singleton spaces dimensionwise.
    """
    delta = cand.delta if isinstance(cand, ConnectionCandidate) else cand
    if not validate(delta):
        return CMVerdict(False, None, False, "candidate fails triangularity or square-zero")
    hb = build_homology_braid(delta)
    strong = _strong_clause(hb, target)
    if phi is not None:
        if phi.source != hb.braid or phi.target != target:
            return CMVerdict(False, None, strong, "witness relates different braids")
        if not phi.is_isomorphism() or phi.degree != 0:
            return CMVerdict(False, None, strong, "witness is not a degree-0 isomorphism")
        if not verify_braid_morphism(phi):
            return CMVerdict(False, None, strong, "witness ladders do not commute")
        return CMVerdict(True, phi, strong, "verified witness")
    if not _dims_match(hb, target):
        return CMVerdict(False, None, strong, "homology dimensions differ")
    witness = search_braid_isomorphism(hb, target, budget)
    if witness is None:
        return CMVerdict(False, None, strong, "no braid isomorphism exists")
    return CMVerdict(True, witness, strong, "witness found by search")


def free_entry_slots(poset: Poset, spaces: Sequence[GradedSpace]) -> list[tuple[int, int, int, int, int]]:
    """Scalar slots (q, p, k, i, j) of a strictly triangular degree-1 map."""
    slots = []
    for q in range(poset.n):
        for p in range(poset.n):
            if not poset.less(q, p):
                continue
            for k in spaces[p].degrees():
                rows, cols = spaces[q].dim(k - 1), spaces[p].dim(k)
                for i in range(rows):
                    for j in range(cols):
                        slots.append((q, p, k, i, j))
    return slots


def block_map_from_slots(fld: FieldSpec, poset: Poset, spaces: Sequence[GradedSpace],
                         slots, values, degree: int = 1,
                         target: Sequence[GradedSpace] | None = None) -> BlockGradedMap:
    target = tuple(target) if target is not None else tuple(spaces)
    grids: dict[tuple[int, int], dict[int, list[list]]] = {}
    for (q, p, k, i, j), v in zip(slots, values):
        grid = grids.setdefault((q, p), {}).setdefault(
            k, [[fld.zero] * spaces[p].dim(k) for _ in range(target[q].dim(k - degree))])
        grid[i][j] = fld.coerce(v)
    entries = {}
    for (q, p), blocks in grids.items():
        entries[(q, p)] = GradedMap.build(fld, spaces[p], target[q], degree,
                                          {k: Matrix.from_rows(fld, g) for k, g in blocks.items()})
    return BlockGradedMap.build(fld, poset, spaces, target, degree, entries)


def enumerate_connection_matrices(spaces: Sequence[GradedSpace], target: ModuleBraid,
                                  poset: Poset, fld: FieldSpec,
                                  budget: int | None = None) -> list[BlockGradedMap]:
    """All connection matrices of the target braid, in lexicographic order
    of their entry vectors."""
    if not fld.is_finite:
        raise ShapeMismatch("enumeration requires a finite field")
    budget = resolve_budget(budget)
    spaces = tuple(spaces)
    slots = free_entry_slots(poset, spaces)
    total = len(list(fld.elements())) ** len(slots)
    if total > budget:
        raise SearchBudgetExceeded(
            f"candidate space {total} exceeds budget", budget)
    found = []
    for values in itertools.product(fld.elements(), repeat=len(slots)):
        delta = block_map_from_slots(fld, poset, spaces, slots, values)
        if not delta.compose(delta).is_zero():
            continue
        verdict = is_connection_matrix(delta, target, budget=budget)
        if verdict.ok:
            found.append(delta)
    return found
