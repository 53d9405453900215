"""Directional transition matrices from slow-flow sign data.

Each element of the index set has a side-0 and a side-1 graded space; a
topological transition matrix maps the side-0 sum to the side-1 sum.
The block transforms A1/A2/A3 invert the part of the matrix above a
split, below it, or all of it, swapping the sides of the inverted slots.
Negative-sign slots get inverted; the bottom-up schedule is recorded in
the covered word, which is palindromic around a central F01 token.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ShapeMismatch, SingularDiagonalBlock
from .graded import BlockGradedMap, GradedMap, GradedSpace
from .matrices import Matrix
from .posets import Interval, Poset


@dataclass(frozen=True)
class SignAssignment:
    """Slow-flow direction per element: +1 or -1."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def parse(cls, text: str) -> "SignAssignment":
        tokens = [t.strip() for t in text.split(",") if t.strip()]
        if not tokens:
            raise ValueError("empty sign assignment")
        out = []
        for t in tokens:
            if t in ("+", "+1", "1"):
                out.append(1)
            elif t in ("-", "-1"):
                out.append(-1)
            else:
                raise ValueError(f"bad sign token {t!r}")
        return cls(tuple(out))

    def plus_part(self) -> tuple[int, ...]:
        return tuple(p for p, s in enumerate(self.signs) if s > 0)

    def minus_part(self) -> tuple[int, ...]:
        return tuple(p for p, s in enumerate(self.signs) if s < 0)


# -- entry-dict block algebra -------------------------------------------------
#
# The transforms juggle per-slot sides, so they work on plain dicts
# (q, p) -> GradedMap; BlockGradedMap types are restored at the end.


def _compose_entries(left: dict, right: dict) -> dict:
    out: dict = {}
    for (m, p), r in right.items():
        for (q, m2), l in left.items():
            if m2 != m:
                continue
            term = l.compose(r)
            key = (q, p)
            out[key] = out[key].add(term) if key in out else term
    return {k: v for k, v in out.items() if not v.is_zero()}


def _neg_entries(d: dict) -> dict:
    return {k: v.neg() for k, v in d.items()}


def _part_entries(M: BlockGradedMap, rows: Interval, cols: Interval) -> dict:
    return {key: gm for key, gm in M.entries if key[0] in rows and key[1] in cols}


def _invert_part(M: BlockGradedMap, part: Interval, name: str) -> dict:
    """Inverse of the part x part sub-block, as entries tgt -> src.

    Flattens over the part per degree, inverts exactly, and re-blocks;
    triangularity of the result is inherited from the input.
    """
    fld = M.field
    if not part:
        return {}
    sub = BlockGradedMap.build(fld, M.poset, M.source, M.target, M.degree,
                               _part_entries(M, part, part))
    flat = sub.to_graded_map(part)
    src_spaces = {p: M.target[p] for p in part}
    tgt_spaces = {p: M.source[p] for p in part}
    inv_blocks = {}
    degrees = sorted({k for p in part for k in M.source[p].degrees()}
                     | {k + M.degree for p in part for k in M.target[p].degrees()})
    for k in degrees:
        mat = flat.block(k)
        if mat.nrows != mat.ncols:
            raise SingularDiagonalBlock(f"{name} is not square at degree {k}")
        if not mat.nrows:
            continue
        if not mat.is_invertible():
            raise SingularDiagonalBlock(f"{name} is singular at degree {k}")
        inv_blocks[k - M.degree] = mat.inverse()
    entries = {}
    for q in part:
        for p in part:
            blocks = {}
            for k in src_spaces[p].degrees():
                rows = tgt_spaces[q].dim(k + M.degree)
                cols = src_spaces[p].dim(k)
                if not rows or not cols or k not in inv_blocks:
                    continue
                mat = inv_blocks[k]
                roff = _offset(tgt_spaces, part, k + M.degree, q)
                coff = _offset(src_spaces, part, k, p)
                blocks[k] = mat.submatrix(range(roff, roff + rows),
                                          range(coff, coff + cols))
            gm = GradedMap.build(fld, src_spaces[p], tgt_spaces[q], -M.degree, blocks)
            if not gm.is_zero():
                entries[(q, p)] = gm
    return entries


def _offset(spaces: dict, part: Interval, k: int, element: int) -> int:
    pos = 0
    for p in part:
        if p == element:
            return pos
        pos += spaces[p].dim(k)
    raise KeyError(element)


@dataclass(frozen=True)
class SplitBlockMatrix:
    """Upper triangular matrix split at an order-compatible boundary.

    With bottom part V-slots and top part W-slots the matrix reads
    [[X, Y], [0, Z]]: X = bottom x bottom, Z = top x top, Y the corner.
    """

    matrix: BlockGradedMap
    bottom: Interval
    top: Interval

    def __post_init__(self):
        P = self.matrix.poset
        if sorted(self.bottom + self.top) != list(range(P.n)):
            raise ShapeMismatch("split must partition the elements")
        for b in self.bottom:
            for t in self.top:
                if P.less(t, b):
                    raise ShapeMismatch("split is not order compatible")
        if not self.matrix.is_upper_triangular():
            raise ShapeMismatch("matrix is not upper triangular")
        if self.matrix.degree != 0:
            raise ShapeMismatch("block transforms act on degree-0 matrices")


def block_transform(split: SplitBlockMatrix, which: str) -> BlockGradedMap:
    """A1 = [[X, Y Z^-1], [0, Z^-1]], A2 = [[X^-1, -X^-1 Y], [0, Z]],
    A3 = [[X^-1, -X^-1 Y Z^-1], [0, Z^-1]].

    A transformed slot swaps its source and target spaces; signs are kept
    literally, so over F_2 the minus signs coincide with plus.
    """
    M = split.matrix
    fld, P = M.field, M.poset
    bottom, top = split.bottom, split.top
    x = _part_entries(M, bottom, bottom)
    y = _part_entries(M, bottom, top)
    z = _part_entries(M, top, top)
    src, tgt = M.source, M.target

    if which == "A1":
        z_inv = _invert_part(M, top, "Z")
        entries = dict(x)
        entries.update(_compose_entries(y, z_inv))
        entries.update(z_inv)
        new_src = tuple(src[p] if p in bottom else tgt[p] for p in range(P.n))
        new_tgt = tuple(tgt[p] if p in bottom else src[p] for p in range(P.n))
    elif which == "A2":
        x_inv = _invert_part(M, bottom, "X")
        entries = dict(z)
        entries.update(_neg_entries(_compose_entries(x_inv, y)))
        entries.update(x_inv)
        new_src = tuple(tgt[p] if p in bottom else src[p] for p in range(P.n))
        new_tgt = tuple(src[p] if p in bottom else tgt[p] for p in range(P.n))
    elif which == "A3":
        x_inv = _invert_part(M, bottom, "X")
        z_inv = _invert_part(M, top, "Z")
        entries = dict(x_inv)
        entries.update(_neg_entries(_compose_entries(x_inv, _compose_entries(y, z_inv))))
        entries.update(z_inv)
        new_src = tuple(tgt[p] for p in range(P.n))
        new_tgt = tuple(src[p] for p in range(P.n))
    else:
        raise ValueError(f"unknown transform {which!r}")
    return BlockGradedMap.build(fld, P, new_src, new_tgt, 0, entries)


# -- the directional matrix ---------------------------------------------------


@dataclass(frozen=True)
class TransformApplication:
    kind: str              # "A1" or "A3"
    bottom: Interval
    top: Interval


@dataclass(frozen=True)
class CoveredWord:
    """Tokens G_n ... G_1 F01 G_1 ... G_n naming the covered isomorphism."""

    tokens: tuple[str, ...]
    applications: tuple[TransformApplication, ...]

    @classmethod
    def of(cls, applications) -> "CoveredWord":
        apps = tuple(applications)
        n = len(apps)
        left = tuple(f"G{i}" for i in range(n, 0, -1))
        right = tuple(f"G{i}" for i in range(1, n + 1))
        return cls(left + ("F01",) + right, apps)

    @property
    def is_palindromic(self) -> bool:
        return self.tokens == tuple(reversed(self.tokens))

    def to_json(self):
        return {"tokens": list(self.tokens),
                "applications": [{"kind": a.kind, "bottom": list(a.bottom),
                                  "top": list(a.top)} for a in self.applications]}


def directional_matrix(T: BlockGradedMap, delta_signs: SignAssignment
                       ) -> tuple[BlockGradedMap, CoveredWord]:
    """Invert the negative-sign slots of T by a bottom-up transform chain.

    Requires a totally ordered index set (the box ordering).  All-plus
    signs return T unchanged; all-minus return the exact inverse via a
    single whole-matrix A3.
    """
    P = T.poset
    if len(delta_signs.signs) != P.n:
        raise ShapeMismatch("sign assignment does not match the poset")
    if not P.is_total():
        raise ShapeMismatch("directional construction expects a total box order")
    if not T.is_upper_triangular():
        raise ShapeMismatch("transition matrix is not upper triangular")

    order = P.linear_extension()
    runs = _sign_runs(order, delta_signs)
    current = T
    applications: list[TransformApplication] = []
    inverted_above = False
    for i, (block, sign) in enumerate(runs):
        want = sign < 0
        if want == inverted_above:
            continue
        below = tuple(sorted(x for blk, _ in runs[:i] for x in blk))
        above = tuple(sorted(x for blk, _ in runs[i:] for x in blk))
        kind = "A3" if not below else "A1"
        current = block_transform(SplitBlockMatrix(current, below, above), kind)
        applications.append(TransformApplication(kind, below, above))
        inverted_above = not inverted_above
    return current, CoveredWord.of(applications)


def _sign_runs(order: tuple[int, ...], signs: SignAssignment):
    runs = []
    for p in order:
        s = signs.signs[p]
        if runs and runs[-1][1] == s:
            runs[-1][0].append(p)
        else:
            runs.append(([p], s))
    return [(tuple(block), s) for block, s in runs]


@dataclass(frozen=True)
class InOutLabeling:
    """Which end each slot's domain and codomain came from.

    Pure bookkeeping: the matrix entries are unchanged; the relabeling
    tokens record the base change to the uniform 1 -> 0 presentation.
    """

    out_side: tuple[int, ...]
    in_side: tuple[int, ...]
    r_1_out: tuple[str, ...]
    r_in_0: tuple[str, ...]

    def to_json(self):
        return {"out_side": list(self.out_side), "in_side": list(self.in_side),
                "r_1_out": list(self.r_1_out), "r_in_0": list(self.r_in_0)}


def relabel_in_out(D: BlockGradedMap, delta_signs: SignAssignment) -> InOutLabeling:
    """Out/in sides per element: plus slots exit at side 1 and enter at
    side 0, minus slots the reverse."""
    out_side = tuple(1 if s > 0 else 0 for s in delta_signs.signs)
    in_side = tuple(0 if s > 0 else 1 for s in delta_signs.signs)
    r_1_out = tuple("id" if o == 1 else "F01" for o in out_side)
    r_in_0 = tuple("id" if i == 0 else "F10" for i in in_side)
    return InOutLabeling(out_side, in_side, r_1_out, r_in_0)


def nonzero_entry_report(D: BlockGradedMap) -> list[dict]:
    """Deterministic list of nonzero blocks with their degrees."""
    out = []
    for (q, p), gm in sorted(D.entries):
        degrees = sorted(k for k, mat in gm.blocks if not mat.is_zero())
        if degrees:
            out.append({"target": q, "source": p, "degrees": degrees})
    return out
