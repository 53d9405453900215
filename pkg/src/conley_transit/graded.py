"""Graded vector spaces, degree-r graded maps, and poset-indexed block maps.

Degree convention: a degree-r map sends grade k to grade k-r, so boundary
maps have degree 1 and suspensions degree -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ShapeMismatch
from .fields import FieldSpec
from .matrices import Matrix
from .posets import Interval, Poset


@dataclass(frozen=True)
class GradedSpace:
    """Finitely supported map degree -> dimension."""

    dims: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[int, int] | None = None) -> "GradedSpace":
        mapping = mapping or {}
        items = tuple(sorted((int(k), int(d)) for k, d in mapping.items() if d))
        if any(d < 0 for _, d in items):
            raise ValueError("negative dimension")
        return cls(items)

    @classmethod
    def zero(cls) -> "GradedSpace":
        return cls(())

    def dim(self, k: int) -> int:
        for deg, d in self.dims:
            if deg == k:
                return d
        return 0

    def items(self):
        return self.dims

    def degrees(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.dims)

    def is_zero(self) -> bool:
        return not self.dims

    def total_dim(self) -> int:
        return sum(d for _, d in self.dims)

    def shift(self, s: int) -> "GradedSpace":
        """Shift grading up by s: result.dim(k) == self.dim(k - s)."""
        return GradedSpace(tuple(sorted((k + s, d) for k, d in self.dims)))

    def direct_sum(self, other: "GradedSpace") -> "GradedSpace":
        out = dict(self.dims)
        for k, d in other.dims:
            out[k] = out.get(k, 0) + d
        return GradedSpace.of(out)

    def euler(self) -> int:
        return sum(d if k % 2 == 0 else -d for k, d in self.dims)

    def to_json(self):
        return {str(k): d for k, d in self.dims}


def sum_spaces(spaces: Sequence[GradedSpace]) -> GradedSpace:
    total = GradedSpace.zero()
    for s in spaces:
        total = total.direct_sum(s)
    return total


@dataclass(frozen=True)
class GradedMap:
    """Degree-r map between graded spaces, one matrix per source degree.

    ``blocks`` holds a matrix of shape (target.dim(k-r), source.dim(k)) for
    every degree k where both dimensions are nonzero.
    """

    field: FieldSpec
    source: GradedSpace
    target: GradedSpace
    degree: int
    blocks: tuple[tuple[int, Matrix], ...]

    @classmethod
    def build(cls, fld: FieldSpec, source: GradedSpace, target: GradedSpace,
              degree: int, blocks: Mapping[int, Matrix | Sequence[Sequence]] | None = None) -> "GradedMap":
        blocks = blocks or {}
        out = {}
        for k, mat in blocks.items():
            if not isinstance(mat, Matrix):
                mat = Matrix.from_rows(fld, mat)
            rows, cols = target.dim(k - degree), source.dim(k)
            if (mat.nrows, mat.ncols) != (rows, cols):
                raise ShapeMismatch(
                    f"block at degree {k}: got {mat.nrows}x{mat.ncols}, want {rows}x{cols}")
            if rows and cols:
                out[k] = mat
        for k in source.degrees():
            rows, cols = target.dim(k - degree), source.dim(k)
            if rows and cols and k not in out:
                out[k] = Matrix.zeros(fld, rows, cols)
        return cls(fld, source, target, degree, tuple(sorted(out.items())))

    @classmethod
    def zero_map(cls, fld: FieldSpec, source: GradedSpace, target: GradedSpace, degree: int) -> "GradedMap":
        return cls.build(fld, source, target, degree)

    @classmethod
    def identity(cls, fld: FieldSpec, space: GradedSpace) -> "GradedMap":
        return cls.build(fld, space, space, 0,
                         {k: Matrix.identity(fld, d) for k, d in space.dims})

    def block(self, k: int) -> Matrix:
        for deg, mat in self.blocks:
            if deg == k:
                return mat
        return Matrix.zeros(self.field, self.target.dim(k - self.degree), self.source.dim(k))

    def is_zero(self) -> bool:
        return all(mat.is_zero() for _, mat in self.blocks)

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self after inner."""
        if inner.target != self.source:
            raise ShapeMismatch("composition space mismatch")
        deg = self.degree + inner.degree
        out = {}
        for k, mat in inner.blocks:
            left = self.block(k - inner.degree)
            if left.nrows and left.ncols:
                out[k] = left.mul(mat)
        return GradedMap.build(self.field, inner.source, self.target, deg, out)

    def add(self, other: "GradedMap") -> "GradedMap":
        self._compatible(other)
        return GradedMap.build(self.field, self.source, self.target, self.degree,
                               {k: self.block(k).add(other.block(k))
                                for k in set(dict(self.blocks)) | set(dict(other.blocks))})

    def sub(self, other: "GradedMap") -> "GradedMap":
        return self.add(other.neg())

    def neg(self) -> "GradedMap":
        return GradedMap.build(self.field, self.source, self.target, self.degree,
                               {k: mat.neg() for k, mat in self.blocks})

    def scale(self, c) -> "GradedMap":
        return GradedMap.build(self.field, self.source, self.target, self.degree,
                               {k: mat.scale(c) for k, mat in self.blocks})

    def is_isomorphism(self) -> bool:
        """Invertible in every degree (also requires matching dims)."""
        for k in set(self.source.degrees()) | {k + self.degree for k in self.target.degrees()}:
            if self.source.dim(k) != self.target.dim(k - self.degree):
                return False
            mat = self.block(k)
            if mat.nrows and not mat.is_invertible():
                return False
        return True

    def inverse(self) -> "GradedMap":
        if not self.is_isomorphism():
            raise ShapeMismatch("map is not an isomorphism")
        inv_blocks = {}
        for k, mat in self.blocks:
            inv_blocks[k - self.degree] = mat.inverse()
        return GradedMap.build(self.field, self.target, self.source, -self.degree, inv_blocks)

    def _compatible(self, other: "GradedMap"):
        if (self.source, self.target, self.degree) != (other.source, other.target, other.degree):
            raise ShapeMismatch("graded map shape mismatch")

    def to_json(self):
        return {"degree": self.degree,
                "source": self.source.to_json(),
                "target": self.target.to_json(),
                "blocks": {str(k): mat.to_json() for k, mat in self.blocks}}


@dataclass(frozen=True)
class BlockGradedMap:
    """Poset-indexed block matrix of graded maps.

    ``entry(q, p)`` maps summand p into summand q.  Upper triangular means
    nonzero entries only for q < p or q = p; strictly upper triangular
    additionally forbids the diagonal.
    """

    field: FieldSpec
    poset: Poset
    source: tuple[GradedSpace, ...]
    target: tuple[GradedSpace, ...]
    degree: int
    entries: tuple[tuple[tuple[int, int], GradedMap], ...]

    @classmethod
    def build(cls, fld: FieldSpec, poset: Poset, source: Sequence[GradedSpace],
              target: Sequence[GradedSpace], degree: int,
              entries: Mapping[tuple[int, int], GradedMap | Mapping] | None = None) -> "BlockGradedMap":
        source, target = tuple(source), tuple(target)
        if len(source) != poset.n or len(target) != poset.n:
            raise ShapeMismatch("space collections must match poset size")
        out = {}
        for (q, p), gm in (entries or {}).items():
            if not isinstance(gm, GradedMap):
                gm = GradedMap.build(fld, source[p], target[q], degree, gm)
            if gm.source != source[p] or gm.target != target[q] or gm.degree != degree:
                raise ShapeMismatch(f"entry ({q},{p}) inconsistent with declared spaces")
            if not gm.is_zero():
                out[(q, p)] = gm
        return cls(fld, poset, source, target, degree, tuple(sorted(out.items())))

    @classmethod
    def zero(cls, fld: FieldSpec, poset: Poset, source, target, degree: int) -> "BlockGradedMap":
        return cls.build(fld, poset, source, target, degree)

    @classmethod
    def identity(cls, fld: FieldSpec, poset: Poset, spaces) -> "BlockGradedMap":
        return cls.build(fld, poset, spaces, spaces, 0,
                         {(p, p): GradedMap.identity(fld, spaces[p])
                          for p in range(poset.n) if not spaces[p].is_zero()})

    def entry(self, q: int, p: int) -> GradedMap:
        for (key, gm) in self.entries:
            if key == (q, p):
                return gm
        return GradedMap.zero_map(self.field, self.source[p], self.target[q], self.degree)

    def is_upper_triangular(self, strict: bool = False) -> bool:
        for (q, p), gm in self.entries:
            if gm.is_zero():
                continue
            if q == p:
                if strict:
                    return False
            elif not self.poset.less(q, p):
                return False
        return True

    def compose(self, inner: "BlockGradedMap") -> "BlockGradedMap":
        if inner.target != self.source:
            raise ShapeMismatch("block composition space mismatch")
        acc: dict[tuple[int, int], GradedMap] = {}
        for (m, p), right in inner.entries:
            for (q, m2), left in self.entries:
                if m2 != m:
                    continue
                term = left.compose(right)
                key = (q, p)
                acc[key] = acc[key].add(term) if key in acc else term
        return BlockGradedMap.build(self.field, self.poset, inner.source, self.target,
                                    self.degree + inner.degree, acc)

    def add(self, other: "BlockGradedMap") -> "BlockGradedMap":
        acc = dict(self.entries)
        for key, gm in other.entries:
            acc[key] = acc[key].add(gm) if key in acc else gm
        return BlockGradedMap.build(self.field, self.poset, self.source, self.target, self.degree, acc)

    def sub(self, other: "BlockGradedMap") -> "BlockGradedMap":
        return self.add(other.neg())

    def neg(self) -> "BlockGradedMap":
        return BlockGradedMap.build(self.field, self.poset, self.source, self.target, self.degree,
                                    {key: gm.neg() for key, gm in self.entries})

    def scale(self, c) -> "BlockGradedMap":
        return BlockGradedMap.build(self.field, self.poset, self.source, self.target, self.degree,
                                    {key: gm.scale(c) for key, gm in self.entries})

    def is_zero(self) -> bool:
        return not self.entries

    def restrict(self, I: Interval) -> "BlockGradedMap":
        """Keep only blocks with both indices in the interval."""
        kept = {key: gm for key, gm in self.entries if key[0] in I and key[1] in I}
        return BlockGradedMap.build(self.field, self.poset, self.source, self.target, self.degree, kept)

    # -- flattening -------------------------------------------------------

    def offsets(self, I: Interval, k: int, side: str = "source") -> dict[int, int]:
        """Start offset of each element's coordinates in the flattened
        degree-k component of the direct sum over I (ascending elements)."""
        spaces = self.source if side == "source" else self.target
        out = {}
        pos = 0
        for p in I:
            out[p] = pos
            pos += spaces[p].dim(k)
        return out

    def space_of(self, I: Interval, side: str = "source") -> GradedSpace:
        spaces = self.source if side == "source" else self.target
        return sum_spaces([spaces[p] for p in I])

    def to_graded_map(self, I: Interval | None = None) -> GradedMap:
        """Flatten restriction to I into one GradedMap on the direct sums."""
        if I is None:
            I = tuple(range(self.poset.n))
        src = self.space_of(I, "source")
        tgt = self.space_of(I, "target")
        blocks = {}
        for k in src.degrees():
            rows, cols = tgt.dim(k - self.degree), src.dim(k)
            if not rows or not cols:
                continue
            grid = [[self.field.zero] * cols for _ in range(rows)]
            coff = self.offsets(I, k, "source")
            roff = self.offsets(I, k - self.degree, "target")
            for (q, p), gm in self.entries:
                if q not in I or p not in I:
                    continue
                mat = gm.block(k)
                for i in range(mat.nrows):
                    for j in range(mat.ncols):
                        grid[roff[q] + i][coff[p] + j] = mat[i, j]
            blocks[k] = Matrix(self.field, rows, cols, tuple(tuple(r) for r in grid))
        return GradedMap.build(self.field, src, tgt, self.degree, blocks)

    @classmethod
    def from_graded_map(cls, fld: FieldSpec, poset: Poset, source, target,
                        gm: GradedMap) -> "BlockGradedMap":
        """Split a flattened map on the full direct sums back into blocks."""
        full = tuple(range(poset.n))
        entries = {}
        for q in range(poset.n):
            for p in range(poset.n):
                blocks = {}
                for k in source[p].degrees():
                    rows, cols = target[q].dim(k - gm.degree), source[p].dim(k)
                    if not rows or not cols:
                        continue
                    mat = gm.block(k)
                    coff = _offsets_of(source, full, k)
                    roff = _offsets_of(target, full, k - gm.degree)
                    blocks[k] = mat.submatrix(range(roff[q], roff[q] + rows),
                                              range(coff[p], coff[p] + cols))
                entry = GradedMap.build(fld, source[p], target[q], gm.degree, blocks)
                if not entry.is_zero():
                    entries[(q, p)] = entry
        return cls.build(fld, poset, source, target, gm.degree, entries)

    def invert_triangular(self) -> "BlockGradedMap":
        """Inverse of an upper triangular block map with invertible diagonal.

        Back-substitution S(q,p) = -T(q,q)^-1 (sum over q < m <= p of
        T(q,m) S(m,p)); the result has degree -r.
        """
        from .errors import SingularDiagonalBlock

        if not self.is_upper_triangular():
            raise ShapeMismatch("not upper triangular")
        n = self.poset.n
        inv_diag = {}
        for p in range(n):
            d = self.entry(p, p)
            if not d.is_isomorphism():
                raise SingularDiagonalBlock(f"diagonal block at element {p} is singular")
            inv_diag[p] = d.inverse()
        order = self.poset.linear_extension()
        inv_entries: dict[tuple[int, int], GradedMap] = {(p, p): inv_diag[p] for p in range(n)}
        for p in range(n):
            # walk q downward so S(m,p) for q < m <= p is already known
            for q in reversed(order):
                if not self.poset.less(q, p):
                    continue
                acc = None
                for m in range(n):
                    if not (self.poset.less(q, m) and self.poset.leq(m, p)):
                        continue
                    if (m, p) not in inv_entries:
                        continue
                    term = self.entry(q, m).compose(inv_entries[(m, p)])
                    acc = term if acc is None else acc.add(term)
                if acc is None or acc.is_zero():
                    continue
                inv_entries[(q, p)] = inv_diag[q].compose(acc).neg()
        return BlockGradedMap.build(self.field, self.poset, self.target, self.source,
                                    -self.degree, inv_entries)

    def to_json(self):
        return {"degree": self.degree,
                "blocks": {f"{q},{p}": {str(k): mat.to_json() for k, mat in gm.blocks}
                           for (q, p), gm in self.entries}}


def _offsets_of(spaces, I, k) -> dict[int, int]:
    out = {}
    pos = 0
    for p in I:
        out[p] = pos
        pos += spaces[p].dim(k)
    return out
