"""Homology of chain complexes with canonical, reproducible bases.

The canonical basis recipe: column-reduce the incoming boundary matrix
left to right (persistence-style, keyed on lowest nonzero row), then
extend those boundary columns to a basis of the cycle space by scanning
the canonical kernel basis in index order.  Quotient coordinates are
solved exactly against the combined (representatives | boundaries) basis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotABoundary, NotChainMap, ShapeMismatch
from .fields import FieldSpec
from .graded import GradedMap, GradedSpace
from .matrices import Matrix


@dataclass(frozen=True)
class ChainComplex:
    """Graded space with a degree-1 differential squaring to zero."""

    space: GradedSpace
    d: GradedMap

    @classmethod
    def build(cls, space: GradedSpace, d: GradedMap) -> "ChainComplex":
        if d.source != space or d.target != space:
            raise ShapeMismatch("differential must be an endomap of the space")
        if d.degree != 1:
            raise ShapeMismatch(f"differential must have degree 1, got {d.degree}")
        dd = d.compose(d)
        if not dd.is_zero():
            raise NotABoundary("d o d != 0")
        return cls(space, d)

    @classmethod
    def zero_complex(cls, fld: FieldSpec, space: GradedSpace) -> "ChainComplex":
        return cls.build(space, GradedMap.zero_map(fld, space, space, 1))

    @property
    def field(self) -> FieldSpec:
        return self.d.field


@dataclass(frozen=True)
class HomologyPresentation:
    """Per-degree cycle/boundary/quotient bases of a chain complex.

    For each degree k: ``boundaries[k]`` are the canonical reduced columns
    of d_{k+1}, ``reps[k]`` are cycle representatives of the quotient
    basis, and ``homology.dim(k)`` counts them.
    """

    complex: ChainComplex
    homology: GradedSpace
    reps: tuple[tuple[int, Matrix], ...]
    boundaries: tuple[tuple[int, Matrix], ...]

    @property
    def field(self) -> FieldSpec:
        return self.complex.field

    def rep_matrix(self, k: int) -> Matrix:
        """Columns: chain-level representatives of the degree-k basis."""
        for deg, mat in self.reps:
            if deg == k:
                return mat
        return Matrix.zeros(self.field, self.complex.space.dim(k), 0)

    def boundary_matrix(self, k: int) -> Matrix:
        for deg, mat in self.boundaries:
            if deg == k:
                return mat
        return Matrix.zeros(self.field, self.complex.space.dim(k), 0)

    def coords(self, k: int, chain) -> tuple:
        """Quotient coordinates of a degree-k cycle."""
        Q = self.rep_matrix(k)
        B = self.boundary_matrix(k)
        if len(chain) != self.complex.space.dim(k):
            raise ShapeMismatch("chain length mismatch")
        sol = Q.hstack(B).solve(chain)
        if sol is None:
            raise ShapeMismatch("vector is not a cycle of this complex")
        return tuple(sol[:Q.ncols])


def homology(cx: ChainComplex) -> HomologyPresentation:
    fld = cx.field
    space = cx.space
    degrees = sorted(set(space.degrees()))
    reps = {}
    boundaries = {}
    hdims = {}
    for k in degrees:
        n_k = space.dim(k)
        if n_k == 0:
            continue
        d_k = cx.d.block(k)            # C_k -> C_{k-1}
        d_in = cx.d.block(k + 1)       # C_{k+1} -> C_k
        kernel = d_k.kernel_basis()
        reduced = d_in.column_reduce() if d_in.ncols and d_in.nrows else []
        B = Matrix.from_columns(fld, reduced, n_k)
        quotient = _extend_to_basis(fld, reduced, kernel, n_k)
        Q = Matrix.from_columns(fld, quotient, n_k)
        if Q.ncols:
            reps[k] = Q
            hdims[k] = Q.ncols
        if B.ncols:
            boundaries[k] = B
    return HomologyPresentation(cx, GradedSpace.of(hdims),
                                tuple(sorted(reps.items())),
                                tuple(sorted(boundaries.items())))


def _extend_to_basis(fld: FieldSpec, base: list[tuple], candidates: list[tuple], n: int) -> list[tuple]:
    """Candidates (in order) that extend ``base`` to a larger independent set.

    Incremental low-pivot elimination; returns the original candidate
    vectors, not their reduced forms.
    """
    low_of = {}
    for vec in base:
        low = _low_index(vec)
        # base columns already have distinct lows by construction
        low_of[low] = list(vec)
    kept = []
    for vec in candidates:
        cur = list(vec)
        low = _low_index(cur)
        while low is not None and low in low_of:
            other = low_of[low]
            c = fld.div(cur[low], other[low])
            cur = [fld.sub(x, fld.mul(c, y)) for x, y in zip(cur, other)]
            low = _low_index(cur)
        if low is not None:
            low_of[low] = cur
            kept.append(vec)
    return kept


def _low_index(vec) -> int | None:
    for i in range(len(vec) - 1, -1, -1):
        if vec[i] != 0:
            return i
    return None


def chain_map_sign(f: GradedMap, d_src: GradedMap, d_tgt: GradedMap) -> int | None:
    """Sign s with f d = s * (d' f), or None if neither sign works.

    Degree-even chain maps commute (s=+1); odd ones anticommute (s=-1)
    under this package's convention.  Both kinds carry cycles to cycles,
    so homology induction accepts either and reports which.
    """
    fd = f.compose(d_src)
    df = d_tgt.compose(f)
    if fd.sub(df).is_zero():
        return 1
    if fd.add(df).is_zero():
        return -1
    return None


def is_chain_map(f: GradedMap, d_src: GradedMap, d_tgt: GradedMap,
                 expect_sign: int | None = None) -> bool:
    sign = chain_map_sign(f, d_src, d_tgt)
    if sign is None:
        return False
    if expect_sign is None:
        return True
    # over F_2 the two signs coincide, so accept either
    if f.field.p == 2:
        return True
    fd = f.compose(d_src)
    df = d_tgt.compose(f)
    return (fd.sub(df.scale(expect_sign))).is_zero()


def induced_map(f: GradedMap, h_src: HomologyPresentation, h_tgt: HomologyPresentation) -> GradedMap:
    """Map induced on homology by a chain map (checked)."""
    if f.source != h_src.complex.space or f.target != h_tgt.complex.space:
        raise ShapeMismatch("map does not match the presentations")
    if not is_chain_map(f, h_src.complex.d, h_tgt.complex.d):
        raise NotChainMap("map does not intertwine the differentials")
    r = f.degree
    blocks = {}
    for k, Q in h_src.reps:
        cols = []
        for j in range(Q.ncols):
            image = f.block(k).apply(Q.column(j))
            cols.append(h_tgt.coords(k - r, image))
        rows = h_tgt.homology.dim(k - r)
        if rows and cols:
            blocks[k] = Matrix.from_columns(f.field, cols, rows)
    return GradedMap.build(f.field, h_src.homology, h_tgt.homology, r, blocks)
