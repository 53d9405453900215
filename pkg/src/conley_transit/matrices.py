"""Dense exact matrices over a FieldSpec.

Rows are tuples, so matrices are immutable and hashable.  Everything here
is exact: Gaussian elimination over Q uses Fraction arithmetic, over F_p
modular arithmetic, so rank/kernel/image answers carry no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ShapeMismatch
from .fields import FieldSpec


@dataclass(frozen=True)
class Matrix:
    field: FieldSpec
    nrows: int
    ncols: int
    rows: tuple[tuple, ...]

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence]) -> "Matrix":
        coerced = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        nrows = len(coerced)
        ncols = len(coerced[0]) if nrows else 0
        if any(len(r) != ncols for r in coerced):
            raise ShapeMismatch("ragged rows")
        return cls(field, nrows, ncols, coerced)

    @classmethod
    def zeros(cls, field: FieldSpec, nrows: int, ncols: int) -> "Matrix":
        z = field.zero
        return cls(field, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return cls(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, field: FieldSpec, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        if not cols:
            return cls.zeros(field, nrows, 0)
        return cls.from_rows(field, [[col[i] for col in cols] for i in range(nrows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i) -> tuple:
        return self.rows[i]

    def column(self, j) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self) -> bool:
        z = self.field.zero
        return all(x == z for row in self.rows for x in row)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.ncols, self.nrows,
                      tuple(tuple(self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)))

    def add(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        f = self.field
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.rows, other.rows)))

    def sub(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        f = self.field
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.sub(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self.rows, other.rows)))

    def neg(self) -> "Matrix":
        f = self.field
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.neg(a) for a in row) for row in self.rows))

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.coerce(c)
        return Matrix(f, self.nrows, self.ncols,
                      tuple(tuple(f.mul(c, a) for a in row) for row in self.rows))

    def mul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        f = self.field
        p = f.p
        ocols = other.ncols
        out = []
        for row in self.rows:
            acc = [f.zero] * ocols
            for a, orow in zip(row, other.rows):
                if a == 0:
                    continue
                for j in range(ocols):
                    b = orow[j]
                    if b != 0:
                        acc[j] = acc[j] + a * b
            if p is not None:
                acc = [x % p for x in acc]
            out.append(tuple(acc))
        return Matrix(f, self.nrows, ocols, tuple(out))

    def apply(self, vec: Sequence) -> tuple:
        """Matrix-vector product."""
        if len(vec) != self.ncols:
            raise ShapeMismatch("vector length mismatch")
        f = self.field
        out = []
        for row in self.rows:
            s = f.zero
            for a, x in zip(row, vec):
                if a != 0 and x != 0:
                    s = s + a * x
            out.append(s % f.p if f.p is not None else s)
        return tuple(out)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ShapeMismatch("hstack row mismatch")
        return Matrix(self.field, self.nrows, self.ncols + other.ncols,
                      tuple(ra + rb for ra, rb in zip(self.rows, other.rows)))

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ShapeMismatch("vstack column mismatch")
        return Matrix(self.field, self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "Matrix":
        ri, ci = list(row_idx), list(col_idx)
        return Matrix(self.field, len(ri), len(ci),
                      tuple(tuple(self.rows[i][j] for j in ci) for i in ri))

    def _same_shape(self, other: "Matrix"):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch(f"{self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}")

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns.

        Pivoting is first-nonzero-in-column order, so the result is a
        canonical representative independent of how the matrix was built.
        """
        f = self.field
        rows = [list(r) for r in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            piv = next((i for i in range(r, self.nrows) if rows[i][c] != 0), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = f.inv(rows[r][c])
            rows[r] = [f.mul(inv, x) for x in rows[r]]
            for i in range(self.nrows):
                if i != r and rows[i][c] != 0:
                    m = rows[i][c]
                    rows[i] = [f.sub(x, f.mul(m, y)) for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return Matrix(f, self.nrows, self.ncols, tuple(tuple(r_) for r_ in rows)), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[tuple]:
        """Canonical kernel basis: one vector per free column of the RREF."""
        f = self.field
        R, pivots = self.rref()
        pivot_set = set(pivots)
        basis = []
        for j in range(self.ncols):
            if j in pivot_set:
                continue
            vec = [f.zero] * self.ncols
            vec[j] = f.one
            for r, c in enumerate(pivots):
                vec[c] = f.neg(R[r, j])
            basis.append(tuple(vec))
        return basis

    def column_reduce(self) -> list[tuple]:
        """Left-to-right column reduction keyed on lowest nonzero row.

        Returns the nonzero reduced columns in processing order: a
        canonical basis of the column space with pairwise distinct lows.
        """
        f = self.field
        low_of = {}
        out = []
        for j in range(self.ncols):
            col = list(self.column(j))
            low = _low(col)
            while low is not None and low in low_of:
                other = low_of[low]
                c = f.div(col[low], other[low])
                col = [f.sub(x, f.mul(c, y)) for x, y in zip(col, other)]
                low = _low(col)
            if low is not None:
                low_of[low] = col
                out.append(tuple(col))
        return out

    def solve(self, b: Sequence) -> tuple | None:
        """One solution of ``self @ x = b`` (free variables zero), or None."""
        if len(b) != self.nrows:
            raise ShapeMismatch("rhs length mismatch")
        f = self.field
        aug = Matrix(f, self.nrows, self.ncols + 1,
                     tuple(row + (f.coerce(v),) for row, v in zip(self.rows, b)))
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [f.zero] * self.ncols
        for r, c in enumerate(pivots):
            x[c] = R[r, self.ncols]
        return tuple(x)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ShapeMismatch("inverse of non-square matrix")
        f = self.field
        n = self.nrows
        R, pivots = self.hstack(Matrix.identity(f, n)).rref()
        if tuple(pivots) != tuple(range(n)):
            raise ShapeMismatch("matrix is singular")
        return R.submatrix(range(n), range(n, 2 * n))

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.nrows

    def to_json(self):
        f = self.field
        return [[f.entry_to_json(x) for x in row] for row in self.rows]


def _low(col: list) -> int | None:
    for i in range(len(col) - 1, -1, -1):
        if col[i] != 0:
            return i
    return None


def in_span(field: FieldSpec, vectors: list[tuple], v: Sequence) -> bool:
    """Whether v lies in the span of the given column vectors."""
    n = len(v)
    M = Matrix.from_columns(field, vectors, n)
    return M.solve(v) is not None


def all_matrices(field: FieldSpec, nrows: int, ncols: int):
    """All matrices of the given shape over a finite field, lexicographic
    by row-major entry vector."""
    import itertools

    elems = list(field.elements())
    for flat in itertools.product(elems, repeat=nrows * ncols):
        yield Matrix(field, nrows, ncols,
                     tuple(tuple(flat[i * ncols:(i + 1) * ncols]) for i in range(nrows)))


def gl_matrices(field: FieldSpec, n: int) -> tuple["Matrix", ...]:
    """All invertible n x n matrices over a finite field (cached)."""
    return _gl_cached(field, n)


from functools import lru_cache


@lru_cache(maxsize=None)
def _gl_cached(field: FieldSpec, n: int) -> tuple:
    if n == 0:
        return (Matrix.zeros(field, 0, 0),)
    return tuple(m for m in all_matrices(field, n, n) if m.is_invertible())
