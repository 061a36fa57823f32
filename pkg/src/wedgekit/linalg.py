"""Dense exact matrices over a :class:`~wedgekit.ring.RingContext`.

Entries are stored as ring payloads in a flat row-major tuple.  Nothing here
divides unless the ring says the divisor is a unit, so everything except
:func:`nullspace_dim` works over rings with zero divisors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .ring import RingContext, RingElement

__all__ = [
    "Matrix",
    "Transvection",
    "mat_mul",
    "det_division_free",
    "det_cofactor",
    "det_berkowitz",
    "det_permutation_sum",
    "charpoly_berkowitz",
    "transvection_matrix",
    "nullspace_dim",
    "rank",
    "sparse_rank",
]

COFACTOR_MAX = 6


class Matrix:
    __slots__ = ("context", "rows", "cols", "data", "_hash")

    def __init__(self, context: RingContext, rows: int, cols: int, data: Sequence[Any]):
        if rows < 1 or cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(data) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
        self.context = context
        self.rows = rows
        self.cols = cols
        self.data = tuple(data)
        self._hash = None

    # ----------------------------------------------------------- construction

    @classmethod
    def from_rows(cls, context: RingContext, rows: Iterable[Iterable[Any]]) -> Matrix:
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged or empty matrix")
        data = [context.coerce(x) for r in rows for x in r]
        return cls(context, len(rows), len(rows[0]), data)

    @classmethod
    def identity(cls, context: RingContext, n: int) -> Matrix:
        zero, one = context.zero(), context.one()
        return cls(context, n, n, [one if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, context: RingContext, rows: int, cols: int | None = None) -> Matrix:
        cols = rows if cols is None else cols
        return cls(context, rows, cols, [context.zero()] * (rows * cols))

    @classmethod
    def diagonal(cls, context: RingContext, entries: Sequence[Any]) -> Matrix:
        n = len(entries)
        zero = context.zero()
        entries = [context.coerce(x) for x in entries]
        return cls(context, n, n, [entries[i] if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def from_numpy(cls, context: RingContext, array: np.ndarray) -> Matrix:
        rows, cols = array.shape
        return cls(context, rows, cols, [context.coerce(int(x)) for x in array.ravel()])

    def to_numpy(self) -> np.ndarray:
        """int64 array for Z/k and F_p; object array of ints for Z."""
        if self.context.is_modular:
            return np.array(self.data, dtype=np.int64).reshape(self.rows, self.cols)
        arr = np.empty(self.rows * self.cols, dtype=object)
        arr[:] = list(self.data)
        return arr.reshape(self.rows, self.cols)

    # ----------------------------------------------------------------- access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Any:
        """Raw payload at 0-based position (i, j)."""
        return self.data[i * self.cols + j]

    def __getitem__(self, ij: tuple[int, int]) -> RingElement:
        i, j = ij
        return RingElement(self.context, self.entry(i, j))

    def row(self, i: int) -> tuple:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Any]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_lists(self) -> list[list[str]]:
        fmt = self.context.format
        return [[fmt(x) for x in self.row(i)] for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        c = self.cols
        d = self.data
        return Matrix(self.context, len(rows), len(cols), [d[i * c + j] for i in rows for j in cols])

    def transpose(self) -> Matrix:
        return Matrix(
            self.context, self.cols, self.rows,
            [self.entry(i, j) for j in range(self.cols) for i in range(self.rows)],
        )

    def map(self, fn, context: RingContext | None = None) -> Matrix:
        return Matrix(context or self.context, self.rows, self.cols, [fn(x) for x in self.data])

    # ------------------------------------------------------------- arithmetic

    def __matmul__(self, other: Matrix) -> Matrix:
        return mat_mul(self, other)

    def __add__(self, other: Matrix) -> Matrix:
        self._same_shape(other)
        add = self.context.add
        return Matrix(self.context, self.rows, self.cols, [add(a, b) for a, b in zip(self.data, other.data)])

    def __sub__(self, other: Matrix) -> Matrix:
        self._same_shape(other)
        sub = self.context.sub
        return Matrix(self.context, self.rows, self.cols, [sub(a, b) for a, b in zip(self.data, other.data)])

    def __neg__(self) -> Matrix:
        return self.map(self.context.neg)

    def scale(self, c) -> Matrix:
        c = self.context.coerce(c)
        mul = self.context.mul
        return self.map(lambda x: mul(c, x))

    def __pow__(self, e: int) -> Matrix:
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.context, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def _same_shape(self, other: Matrix):
        if self.context != other.context or self.shape != other.shape:
            raise ValueError("matrix shape or ring mismatch")

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.context == other.context and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        if self._hash is None:
            data = self.data
            if data and isinstance(data[0], dict):
                data = tuple(frozenset(x.items()) for x in data)
            self._hash = hash((self.context, self.rows, self.cols, data))
        return self._hash

    def is_identity(self) -> bool:
        return self == Matrix.identity(self.context, self.rows) if self.is_square else False

    def det(self) -> RingElement:
        return RingElement(self.context, det_division_free(self))

    def inverse(self) -> Matrix:
        """Two-sided inverse via Cayley-Hamilton; raises if det is not a unit."""
        if not self.is_square:
            raise ValueError("inverse of a non-square matrix")
        ctx = self.context
        n = self.rows
        coeffs = charpoly_berkowitz(self)  # x^n + c1 x^{n-1} + ... + cn
        cn = coeffs[-1]
        if not ctx.is_unit(cn):
            raise ZeroDivisionError("matrix is not invertible over its ring")
        # A^{-1} = -(A^{n-1} + c1 A^{n-2} + ... + c_{n-1} I) / cn
        acc = Matrix.identity(ctx, n)
        for c in coeffs[1:-1]:
            acc = (self @ acc) + Matrix.identity(ctx, n).scale(c)
        inv = acc.scale(ctx.neg(ctx.inv(cn)))
        return inv

    def is_invertible(self) -> bool:
        return self.is_square and self.context.is_unit(det_division_free(self))

    def __repr__(self):
        body = "; ".join(" ".join(r) for r in self.to_lists())
        return f"Matrix[{self.context}]({self.rows}x{self.cols}: {body})"


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.context != b.context:
        raise ValueError(f"ring mismatch: {a.context} vs {b.context}")
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    ctx = a.context
    n, k, m = a.rows, a.cols, b.cols
    ad, bd = a.data, b.data
    bcols = [bd[j::m] for j in range(m)]
    if ctx.kind in ("Z", "Q", "Z/k", "F_p"):
        out = [sum(x * y for x, y in zip(ad[i * k:(i + 1) * k], col)) for i in range(n) for col in bcols]
        if ctx.is_modular:
            q = ctx.modulus
            out = [x % q for x in out]
        return Matrix(ctx, n, m, out)
    add, mul, zero = ctx.add, ctx.mul, ctx.zero()
    out = []
    for i in range(n):
        row = ad[i * k:(i + 1) * k]
        for col in bcols:
            acc = zero
            for x, y in zip(row, col):
                acc = add(acc, mul(x, y))
            out.append(acc)
    return Matrix(ctx, n, m, out)


# ---------------------------------------------------------------- determinants


def det_cofactor(a: Matrix) -> Any:
    """Laplace expansion along rows, memoised on the set of remaining columns."""
    if not a.is_square:
        raise ValueError("determinant of a non-square matrix")
    ctx = a.context
    n = a.rows
    add, mul, neg = ctx.add, ctx.mul, ctx.neg
    zero = ctx.zero()
    memo: dict[int, Any] = {}

    def minor(row: int, colmask: int) -> Any:
        # det of rows row..n-1 restricted to columns in colmask
        if row == n:
            return ctx.one()
        if colmask in memo:
            return memo[colmask]
        acc = zero
        sign_pos = 0
        for j in range(n):
            if colmask >> j & 1:
                x = a.entry(row, j)
                if not ctx.is_zero(x):
                    term = mul(x, minor(row + 1, colmask & ~(1 << j)))
                    acc = add(acc, term if sign_pos % 2 == 0 else neg(term))
                sign_pos += 1
        memo[colmask] = acc
        return acc

    return minor(0, (1 << n) - 1)


def charpoly_berkowitz(a: Matrix) -> list[Any]:
    """Coefficients [1, c1, ..., cn] of det(xI - A), division-free."""
    if not a.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    ctx = a.context
    n = a.rows
    add, mul, neg = ctx.add, ctx.mul, ctx.neg
    zero, one = ctx.zero(), ctx.one()
    E = a.entry
    # Berkowitz: build Toeplitz products of the leading principal submatrices.
    poly = [one, neg(E(0, 0))]
    for r in range(1, n):
        # A_r = [[M, C], [R, a_rr]] with M the leading r x r block
        R = [E(r, j) for j in range(r)]
        C = [E(i, r) for i in range(r)]
        arr = E(r, r)
        # t_0 = 1, t_1 = -a_rr, t_{k+2} = -R M^k C
        col = [one, neg(arr)]
        vec = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, vec):
                s = add(s, mul(x, y))
            col.append(neg(s))
            vec = [
                _dot(ctx, [E(i, j) for j in range(r)], vec) for i in range(r)
            ]
        # new poly = T @ poly where T is the (r+2) x (r+1) lower Toeplitz matrix of col
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(min(i, r) + 1):
                s = add(s, mul(col[i - j], poly[j]))
            new.append(s)
        poly = new
    return poly


def _dot(ctx: RingContext, xs, ys):
    s = ctx.zero()
    for x, y in zip(xs, ys):
        s = ctx.add(s, ctx.mul(x, y))
    return s


def det_berkowitz(a: Matrix) -> Any:
    coeffs = charpoly_berkowitz(a)
    cn = coeffs[-1]
    return cn if a.rows % 2 == 0 else a.context.neg(cn)


def det_division_free(a: Matrix) -> Any:
    """Exact determinant over any commutative ring.

    Cofactor expansion up to size 6, Berkowitz above.
    """
    if not a.is_square:
        raise ValueError("determinant of a non-square matrix")
    if a.rows <= COFACTOR_MAX:
        return det_cofactor(a)
    return det_berkowitz(a)


def det_permutation_sum(a: Matrix) -> Any:
    """Leibniz formula; only for cross-checking small matrices."""
    ctx = a.context
    n = a.rows
    total = ctx.zero()
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = ctx.one()
        for i, j in enumerate(perm):
            term = ctx.mul(term, a.entry(i, j))
        total = ctx.add(total, ctx.neg(term) if inv % 2 else term)
    return total


# ---------------------------------------------------------------- transvections


@dataclass(frozen=True)
class Transvection:
    """``e + ξ e_{i,j}``; indices are 0-based positions in the matrix."""

    size: int
    row_index: int
    col_index: int
    parameter: Any

    def __post_init__(self):
        if self.row_index == self.col_index:
            raise ValueError("transvection needs distinct row and column indices")
        if not (0 <= self.row_index < self.size and 0 <= self.col_index < self.size):
            raise ValueError("transvection index out of range")

    def inverse(self, context: RingContext) -> Transvection:
        return Transvection(self.size, self.row_index, self.col_index, context.neg(context.coerce(self.parameter)))


def transvection_matrix(context: RingContext, t: Transvection) -> Matrix:
    n = t.size
    data = list(Matrix.identity(context, n).data)
    data[t.row_index * n + t.col_index] = context.coerce(t.parameter)
    return Matrix(context, n, n, data)


# ---------------------------------------------------------------- elimination


def _require_field(ctx: RingContext):
    if not ctx.is_field:
        raise ValueError(f"nullspace dimension needs a field, got {ctx}")


def rank(a: Matrix) -> int:
    """Rank over Q or F_p by Gaussian elimination, pivot = first nonzero in the column."""
    _require_field(a.context)
    rows = []
    for i in range(a.rows):
        r = {j: x for j, x in enumerate(a.row(i)) if not a.context.is_zero(x)}
        if r:
            rows.append(r)
    return sparse_rank(a.context, rows)


def nullspace_dim(a: Matrix) -> int:
    return a.cols - rank(a)


def sparse_rank(ctx: RingContext, rows: Iterable[Mapping[Hashable, Any]], order=None) -> int:
    """Rank of a sparse system over a field.

    Each row maps column keys to nonzero payloads.  Rows are inserted in the
    given order and reduced against the pivots found so far; a row's pivot is
    its smallest column (under ``order``, default natural ordering of keys).
    Pivot rows are kept normalised with leading coefficient 1.
    """
    _require_field(ctx)
    key = order or (lambda c: c)
    add, mul, neg, inv, is_zero = ctx.add, ctx.mul, ctx.neg, ctx.inv, ctx.is_zero
    modular = ctx.is_modular
    p = ctx.modulus
    pivots: dict[Hashable, dict] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row, key=key)
            piv = pivots.get(lead)
            if piv is None:
                c = inv(row[lead])
                if modular:
                    pivots[lead] = {j: x * c % p for j, x in row.items()}
                else:
                    pivots[lead] = {j: mul(x, c) for j, x in row.items()}
                break
            f = neg(row[lead])
            if modular:
                for j, x in piv.items():
                    v = (row.get(j, 0) + f * x) % p
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
            else:
                for j, x in piv.items():
                    v = add(row.get(j, ctx.zero()), mul(f, x))
                    if is_zero(v):
                        row.pop(j, None)
                    else:
                        row[j] = v
    return len(pivots)
