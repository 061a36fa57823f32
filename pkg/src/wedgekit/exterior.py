"""Index combinatorics of the exterior power and compound matrices.

An index set is a strictly increasing tuple of 1-based integers.  The basis
of the m-th exterior power is ordered lexicographically, which is the order
:func:`itertools.combinations` produces.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

from .linalg import Matrix, Transvection, det_division_free, transvection_matrix
from .ring import RingContext

__all__ = [
    "IndexSet",
    "index_sets",
    "check_index_set",
    "lex_rank",
    "unrank",
    "sign_shuffle",
    "distance",
    "compound",
    "compound_by_minors",
    "wedge_transvection",
]

IndexSet = tuple[int, ...]


@lru_cache(maxsize=None)
def index_sets(n: int, m: int) -> tuple[IndexSet, ...]:
    """All m-subsets of [n] in lex order."""
    return tuple(combinations(range(1, n + 1), m))


@lru_cache(maxsize=None)
def _rank_table(n: int, m: int) -> dict[IndexSet, int]:
    return {I: r for r, I in enumerate(index_sets(n, m), start=1)}


def check_index_set(I: Sequence[int], n: int) -> IndexSet:
    I = tuple(I)
    if any(b <= a for a, b in zip(I, I[1:])):
        raise ValueError(f"index set {I} is not strictly increasing")
    if I and (I[0] < 1 or I[-1] > n):
        raise ValueError(f"index set {I} is not inside [1, {n}]")
    return I


def lex_rank(I: Sequence[int], n: int) -> int:
    """1-based position of ``I`` among the |I|-subsets of [n] in lex order."""
    I = check_index_set(I, n)
    m = len(I)
    # count subsets that precede I: at each position, the choices smaller than I[t]
    r = 0
    prev = 0
    for t, i in enumerate(I):
        for smaller in range(prev + 1, i):
            r += comb(n - smaller, m - t - 1)
        prev = i
    return r + 1


def unrank(r: int, n: int, m: int) -> IndexSet:
    if not 1 <= r <= comb(n, m):
        raise ValueError(f"rank {r} out of range for {m}-subsets of [{n}]")
    out = []
    prev = 0
    r -= 1
    for t in range(m):
        i = prev + 1
        while True:
            c = comb(n - i, m - t - 1)
            if r < c:
                break
            r -= c
            i += 1
        out.append(i)
        prev = i
    return tuple(out)


def sign_shuffle(blocks: Sequence[Sequence[int]]) -> int:
    """Sign of the permutation taking sorted(union) to the concatenated blocks.

    Each block is read in ascending order; blocks must be pairwise disjoint.
    """
    word = [i for block in blocks for i in sorted(block)]
    if len(set(word)) != len(word):
        raise ValueError(f"blocks {blocks} overlap")
    inversions = sum(1 for a in range(len(word)) for b in range(a + 1, len(word)) if word[a] > word[b])
    return -1 if inversions % 2 else 1


def distance(I: Sequence[int], J: Sequence[int]) -> int:
    if len(I) != len(J):
        raise ValueError("index sets of different sizes")
    return len(set(I) & set(J))


def compound(g: Matrix, m: int) -> Matrix:
    """The m-th compound (exterior power) of a square matrix.

    Entry (I, J) is the minor on rows I and columns J.  All minors of sizes
    up to m are built together by Laplace expansion along the last row, which
    is the memoised cofactor scheme used for determinants.
    """
    if not g.is_square:
        raise ValueError("compound of a non-square matrix")
    n = g.rows
    if not 1 <= m < n:
        raise ValueError(f"m={m} out of range for n={n}")
    ctx = g.context
    fast = ctx.kind in ("Z", "Z/k", "F_p")
    E = g.entry
    add, mul, neg, zero = ctx.add, ctx.mul, ctx.neg, ctx.zero()
    # minors[(rows, cols)] for 0-based tuples of equal size s
    prev = {((i,), (j,)): E(i, j) for i in range(n) for j in range(n)}
    for s in range(2, m + 1):
        cur = {}
        rows_s = list(combinations(range(n), s))
        for R in rows_s:
            last = R[-1]
            Rm = R[:-1]
            for C in rows_s:
                acc = 0 if fast else zero
                for pos, j in enumerate(C):
                    x = E(last, j)
                    if fast:
                        if x:
                            sub = prev[(Rm, C[:pos] + C[pos + 1:])]
                            # sign of entry (s-1, pos) in an s x s minor
                            acc += x * sub if (s - 1 + pos) % 2 == 0 else -x * sub
                    elif not ctx.is_zero(x):
                        term = mul(x, prev[(Rm, C[:pos] + C[pos + 1:])])
                        acc = add(acc, term if (s - 1 + pos) % 2 == 0 else neg(term))
                if fast and ctx.is_modular:
                    acc %= ctx.modulus
                cur[(R, C)] = acc
        prev = cur
    sets = list(combinations(range(n), m))
    data = [prev[(R, C)] for R in sets for C in sets]
    N = len(sets)
    return Matrix(ctx, N, N, data)


def compound_by_minors(g: Matrix, m: int) -> Matrix:
    """Reference compound: one det_division_free call per minor."""
    n = g.rows
    sets = list(combinations(range(n), m))
    data = [det_division_free(g.submatrix(R, C)) for R in sets for C in sets]
    return Matrix(g.context, len(sets), len(sets), data)


def wedge_transvection(context: RingContext, n: int, m: int, I: Sequence[int], J: Sequence[int], xi) -> Matrix:
    """The elementary transvection t_{I,J}(ξ) of GL_N, N = C(n, m), in the lex basis."""
    N = comb(n, m)
    t = Transvection(N, lex_rank(I, n) - 1, lex_rank(J, n) - 1, xi)
    return transvection_matrix(context, t)
