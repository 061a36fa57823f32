from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from oracles import compound_leibniz, det_leibniz, lex_position
from wedgekit.exterior import (
    compound,
    compound_by_minors,
    distance,
    index_sets,
    lex_rank,
    sign_shuffle,
    unrank,
)
from wedgekit.linalg import Matrix, Transvection, det_division_free, transvection_matrix
from wedgekit.ring import integers, integers_mod, prime_field

Z = integers()


def test_lex_rank_examples():
    assert lex_rank((1, 2), 4) == 1
    assert lex_rank((3, 4), 4) == 6
    assert lex_rank((1, 4), 4) == 3


@pytest.mark.parametrize("n, m", [(n, m) for n in range(1, 9) for m in range(1, n + 1)])
def test_lex_rank_bijection(n, m):
    ranks = [lex_rank(I, n) for I in combinations(range(1, n + 1), m)]
    assert ranks == list(range(1, comb(n, m) + 1))
    for I in index_sets(n, m):
        assert lex_rank(I, n) == lex_position(I, n)
        assert unrank(lex_rank(I, n), n, m) == I


def test_index_set_validation():
    with pytest.raises(ValueError):
        lex_rank((2, 1), 4)
    with pytest.raises(ValueError):
        lex_rank((1, 5), 4)
    with pytest.raises(ValueError):
        unrank(7, 4, 2)


def test_sign_shuffle_examples():
    assert sign_shuffle([(1, 2), (3, 4)]) == 1
    assert sign_shuffle([(1, 3), (2, 4)]) == -1
    assert sign_shuffle([(1, 4), (2, 3)]) == 1
    with pytest.raises(ValueError):
        sign_shuffle([(1, 2), (2, 3)])


@given(st.permutations(range(1, 10)), st.sampled_from([1, 2, 3]))
def test_block_swap_sign(word, m):
    k = 9 // m if 9 % m == 0 else 2
    blocks = [tuple(sorted(word[i * m:(i + 1) * m])) for i in range(k)]
    swapped = [blocks[1], blocks[0]] + blocks[2:]
    assert sign_shuffle(swapped) == sign_shuffle(blocks) * (-1) ** (m * m)


def test_distance_examples():
    assert distance((1, 2), (1, 2)) == 2
    assert distance((1, 2), (3, 4)) == 0
    assert distance((1, 2), (1, 3)) == 1
    with pytest.raises(ValueError):
        distance((1, 2), (1, 2, 3))


@pytest.mark.parametrize("n, m", [(4, 2), (5, 2), (5, 3), (6, 3)])
def test_distance_properties(n, m):
    sets = index_sets(n, m)
    for I in sets:
        for J in sets:
            assert distance(I, J) == distance(J, I)
            assert (distance(I, J) == m) == (I == J)


def test_compound_examples():
    assert compound(Matrix.identity(Z, 5), 2) == Matrix.identity(Z, 10)
    a, b, c, d = 2, 3, 5, 7
    assert compound(Matrix.diagonal(Z, [a, b, c, d]), 2) == Matrix.diagonal(
        Z, [a * b, a * c, a * d, b * c, b * d, c * d]
    )
    xi = 5
    t = compound(transvection_matrix(Z, Transvection(4, 0, 1, xi)), 2)
    expected = [[int(i == j) for j in range(6)] for i in range(6)]
    r = lambda I: lex_position(I, 4) - 1
    expected[r((1, 3))][r((2, 3))] = xi
    expected[r((1, 4))][r((2, 4))] = xi
    assert t.to_rows() == expected
    with pytest.raises(ValueError):
        compound(Matrix.identity(Z, 3), 3)


def matrices(k, n):
    return st.lists(st.integers(0, k - 1), min_size=n * n, max_size=n * n)


@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_compound_matches_minor_oracle(data):
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(1, n - 1))
    entries = data.draw(matrices(6, n))
    g = Matrix(integers_mod(6), n, n, entries)
    rows = [entries[i * n:(i + 1) * n] for i in range(n)]
    assert compound(g, m).to_rows() == compound_leibniz(rows, m, 6)
    assert compound(g, m) == compound_by_minors(g, m)


@pytest.mark.parametrize("k", [4, 6, 8, 9])
@given(data=st.data())
@settings(max_examples=15, deadline=None)
def test_cauchy_binet(k, data):
    n = data.draw(st.integers(2, 6))
    m = data.draw(st.integers(1, n - 1))
    R = integers_mod(k)
    g = Matrix(R, n, n, data.draw(matrices(k, n)))
    h = Matrix(R, n, n, data.draw(matrices(k, n)))
    assert compound(g @ h, m) == compound(g, m) @ compound(h, m)


@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_compound_of_inverse(data):
    F = prime_field(5)
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(1, n - 1))
    g = Matrix(F, n, n, data.draw(matrices(5, n)))
    if not g.is_invertible():
        return
    assert compound(g.inverse(), m) == compound(g, m).inverse()


@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_sylvester_franke(data):
    n = data.draw(st.integers(2, 4))
    m = data.draw(st.integers(1, n - 1))
    entries = data.draw(st.lists(st.integers(-4, 4), min_size=n * n, max_size=n * n))
    g = Matrix(Z, n, n, entries)
    rows = [entries[i * n:(i + 1) * n] for i in range(n)]
    assert det_division_free(compound(g, m)) == det_leibniz(rows) ** comb(n - 1, m - 1)
