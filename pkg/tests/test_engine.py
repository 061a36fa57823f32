import random

import numpy as np
import pytest

from oracles import order_gl, order_gl_mod_prime_power, order_sl, order_sl_mod_prime_power
from wedgekit.engine import ActionDomain, DomainCapExceeded, generate_group, orbit, order
from wedgekit.exterior import compound, lex_rank, wedge_transvection
from wedgekit.level import wedge_E_generators
from wedgekit.linalg import Matrix, Transvection, transvection_matrix
from wedgekit.ring import integers_mod, prime_field

F2, F3, Z4 = prime_field(2), prime_field(3), integers_mod(4)


def elementary(ring, n):
    return [transvection_matrix(ring, Transvection(n, i, j, 1)) for i in range(n) for j in range(n) if i != j]


@pytest.fixture(scope="module")
def wedge_E4_F2():
    return generate_group(wedge_E_generators(4, 2, F2), ActionDomain(F2, 6))


def test_trivial_group():
    chain = generate_group([], ActionDomain(F2, 3))
    assert order(chain) == 1
    assert chain.contains(Matrix.identity(F2, 3))
    assert not chain.contains(transvection_matrix(F2, Transvection(3, 0, 1, 1)))


def test_wedge_E4_F2(wedge_E4_F2):
    assert order(wedge_E4_F2) == order_gl(4, 2) == 20160
    assert wedge_E4_F2.verify()
    assert not wedge_E4_F2.contains(wedge_transvection(F2, 4, 2, (1, 2), (1, 3), 1))
    assert wedge_E4_F2.contains(compound(transvection_matrix(F2, Transvection(4, 0, 1, 1)), 2))


def test_cyclic_unipotent():
    chain = generate_group([transvection_matrix(F3, Transvection(2, 0, 1, 1))], ActionDomain(F3, 2))
    assert order(chain) == 3


def test_gl2_F3():
    gens = elementary(F3, 2) + [Matrix.diagonal(F3, [2, 1])]
    assert order(generate_group(gens, ActionDomain(F3, 2))) == order_gl(2, 3) == 48


@pytest.mark.parametrize(
    "ring, n, expected",
    [
        (F2, 4, order_sl(4, 2)),
        (F3, 3, order_sl(3, 3)),
        (prime_field(5), 3, order_sl(3, 5)),
        (Z4, 3, order_sl_mod_prime_power(3, 2, 2)),
        (integers_mod(8), 2, order_sl_mod_prime_power(2, 2, 3)),
        (integers_mod(9), 3, order_sl_mod_prime_power(3, 3, 2)),
    ],
    ids=str,
)
def test_elementary_group_orders(ring, n, expected):
    chain = generate_group(elementary(ring, n), ActionDomain(ring, n))
    assert order(chain) == expected


def test_gl_mod_prime_power():
    gens = elementary(Z4, 3) + [Matrix.diagonal(Z4, [3, 1, 1])]
    assert order(generate_group(gens, ActionDomain(Z4, 3))) == order_gl_mod_prime_power(3, 2, 2)


def test_sl6_Z4_from_transvections():
    chain = generate_group(elementary(Z4, 6), ActionDomain(Z4, 6))
    assert order(chain) == order_sl_mod_prime_power(6, 2, 2)


def test_wedge_E4_Z4_order():
    # ∧² is injective on SL_4(Z/4) up to ±1, and -1 ∈ SL_4 maps to the identity
    chain = generate_group(wedge_E_generators(4, 2, Z4), ActionDomain(Z4, 6))
    assert order(chain) == order_sl_mod_prime_power(4, 2, 2) // 2


def test_orbits(wedge_E4_F2):
    domain = ActionDomain(F2, 6)
    gens = wedge_E_generators(4, 2, F2)
    assert orbit(0, gens, domain) == [0]
    e12 = domain.basis_point(lex_rank((1, 2), 4) - 1)
    pts = orbit(e12, gens, domain)
    assert len(pts) == 35
    assert order(wedge_E4_F2) % len(pts) == 0
    small = ActionDomain(F2, 2)
    assert orbit(small.basis_point(0), [transvection_matrix(F2, Transvection(2, 0, 1, 1))], small) == [1]


def test_orbit_sizes_divide_order(wedge_E4_F2):
    sizes = wedge_E4_F2.orbit_sizes
    assert np.prod(sizes, dtype=object) == order(wedge_E4_F2)
    assert all(order(wedge_E4_F2) % s == 0 for s in sizes)


def test_random_words_are_members(wedge_E4_F2):
    gens = wedge_E_generators(4, 2, F2)
    rng = random.Random(0)
    for _ in range(30):
        g = Matrix.identity(F2, 6)
        for _ in range(rng.randint(1, 25)):
            g = g @ rng.choice(gens)
        assert wedge_E4_F2.contains(g)


def test_lagrange():
    domain = ActionDomain(Z4, 6)
    gens = wedge_E_generators(4, 2, Z4)
    small = order(generate_group(gens[:5], domain))
    big = order(generate_group(gens + [wedge_transvection(Z4, 4, 2, (1, 2), (3, 4), 2)], domain))
    assert big % small == 0 and big % order(generate_group(gens, domain)) == 0


def test_determinism():
    gens = wedge_E_generators(4, 2, Z4)
    a = generate_group(gens, ActionDomain(Z4, 6))
    b = generate_group(gens, ActionDomain(Z4, 6))
    assert a.fingerprint() == b.fingerprint()


def test_cap_and_errors(monkeypatch):
    with pytest.raises(DomainCapExceeded):
        ActionDomain(F3, 15)
    monkeypatch.setenv("WEDGEKIT_DOMAIN_CAP", str(3**15))
    from wedgekit.engine import domain_cap_from_env

    assert ActionDomain(F3, 15, domain_cap_from_env()).size == 3**15
    with pytest.raises(ValueError):
        generate_group([Matrix.zeros(F2, 2, 2)], ActionDomain(F2, 2))
    with pytest.raises(ValueError):
        generate_group([Matrix.identity(F2, 3)], ActionDomain(F2, 2))


def test_encoding_roundtrip():
    d = ActionDomain(Z4, 3)
    for code in range(d.size):
        assert d.encode_one(d.decode(code)) == code
    assert d.encode_one([1, 0, 0]) == 1 and d.encode_one([0, 1, 0]) == 4
