from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from oracles import ideal_elements
from wedgekit.ring import (
    PrincipalIdeal,
    dual_numbers,
    ideal_normalize,
    ideal_ops,
    integers,
    integers_mod,
    parse_ring,
    poly_arith,
    polynomial_ring,
    prime_field,
    rationals,
)

Z, Q = integers(), rationals()
CONTEXTS = [Z, Q, integers_mod(4), integers_mod(6), prime_field(5), dual_numbers(prime_field(5))]


def element(ctx, draw_int, draw_int2):
    if ctx.kind == "Q":
        return ctx.element(Fraction(draw_int, draw_int2 or 1))
    if ctx.kind == "dual":
        return ctx.element((draw_int, draw_int2))
    return ctx.element(draw_int)


small = st.integers(-20, 20)


@pytest.mark.parametrize("ctx", CONTEXTS, ids=str)
@given(a=small, b=small, c=small, d=small, e=small, f=small)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(ctx, a, b, c, d, e, f):
    x, y, z = element(ctx, a, b), element(ctx, c, d), element(ctx, e, f)
    zero, one = ctx.element(0), ctx.element(1)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x + zero == x and x * one == x
    assert x - x == zero


@given(a=st.integers(0, 4), b=st.integers(0, 4))
def test_dual_number_rules(a, b):
    D = dual_numbers(prime_field(5))
    ea, eb = D.element((1, a)), D.element((1, b))
    assert ea * eb == D.element((1, (a + b) % 5))
    assert ea.inverse() == D.element((1, -a))
    # eps^2 = 0
    eps = D.element((0, 1))
    assert eps * eps == D.element(0)


def test_ring_invariants():
    with pytest.raises(ValueError):
        integers_mod(1)
    with pytest.raises(ValueError):
        prime_field(6)
    with pytest.raises(ValueError):
        dual_numbers(integers_mod(4))
    with pytest.raises(ValueError):
        polynomial_ring(Z, ["x", "x"])
    assert integers_mod(4).element(7).value == 3
    assert Q.element(Fraction(4, -6)).value == Fraction(-2, 3)


@pytest.mark.parametrize(
    "spec, kind, modulus",
    [("Z", "Z", None), ("Q", "Q", None), ("Z/4", "Z/k", 4), ("F2", "F_p", 2), ("F_5", "F_p", 5), ("GF(7)", "F_p", 7)],
)
def test_parse_ring(spec, kind, modulus):
    ctx = parse_ring(spec)
    assert ctx.kind == kind and ctx.modulus == modulus


def test_parse_ring_rejects_garbage():
    with pytest.raises(ValueError):
        parse_ring("R")


# ------------------------------------------------------------------ ideals


def test_ideal_normalize_examples():
    assert ideal_normalize(integers_mod(4), 2).generator == 2
    assert ideal_normalize(integers_mod(4), 3).generator == 1
    assert ideal_normalize(integers_mod(6), 4).generator == 2
    assert ideal_normalize(Z, -6).generator == 6


def test_ideal_normalize_rejects_other_rings():
    with pytest.raises(ValueError, match="ideals supported only over"):
        ideal_normalize(Q, 2)


def test_ideal_ops_examples():
    Z4, Z6 = integers_mod(4), integers_mod(6)
    assert ideal_ops(ideal_normalize(Z4, 2), ideal_normalize(Z4, 0), "contains")
    assert ideal_ops(ideal_normalize(Z4, 2), None, "scale_by_integer", 2).is_zero
    assert ideal_ops(ideal_normalize(Z6, 2), ideal_normalize(Z6, 3), "sum").is_unit
    assert ideal_ops(ideal_normalize(Z6, 2), ideal_normalize(Z6, 8), "equals")


def test_ideal_context_mismatch():
    with pytest.raises(ValueError):
        ideal_ops(ideal_normalize(integers_mod(4), 2), ideal_normalize(integers_mod(6), 2), "sum")


@pytest.mark.parametrize("k", range(2, 65))
def test_ideal_lattice(k):
    R = integers_mod(k)
    ideals = {ideal_normalize(R, g) for g in range(k)}
    elems = {I: I.elements() for I in ideals}
    for I in ideals:
        assert elems[I] == ideal_elements(k, I.generator or k)
    for a in ideals:
        for b in ideals:
            assert (b <= a) == (elems[b] <= elems[a])
            s = a + b
            assert elems[s] == {(x + y) % k for x in elems[a] for y in elems[b]}
            p = a * b
            assert elems[p] <= elems[a] & elems[b]
            assert (a <= b and b <= a) == (a == b)


# ------------------------------------------------------------- polynomials


def test_poly_examples():
    P = polynomial_ring(Z, ["x", "y"])
    x, y = P.var("x"), P.var("y")
    assert poly_arith(x + y, x - y, "mul") == x * x - y * y
    assert poly_arith(x * x - y * y, None, "eval", {"x": 3, "y": 1}) == 8
    assert poly_arith(x * y, y * x, "equal")
    with pytest.raises(KeyError):
        (x * y).evaluate({"x": 1})


monomial = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
polys = st.dictionaries(monomial, st.integers(-5, 5), max_size=5)


@given(p=polys, q=polys, vals=st.tuples(small, small, small))
@settings(max_examples=80, deadline=None)
def test_poly_eval_is_homomorphism(p, q, vals):
    P = polynomial_ring(Z, ["x", "y", "z"])
    a, b = P.element(p), P.element(q)
    assign = dict(zip("xyz", vals))
    assert (a * b).evaluate(assign) == a.evaluate(assign) * b.evaluate(assign)
    assert (a + b).evaluate(assign) == a.evaluate(assign) + b.evaluate(assign)
    assert all(c != 0 for c in (a * b).value.values())
