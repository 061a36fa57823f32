"""Exact commutative rings, their elements, and principal ideals.

A :class:`RingContext` knows how to do arithmetic on *payloads*: plain Python
objects (``int``, :class:`fractions.Fraction`, pairs, dicts) that carry no
reference back to the ring.  Matrices and forms store payloads and route every
operation through the context; :class:`RingElement` is the user-facing wrapper
with operator overloading.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

from sympy import isprime

__all__ = [
    "RingContext",
    "RingElement",
    "PrincipalIdeal",
    "integers",
    "rationals",
    "integers_mod",
    "prime_field",
    "dual_numbers",
    "polynomial_ring",
    "parse_ring",
    "ideal_normalize",
    "ideal_ops",
    "poly_arith",
]

INTEGERS = "Z"
RATIONALS = "Q"
INTEGERS_MOD = "Z/k"
PRIME_FIELD = "F_p"
DUAL = "dual"
POLYNOMIAL = "poly"


@dataclass(frozen=True)
class RingContext:
    kind: str
    modulus: int | None = None
    base: RingContext | None = None
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == INTEGERS_MOD and (self.modulus is None or self.modulus < 2):
            raise ValueError("Z/k requires k >= 2")
        if self.kind == PRIME_FIELD and not (self.modulus and isprime(self.modulus)):
            raise ValueError(f"F_p requires p prime, got {self.modulus}")
        if self.kind == DUAL and (self.base is None or not self.base.is_field):
            raise ValueError("dual numbers are provided only over fields")
        if self.kind == POLYNOMIAL:
            if self.base is None:
                raise ValueError("polynomial ring needs a coefficient ring")
            if len(set(self.variables)) != len(self.variables):
                raise ValueError("polynomial variable names must be distinct")
        if self.kind not in (INTEGERS, RATIONALS, INTEGERS_MOD, PRIME_FIELD, DUAL, POLYNOMIAL):
            raise ValueError(f"unknown ring kind {self.kind!r}")

    # ------------------------------------------------------------------ info

    def __str__(self) -> str:
        if self.kind in (INTEGERS, RATIONALS):
            return self.kind
        if self.kind == INTEGERS_MOD:
            return f"Z/{self.modulus}"
        if self.kind == PRIME_FIELD:
            return f"F{self.modulus}"
        if self.kind == DUAL:
            return f"{self.base}[eps]"
        return f"{self.base}[{','.join(self.variables)}]"

    @property
    def is_field(self) -> bool:
        return self.kind in (RATIONALS, PRIME_FIELD)

    @property
    def is_modular(self) -> bool:
        """True for Z/k and F_p, whose payloads are reduced ints."""
        return self.kind in (INTEGERS_MOD, PRIME_FIELD)

    @property
    def is_finite(self) -> bool:
        return self.is_modular

    @property
    def characteristic(self) -> int:
        if self.is_modular:
            return self.modulus
        if self.kind in (DUAL, POLYNOMIAL):
            return self.base.characteristic
        return 0

    def elements(self) -> list[int]:
        """All payloads of a finite ring, in increasing order."""
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return list(range(self.modulus))

    # --------------------------------------------------------------- payloads

    def zero(self) -> Any:
        if self.kind == RATIONALS:
            return Fraction(0)
        if self.kind == DUAL:
            z = self.base.zero()
            return (z, z)
        if self.kind == POLYNOMIAL:
            return {}
        return 0

    def one(self) -> Any:
        return self.from_int(1)

    def from_int(self, value: int) -> Any:
        kind = self.kind
        if kind == INTEGERS:
            return int(value)
        if kind == RATIONALS:
            return Fraction(value)
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return int(value) % self.modulus
        if kind == DUAL:
            return (self.base.from_int(value), self.base.zero())
        c = self.base.from_int(value)
        if self.base.is_zero(c):
            return {}
        return {(0,) * len(self.variables): c}

    def coerce(self, value: Any) -> Any:
        """Turn an int, Fraction, RingElement or raw payload into a canonical payload."""
        if isinstance(value, RingElement):
            if value.context != self:
                raise ValueError(f"element of {value.context} used in {self}")
            return value.value
        if isinstance(value, bool):
            value = int(value)
        kind = self.kind
        if isinstance(value, int):
            return self.from_int(value)
        if kind == RATIONALS and isinstance(value, Fraction):
            return value
        if kind == DUAL and isinstance(value, tuple) and len(value) == 2:
            return (self.base.coerce(value[0]), self.base.coerce(value[1]))
        if kind == POLYNOMIAL and isinstance(value, Mapping):
            out = {}
            for mono, c in value.items():
                c = self.base.coerce(c)
                if not self.base.is_zero(c):
                    out[tuple(mono)] = c
            return out
        if kind in (INTEGERS_MOD, PRIME_FIELD) and isinstance(value, Fraction):
            return self.mul(self.from_int(value.numerator), self.inv(self.from_int(value.denominator)))
        raise TypeError(f"cannot interpret {value!r} in {self}")

    def element(self, value: Any) -> RingElement:
        return RingElement(self, self.coerce(value))

    def is_zero(self, a: Any) -> bool:
        if self.kind == DUAL:
            return self.base.is_zero(a[0]) and self.base.is_zero(a[1])
        if self.kind == POLYNOMIAL:
            return not a
        return a == 0

    def eq(self, a: Any, b: Any) -> bool:
        return a == b

    def add(self, a: Any, b: Any) -> Any:
        kind = self.kind
        if kind in (INTEGERS, RATIONALS):
            return a + b
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return (a + b) % self.modulus
        if kind == DUAL:
            B = self.base
            return (B.add(a[0], b[0]), B.add(a[1], b[1]))
        return _poly_add(self.base, a, b)

    def neg(self, a: Any) -> Any:
        kind = self.kind
        if kind in (INTEGERS, RATIONALS):
            return -a
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return (-a) % self.modulus
        if kind == DUAL:
            return (self.base.neg(a[0]), self.base.neg(a[1]))
        B = self.base
        return {mono: B.neg(c) for mono, c in a.items()}

    def sub(self, a: Any, b: Any) -> Any:
        return self.add(a, self.neg(b))

    def mul(self, a: Any, b: Any) -> Any:
        kind = self.kind
        if kind in (INTEGERS, RATIONALS):
            return a * b
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return (a * b) % self.modulus
        if kind == DUAL:
            B = self.base
            # eps^2 = 0
            return (B.mul(a[0], b[0]), B.add(B.mul(a[0], b[1]), B.mul(a[1], b[0])))
        return _poly_mul(self.base, a, b)

    def pow(self, a: Any, e: int) -> Any:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one()
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def is_unit(self, a: Any) -> bool:
        kind = self.kind
        if kind == INTEGERS:
            return a in (1, -1)
        if kind == RATIONALS:
            return a != 0
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return math.gcd(a, self.modulus) == 1
        if kind == DUAL:
            return self.base.is_unit(a[0])
        if not a or len(a) > 1:
            return False
        (mono, c), = a.items()
        return not any(mono) and self.base.is_unit(c)

    def inv(self, a: Any) -> Any:
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a!r} is not a unit in {self}")
        kind = self.kind
        if kind == INTEGERS:
            return a
        if kind == RATIONALS:
            return 1 / a
        if kind in (INTEGERS_MOD, PRIME_FIELD):
            return pow(a, -1, self.modulus)
        if kind == DUAL:
            B = self.base
            a0 = B.inv(a[0])
            # (a + eps b)^-1 = a^-1 - eps b a^-2
            return (a0, B.neg(B.mul(a[1], B.mul(a0, a0))))
        (mono, c), = a.items()
        return {mono: self.base.inv(c)}

    def lift(self, a: Any) -> int:
        """Integer representative of a Z, Z/k or F_p payload."""
        if self.kind in (INTEGERS, INTEGERS_MOD, PRIME_FIELD):
            return a
        raise TypeError(f"no integer lift in {self}")

    def format(self, a: Any) -> str:
        kind = self.kind
        if kind in (INTEGERS, RATIONALS, INTEGERS_MOD, PRIME_FIELD):
            return str(a)
        if kind == DUAL:
            return f"{self.base.format(a[0])} + eps*{self.base.format(a[1])}"
        return _poly_format(self, a)

    # ----------------------------------------------------------- polynomials

    def var(self, name: str) -> RingElement:
        if self.kind != POLYNOMIAL:
            raise TypeError(f"{self} has no variables")
        i = self.variables.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self.variables)))
        return RingElement(self, {mono: self.base.one()})

    def gens(self) -> list[RingElement]:
        return [self.var(v) for v in self.variables]


def integers() -> RingContext:
    return RingContext(INTEGERS)


def rationals() -> RingContext:
    return RingContext(RATIONALS)


def integers_mod(k: int) -> RingContext:
    return RingContext(INTEGERS_MOD, modulus=k)


def prime_field(p: int) -> RingContext:
    return RingContext(PRIME_FIELD, modulus=p)


def dual_numbers(base: RingContext) -> RingContext:
    return RingContext(DUAL, base=base)


def polynomial_ring(base: RingContext, variables: Iterable[str]) -> RingContext:
    return RingContext(POLYNOMIAL, base=base, variables=tuple(variables))


_RING_SPEC = re.compile(r"^\s*(?:(Z|ZZ|Q|QQ)|(?:Z/|Z_|ZMOD)(\d+)|(?:F_?|GF\(?)(\d+)\)?)\s*$", re.I)


def parse_ring(spec: str) -> RingContext:
    """Parse ``"Z"``, ``"Q"``, ``"Z/4"``, ``"F2"``, ``"F_5"`` or ``"GF(7)"``."""
    match = _RING_SPEC.match(spec)
    if not match:
        raise ValueError(f"unrecognised ring spec {spec!r}")
    whole, k, p = match.groups()
    if whole:
        return integers() if whole.upper().startswith("Z") else rationals()
    if k:
        return integers_mod(int(k))
    return prime_field(int(p))


# ---------------------------------------------------------------- polynomials


def _poly_add(base: RingContext, a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    if base.kind == INTEGERS:
        for mono, c in b.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return out
    for mono, c in b.items():
        if mono in out:
            s = base.add(out[mono], c)
            if base.is_zero(s):
                del out[mono]
            else:
                out[mono] = s
        else:
            out[mono] = c
    return out


def _poly_mul(base: RingContext, a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    out: dict = {}
    get = out.get
    if base.kind == INTEGERS:
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                mono = tuple([x + y for x, y in zip(m1, m2)])
                out[mono] = get(mono, 0) + c1 * c2
        return {mono: c for mono, c in out.items() if c}
    zero = base.zero()
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = tuple([x + y for x, y in zip(m1, m2)])
            out[mono] = base.add(get(mono, zero), base.mul(c1, c2))
    return {mono: c for mono, c in out.items() if not base.is_zero(c)}


def _poly_format(ctx: RingContext, a: dict) -> str:
    if not a:
        return "0"
    terms = []
    for mono in sorted(a, reverse=True):
        factors = [
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(ctx.variables, mono)
            if e
        ]
        coef = ctx.base.format(a[mono])
        if not factors:
            terms.append(coef)
        elif coef == "1":
            terms.append("*".join(factors))
        elif coef == "-1":
            terms.append("-" + "*".join(factors))
        else:
            terms.append(f"{coef}*" + "*".join(factors))
    return " + ".join(terms).replace("+ -", "- ")


def _poly_eval(ctx: RingContext, a: dict, values: list) -> Any:
    base = ctx.base
    total = base.zero()
    for mono, c in a.items():
        term = c
        for v, e in zip(values, mono):
            if e:
                term = base.mul(term, base.pow(v, e))
        total = base.add(total, term)
    return total


# --------------------------------------------------------------------- element


class RingElement:
    """An immutable element of a :class:`RingContext`."""

    __slots__ = ("context", "value")

    def __init__(self, context: RingContext, value: Any):
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("RingElement is immutable")

    def _other(self, other):
        if isinstance(other, RingElement):
            if other.context != self.context:
                raise ValueError(f"ring mismatch: {self.context} vs {other.context}")
            return other.value
        return self.context.coerce(other)

    def __add__(self, other):
        return RingElement(self.context, self.context.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.context, self.context.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return RingElement(self.context, self.context.sub(self._other(other), self.value))

    def __mul__(self, other):
        return RingElement(self.context, self.context.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.context, self.context.neg(self.value))

    def __pow__(self, e: int):
        return RingElement(self.context, self.context.pow(self.value, e))

    def __truediv__(self, other):
        return RingElement(
            self.context, self.context.mul(self.value, self.context.inv(self._other(other)))
        )

    def inverse(self) -> RingElement:
        return RingElement(self.context, self.context.inv(self.value))

    def is_unit(self) -> bool:
        return self.context.is_unit(self.value)

    def is_zero(self) -> bool:
        return self.context.is_zero(self.value)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.context == other.context and self.value == other.value
        try:
            return self.value == self.context.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        v = self.value
        if isinstance(v, dict):
            v = frozenset(v.items())
        return hash((self.context, v))

    def __int__(self):
        return self.context.lift(self.value)

    def __repr__(self):
        return f"RingElement({self.context}, {self.context.format(self.value)})"

    def __str__(self):
        return self.context.format(self.value)

    # dual numbers
    @property
    def real(self) -> RingElement:
        return RingElement(self.context.base, self.value[0])

    @property
    def eps(self) -> RingElement:
        return RingElement(self.context.base, self.value[1])

    # polynomials
    def evaluate(self, assignment: Mapping[str, Any]) -> RingElement:
        """Substitute base-ring values for every variable occurring in ``self``."""
        ctx = self.context
        if ctx.kind != POLYNOMIAL:
            raise TypeError("evaluate needs a polynomial")
        used = {
            name for mono in self.value for name, e in zip(ctx.variables, mono) if e
        }
        missing = sorted(used - set(assignment))
        if missing:
            raise KeyError(f"no value given for variable(s) {', '.join(missing)}")
        values = [ctx.base.coerce(assignment.get(name, 0)) for name in ctx.variables]
        return RingElement(ctx.base, _poly_eval(ctx, self.value, values))

    def degree(self) -> int:
        return max((sum(m) for m in self.value), default=-1)

    def terms(self) -> int:
        return len(self.value)


def poly_arith(p: RingElement, q: RingElement | None, op: str, assignment=None):
    """Polynomial add/mul/eval/equal, for callers that prefer a single entry point."""
    if p.context.kind != POLYNOMIAL:
        raise TypeError("poly_arith needs polynomial operands")
    if op == "eval":
        return p.evaluate(assignment or {})
    if q is None or q.context != p.context:
        raise ValueError("operands must share a polynomial ring")
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    if op == "equal":
        return p.value == q.value
    raise ValueError(f"unknown polynomial op {op!r}")


# ---------------------------------------------------------------------- ideals


@dataclass(frozen=True)
class PrincipalIdeal:
    """A principal ideal of Z or Z/k stored by its canonical generator.

    Over Z/k the generator is a non-negative divisor of k, with 0 standing for
    the zero ideal (so ``(k)`` is stored as 0).  Over Z it is ``|g|``.  F_p is
    handled as Z/p.
    """

    context: RingContext
    generator: int

    @property
    def is_zero(self) -> bool:
        return self.generator == 0

    @property
    def is_unit(self) -> bool:
        return self.generator == 1

    def _index(self) -> int:
        """Size of the ideal's quotient: the modulus of R/A (0 for R/(0) = Z)."""
        if self.context.kind == INTEGERS:
            return self.generator
        return self.generator or self.context.modulus

    def quotient_modulus(self) -> int:
        """k' with R/A = Z/k' (1 means the zero ring, 0 means Z itself)."""
        return self._index()

    def elements(self) -> set[int]:
        if not self.context.is_finite:
            raise ValueError("only ideals of finite rings can be enumerated")
        k = self.context.modulus
        step = self.generator or k
        return set(range(0, k, step))

    def __contains__(self, x) -> bool:
        x = self.context.coerce(x)
        if self.context.kind == INTEGERS:
            return x == 0 if self.generator == 0 else x % self.generator == 0
        step = self.generator or self.context.modulus
        return x % step == 0

    def __le__(self, other: PrincipalIdeal) -> bool:
        return ideal_ops(other, self, "contains")

    def __ge__(self, other: PrincipalIdeal) -> bool:
        return ideal_ops(self, other, "contains")

    def __add__(self, other: PrincipalIdeal) -> PrincipalIdeal:
        return ideal_ops(self, other, "sum")

    def __mul__(self, other: PrincipalIdeal) -> PrincipalIdeal:
        return ideal_ops(self, other, "product")

    def scale(self, c: int) -> PrincipalIdeal:
        return ideal_ops(self, None, "scale_by_integer", c)

    def __str__(self) -> str:
        return f"({self.generator})"

    def __repr__(self) -> str:
        return f"PrincipalIdeal({self.context}, ({self.generator}))"


def _check_ideal_ring(context: RingContext):
    if context.kind not in (INTEGERS, INTEGERS_MOD, PRIME_FIELD):
        raise ValueError("ideals supported only over ℤ and ℤ/k")


def ideal_normalize(context: RingContext, g) -> PrincipalIdeal:
    """The canonical form of the principal ideal ``(g)``."""
    _check_ideal_ring(context)
    g = context.coerce(g)
    if context.kind == INTEGERS:
        return PrincipalIdeal(context, abs(g))
    k = context.modulus
    d = math.gcd(g, k)
    return PrincipalIdeal(context, 0 if d == k else d)


def ideal_ops(a: PrincipalIdeal, b: PrincipalIdeal | None, op: str, c: int | None = None):
    """Sum, product, integer scaling, containment and equality of principal ideals.

    ``contains(a, b)`` is ``b ⊆ a``.
    """
    ctx = a.context
    if b is not None and b.context != ctx:
        raise ValueError(f"ideal ring mismatch: {ctx} vs {b.context}")
    if op == "sum":
        return ideal_normalize(ctx, math.gcd(a.generator, b.generator))
    if op == "product":
        return ideal_normalize(ctx, a.generator * b.generator)
    if op == "scale_by_integer":
        if c is None:
            raise ValueError("scale_by_integer needs an integer")
        return ideal_normalize(ctx, c * a.generator)
    if op == "contains":
        ga, gb = a._index(), b._index()
        if ctx.kind == INTEGERS:
            return gb % ga == 0 if ga else gb == 0
        return gb % ga == 0
    if op == "equals":
        return a.generator == b.generator
    raise ValueError(f"unknown ideal op {op!r}")
