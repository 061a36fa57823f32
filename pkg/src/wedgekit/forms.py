"""Invariant forms built from signed partitions into m-blocks, and their stabilizers.

For a set V with |V| = k*m, the k-linear form f_V has coefficient
``sign_shuffle(I_1, ..., I_k)`` on every ordered partition (I_1, ..., I_k) of
V into m-blocks.  For even m the block order does not affect the sign and f_V
is the full polarization of the degree-k polynomial q_V (one term per
unordered partition).  For odd m, f_V is alternating and q_V vanishes on a
single vector, so f_V is the object that gets stabilized.

Stabilizer membership compares *images*: for even m the coefficients of the
polynomial q_V(gx), for odd m the full table of f_V(gx^1, ..., gx^k).  The
two agree whenever k! is invertible; in small characteristic only the
polynomial keeps the orthogonal-type stabilizer from growing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from math import comb, factorial
from typing import Any, Iterator, Sequence

import numpy as np

from .exterior import IndexSet, _rank_table, compound, index_sets, sign_shuffle
from .linalg import Matrix, det_division_free
from .ring import RingContext, RingElement, integers, polynomial_ring

__all__ = [
    "MultilinearForm",
    "FormIdealBasis",
    "FormTable",
    "ordered_partitions",
    "unordered_partitions",
    "build_form",
    "build_form_ideal",
    "transform_form",
    "form_image",
    "membership_Gf",
    "membership_Gf_bar",
    "membership_GY_bar",
    "GYMultipliers",
    "symbolic_invariance_check",
    "numeric_invariance_check",
    "q_polynomial",
    "f_polynomial",
    "form_to_json",
    "form_from_json",
    "SYMBOLIC_MAX_N",
]

SYMBOLIC_MAX_N = 20


def unordered_partitions(V: Sequence[int], m: int) -> Iterator[tuple[IndexSet, ...]]:
    """Partitions of V into m-blocks, each listed once with blocks sorted by minimum."""
    V = tuple(sorted(V))
    if not V:
        yield ()
        return
    first, rest = V[0], V[1:]
    for others in combinations(rest, m - 1):
        block = (first,) + others
        remaining = tuple(x for x in rest if x not in others)
        for tail in unordered_partitions(remaining, m):
            yield (block,) + tail


def ordered_partitions(V: Sequence[int], m: int) -> Iterator[tuple[IndexSet, ...]]:
    for P in unordered_partitions(V, m):
        yield from permutations(P)


@dataclass(frozen=True)
class MultilinearForm:
    n: int
    m: int
    V: tuple[int, ...]
    coefficients: dict = field(compare=False, repr=False)

    @property
    def arity(self) -> int:
        return len(self.V) // self.m

    k = arity

    @property
    def N(self) -> int:
        return comb(self.n, self.m)

    @property
    def alternating(self) -> bool:
        return self.m % 2 == 1

    @cached_property
    def canonical_keys(self) -> tuple[tuple[IndexSet, ...], ...]:
        """One key per unordered partition: blocks sorted by their minimum."""
        return tuple(unordered_partitions(self.V, self.m))

    @cached_property
    def rank_coefficients(self) -> dict[tuple[int, ...], int]:
        """Coefficients keyed by 0-based lex ranks."""
        table = _rank_table(self.n, self.m)
        return {tuple(table[I] - 1 for I in key): s for key, s in self.coefficients.items()}

    @cached_property
    def canonical_rank_coefficients(self) -> dict[tuple[int, ...], int]:
        table = _rank_table(self.n, self.m)
        return {tuple(table[I] - 1 for I in key): self.coefficients[key] for key in self.canonical_keys}

    def dense(self, canonical_only: bool = False) -> np.ndarray:
        arr = np.zeros((self.N,) * self.arity, dtype=np.int64)
        src = self.canonical_rank_coefficients if canonical_only else self.rank_coefficients
        for key, s in src.items():
            arr[key] = s
        return arr

    def monomials(self) -> dict[tuple[int, ...], int]:
        """q_V as {sorted tuple of 0-based ranks: coefficient}."""
        return {tuple(sorted(k)): s for k, s in self.canonical_rank_coefficients.items()}

    def evaluate(self, context: RingContext, *vectors: Sequence[Any]) -> Any:
        """f_V(x^1, ..., x^k) for vectors of payloads in lex coordinates."""
        if len(vectors) != self.arity:
            raise ValueError(f"form takes {self.arity} vectors")
        total = context.zero()
        for key, s in self.rank_coefficients.items():
            term = context.from_int(s)
            for vec, r in zip(vectors, key):
                term = context.mul(term, vec[r])
            total = context.add(total, term)
        return total

    def evaluate_q(self, context: RingContext, x: Sequence[Any]) -> Any:
        total = context.zero()
        for key, s in self.monomials().items():
            term = context.from_int(s)
            for r in key:
                term = context.mul(term, x[r])
            total = context.add(total, term)
        return total


def build_form(n: int, m: int, V: Sequence[int] | None = None) -> MultilinearForm:
    V = tuple(range(1, n + 1)) if V is None else tuple(sorted(V))
    if len(set(V)) != len(V) or any(not 1 <= v <= n for v in V):
        raise ValueError(f"V={V} is not a subset of [1, {n}]")
    if m < 1 or len(V) % m:
        raise ValueError(f"m={m} does not divide |V|={len(V)}")
    coefficients = {key: sign_shuffle(key) for key in ordered_partitions(V, m)}
    return MultilinearForm(n, m, V, coefficients)


@dataclass(frozen=True)
class FormIdealBasis:
    """The forms f_V over all (m*l)-subsets V of [n], where n = l*m + r, 0 < r < m."""

    n: int
    m: int
    forms: tuple[MultilinearForm, ...]

    @property
    def l(self) -> int:
        return self.n // self.m

    @property
    def r(self) -> int:
        return self.n % self.m

    @property
    def p(self) -> int:
        return len(self.forms)


@lru_cache(maxsize=None)
def build_form_ideal(n: int, m: int) -> FormIdealBasis:
    l, r = divmod(n, m)
    if r == 0:
        raise ValueError(f"m={m} divides n={n}: use build_form")
    if l == 0:
        raise ValueError(f"m={m} exceeds n={n}")
    forms = tuple(build_form(n, m, V) for V in combinations(range(1, n + 1), m * l))
    return FormIdealBasis(n, m, forms)


# ------------------------------------------------------------------ transforms


def _matrix_array(g: Matrix) -> np.ndarray:
    ctx = g.context
    if ctx.is_modular or ctx.kind == "Z":
        return g.to_numpy()
    if ctx.kind == "Q":
        arr = np.empty(g.rows * g.cols, dtype=object)
        arr[:] = list(g.data)
        return arr.reshape(g.shape)
    arr = np.empty(g.rows * g.cols, dtype=object)
    arr[:] = [RingElement(ctx, x) for x in g.data]
    return arr.reshape(g.shape)


def _lift_table(ctx: RingContext, table: np.ndarray) -> np.ndarray:
    if ctx.is_modular:
        return table % ctx.modulus
    if ctx.kind in ("Z", "Q"):
        return table.astype(object)
    out = np.empty(table.shape, dtype=object)
    flat = out.reshape(-1)
    flat[:] = [ctx.element(int(v)) for v in table.reshape(-1)]
    return out


def _contract(ctx: RingContext, table: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Apply G to every slot: T'[J] = sum_I T[I] prod_s G[I_s, J_s]."""
    k = table.ndim
    for s in range(k):
        table = np.moveaxis(np.tensordot(table, G, axes=([s], [0])), -1, s)
        if ctx.is_modular:
            table %= ctx.modulus
    return table


@dataclass
class FormTable:
    """A coefficient table over a ring, indexed by k-tuples of 0-based lex ranks."""

    context: RingContext
    array: np.ndarray

    def payload(self, key: tuple[int, ...]) -> Any:
        v = self.array[key]
        if isinstance(v, RingElement):
            return v.value
        if self.context.kind == "Q":
            return v
        return self.context.coerce(int(v))

    def nonzero(self) -> dict[tuple[int, ...], Any]:
        ctx = self.context
        out = {}
        for key in zip(*np.nonzero(_nonzero_mask(ctx, self.array))):
            out[tuple(int(i) for i in key)] = self.payload(tuple(key))
        return out

    def __eq__(self, other):
        if not isinstance(other, FormTable):
            return NotImplemented
        return self.context == other.context and self.nonzero() == other.nonzero()


def _nonzero_mask(ctx: RingContext, arr: np.ndarray) -> np.ndarray:
    if arr.dtype != object:
        return arr != 0
    flat = arr.reshape(-1)
    if ctx.kind in ("Z", "Q"):
        mask = np.array([x != 0 for x in flat], dtype=bool)
    else:
        mask = np.array([not ctx.is_zero(x.value if isinstance(x, RingElement) else ctx.coerce(x)) for x in flat], dtype=bool)
    return mask.reshape(arr.shape)


def transform_form(F: MultilinearForm, g: Matrix, canonical_only: bool = False) -> FormTable:
    """Coefficient table of (x^1, ..., x^k) -> F(g x^1, ..., g x^k)."""
    if g.rows != F.N or g.cols != F.N:
        raise ValueError(f"form lives on rank {F.N}, matrix is {g.rows}x{g.cols}")
    ctx = g.context
    table = _lift_table(ctx, F.dense(canonical_only))
    return FormTable(ctx, _contract(ctx, table, _matrix_array(g)))


def _symmetrize(table: FormTable) -> dict[tuple[int, ...], Any]:
    """Coefficients of the polynomial x -> T(x, ..., x), keyed by sorted rank tuples."""
    ctx = table.context
    out: dict[tuple[int, ...], Any] = {}
    for key, v in table.nonzero().items():
        mono = tuple(sorted(key))
        out[mono] = ctx.add(out[mono], v) if mono in out else v
    return {k: v for k, v in out.items() if not ctx.is_zero(v)}


def form_image(F: MultilinearForm, g: Matrix) -> dict[tuple[int, ...], Any]:
    """The transformed form as a sparse coefficient map.

    Even m: coefficients of q_V(gx) keyed by sorted rank tuples.
    Odd m: the full table of f_V(gx^1, ..., gx^k).
    """
    if F.alternating:
        return transform_form(F, g).nonzero()
    return _symmetrize(transform_form(F, g, canonical_only=True))


def _reference_image(F: MultilinearForm, ctx: RingContext) -> dict[tuple[int, ...], Any]:
    src = F.rank_coefficients if F.alternating else F.monomials()
    return {k: ctx.from_int(s) for k, s in src.items()}


def _scaled(ctx: RingContext, image: dict, lam: Any) -> dict:
    out = {}
    for k, v in image.items():
        w = ctx.mul(lam, v)
        if not ctx.is_zero(w):
            out[k] = w
    return out


def _require_divisible(F_n: int, m: int):
    if F_n % m:
        raise ValueError(f"m={m} does not divide n={F_n}: use membership_GY_bar")


def membership_Gf(g: Matrix, n: int, m: int) -> bool:
    _require_divisible(n, m)
    F = _cached_form(n, m)
    return form_image(F, g) == _reference_image(F, g.context)


def membership_Gf_bar(g: Matrix, n: int, m: int) -> RingElement | None:
    """The unit multiplier λ with F∘g = λ·F, or None."""
    _require_divisible(n, m)
    F = _cached_form(n, m)
    ctx = g.context
    image = form_image(F, g)
    ref = _reference_image(F, ctx)
    lead = min(ref)
    lam = ctx.mul(image.get(lead, ctx.zero()), ref[lead])  # ref[lead] = ±1
    if not ctx.is_unit(lam):
        return None
    if image != _scaled(ctx, ref, lam):
        return None
    return RingElement(ctx, lam)


@lru_cache(maxsize=None)
def _cached_form(n: int, m: int) -> MultilinearForm:
    return build_form(n, m)


@dataclass(frozen=True)
class GYMultipliers:
    """F_{V_j}∘g = Σ_l coefficients[j][l] F_{V_l}; the diagonal entries are the λ's."""

    context: RingContext
    coefficients: tuple[tuple[Any, ...], ...]

    @property
    def multipliers(self) -> list[RingElement]:
        return [RingElement(self.context, row[j]) for j, row in enumerate(self.coefficients)]

    def c(self, j: int, l: int) -> RingElement:
        return RingElement(self.context, self.coefficients[j][l])


def membership_GY_bar(g: Matrix, n: int, m: int) -> GYMultipliers | None:
    if n % m == 0:
        raise ValueError(f"m={m} divides n={n}: use membership_Gf_bar")
    basis = build_form_ideal(n, m)
    ctx = g.context
    refs = [_reference_image(F, ctx) for F in basis.forms]
    leads = [min(ref) for ref in refs]
    rows = []
    for j, F in enumerate(basis.forms):
        image = form_image(F, g)
        # supports of distinct V are disjoint, so each coefficient is read off its own lead
        coeffs = [ctx.mul(image.get(lead, ctx.zero()), ref[lead]) for lead, ref in zip(leads, refs)]
        expected: dict = {}
        for a, ref in zip(coeffs, refs):
            expected.update(_scaled(ctx, ref, a))
        if image != expected:
            return None
        rows.append(tuple(coeffs))
    # g must carry the span of the f_V onto itself; the diagonal alone need not be
    # units (for ∧^m h the coefficient matrix is a compound of h)
    if not ctx.is_unit(det_division_free(Matrix(ctx, len(rows), len(rows), [c for row in rows for c in row]))):
        return None
    return GYMultipliers(ctx, tuple(rows))


# ------------------------------------------------------------------ polynomials


def _var_name(I: IndexSet, slot: int | None = None) -> str:
    body = "_".join(map(str, I)) if any(i > 9 for i in I) else "".join(map(str, I))
    return f"x{body}" if slot is None else f"x{slot}_{body}"


def q_polynomial(F: MultilinearForm, ring: RingContext | None = None) -> RingElement:
    """q_V as a polynomial in variables x_I (even m only)."""
    if F.alternating:
        raise ValueError("q vanishes identically for odd m; use f_polynomial")
    ring = ring or polynomial_ring(integers(), [_var_name(I) for I in index_sets(F.n, F.m)])
    total = ring.element(0)
    for key in F.canonical_keys:
        term = ring.element(F.coefficients[key])
        for I in key:
            term = term * ring.var(_var_name(I))
        total = total + term
    return total


def f_polynomial(F: MultilinearForm, ring: RingContext | None = None) -> RingElement:
    """f_V as a polynomial in slot variables x{s}_I, s = 1..k."""
    names = [_var_name(I, s) for s in range(1, F.arity + 1) for I in index_sets(F.n, F.m)]
    ring = ring or polynomial_ring(integers(), names)
    total = ring.element(0)
    for key, c in F.coefficients.items():
        term = ring.element(c)
        for s, I in enumerate(key, start=1):
            term = term * ring.var(_var_name(I, s))
        total = total + term
    return total


def symbolic_invariance_check(n: int, m: int) -> bool:
    """Decide q(∧^m g · x) = det(g) q(x) as a polynomial identity over Z.

    g is the generic n x n matrix.  For odd m the alternating form f is used
    with one block of variables per slot.
    """
    if n % m:
        raise ValueError(f"m={m} does not divide n={n}")
    if comb(n, m) > SYMBOLIC_MAX_N or n > 6:
        raise ValueError(f"symbolic check capped at n <= 6 and C(n, m) <= {SYMBOLIC_MAX_N}")
    F = build_form(n, m)
    sets = index_sets(n, m)
    k = F.arity
    gnames = [f"g{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    slots = [None] if not F.alternating else list(range(1, k + 1))
    xnames = [_var_name(I, s) for s in slots for I in sets]
    R = polynomial_ring(integers(), gnames + xnames)
    G = Matrix(R, n, n, [R.var(v).value for v in gnames])
    W = compound(G, m)
    N = len(sets)
    # (W x)_I = sum_J W[I, J] x_J, one linear form per slot
    linear = {}
    for s in slots:
        for a, I in enumerate(sets):
            acc = {}
            for b, J in enumerate(sets):
                acc = R.add(acc, R.mul(W.entry(a, b), R.var(_var_name(J, s)).value))
            linear[(s, I)] = acc
    lhs: dict = {}
    keys = F.canonical_keys if not F.alternating else list(F.coefficients)
    for key in keys:
        term = R.from_int(F.coefficients[key])
        for pos, I in enumerate(key):
            term = R.mul(term, linear[(slots[0] if not F.alternating else pos + 1, I)])
        lhs = R.add(lhs, term)
    base = q_polynomial(F, R) if not F.alternating else f_polynomial(F, R)
    rhs = R.mul(det_division_free(G), base.value)
    return lhs == rhs


def numeric_invariance_check(n: int, m: int, ring: RingContext, samples: int, seed: int = 0) -> list[Matrix]:
    """q(∧^m g · x) = det(g) q(x) on random g over a finite ring; returns failures.

    g ranges over all of M_n(R), invertible or not: the identity is polynomial.
    """
    if n % m:
        raise ValueError(f"m={m} does not divide n={n}")
    rng = np.random.default_rng(seed)
    F = _cached_form(n, m)
    ref = _reference_image(F, ring)
    failures = []
    for _ in range(samples):
        g = Matrix(ring, n, n, [int(x) for x in rng.integers(0, ring.modulus, n * n)])
        if form_image(F, compound(g, m)) != _scaled(ring, ref, det_division_free(g)):
            failures.append(g)
    return failures


# ------------------------------------------------------------------------ JSON


def form_to_json(F: MultilinearForm) -> dict:
    table = _rank_table(F.n, F.m)
    keys = sorted(F.coefficients, key=lambda key: [table[I] for I in key])
    return {
        "n": F.n,
        "m": F.m,
        "V": list(F.V),
        "arity": F.arity,
        "monomials": [{"blocks": [list(I) for I in key], "sign": F.coefficients[key]} for key in keys],
    }


def form_from_json(doc: dict | str) -> MultilinearForm:
    if isinstance(doc, str):
        doc = json.loads(doc)
    coefficients = {tuple(tuple(b) for b in mono["blocks"]): int(mono["sign"]) for mono in doc["monomials"]}
    F = MultilinearForm(int(doc["n"]), int(doc["m"]), tuple(doc["V"]), coefficients)
    if F.arity != int(doc["arity"]):
        raise ValueError("arity does not match |V|/m")
    return F
