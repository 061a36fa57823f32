"""Lie algebra dimensions of form stabilizers, by linearizing at g = 1 + εX.

Over the dual numbers K[ε], F((1+εX)x^1, ..., (1+εX)x^k) = F + ε·D_X F with
D_X F = Σ_i F(x^1, ..., X x^i, ..., x^k).  The Lie algebra of a stabilizer is
the solution space of the linear conditions this imposes on X (plus auxiliary
multiplier unknowns); its dimension is a nullspace dimension.

Which coefficients are compared follows :mod:`wedgekit.forms`: for even m the
polynomial q_V, for odd m the alternating table f_V.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import asdict, dataclass
from math import comb
from typing import Any

from .forms import MultilinearForm, build_form, build_form_ideal
from .linalg import sparse_rank
from .ring import RingContext, parse_ring

__all__ = [
    "LieSystem",
    "LieReport",
    "assemble_Gf",
    "assemble_GY",
    "lie_dim_Gf",
    "lie_dim_Gf_bar",
    "lie_dim_GY_bar",
    "lie_dim",
    "derivation_image",
]

GROUPS = ("Gf", "GfBar", "GYBar")


@dataclass
class LieSystem:
    """Sparse linear system: rows map unknown index -> integer coefficient.

    Unknowns 0..N²-1 are the entries X[I, J] (index I*N + J, 0-based ranks);
    higher indices are multiplier unknowns.
    """

    N: int
    num_unknowns: int
    rows: dict
    auxiliary_kernel: int = 0

    def nullity(self, field: RingContext) -> int:
        if not field.is_field:
            raise ValueError(f"Lie dimensions need a field, got {field}")
        converted = []
        for key in sorted(self.rows):
            row = {}
            for var, c in self.rows[key].items():
                v = field.from_int(c)
                if not field.is_zero(v):
                    row[var] = v
            if row:
                converted.append(row)
        return self.num_unknowns - sparse_rank(field, converted)

    def x_dimension(self, field: RingContext) -> int:
        """Dimension of the projection of the solution space onto the X unknowns."""
        return self.nullity(field) - self.auxiliary_kernel


def derivation_image(F: MultilinearForm, X_entry) -> dict[tuple[int, ...], Any]:
    """D_X F as a sparse map, with X given by ``X_entry(I, J) -> int``.

    Keys follow :func:`wedgekit.forms.form_image`: sorted rank tuples for even
    m, full rank tuples for odd m.
    """
    N = F.N
    out: dict = defaultdict(int)
    for key, s in _terms(F):
        for i, I in enumerate(key):
            for J in range(N):
                x = X_entry(I, J)
                if x:
                    out[_slot_key(F, key, i, J)] += s * x
    return {k: v for k, v in out.items() if v}


def _terms(F: MultilinearForm):
    if F.alternating:
        return F.rank_coefficients.items()
    return F.canonical_rank_coefficients.items()


def _slot_key(F: MultilinearForm, key: tuple[int, ...], i: int, J: int) -> tuple[int, ...]:
    new = key[:i] + (J,) + key[i + 1:]
    return new if F.alternating else tuple(sorted(new))


def _own_key(F: MultilinearForm, key: tuple[int, ...]) -> tuple[int, ...]:
    return key if F.alternating else tuple(sorted(key))


def _add_derivation(rows: dict, F: MultilinearForm, tag) -> None:
    N = F.N
    for key, s in _terms(F):
        for i, I in enumerate(key):
            for J in range(N):
                row = rows[(tag, _slot_key(F, key, i, J))]
                var = I * N + J
                row[var] = row.get(var, 0) + s


def assemble_Gf(n: int, m: int, with_multiplier: bool) -> LieSystem:
    if n % m:
        raise ValueError(f"m={m} does not divide n={n}: use the GYBar system")
    F = build_form(n, m)
    N = F.N
    rows: dict = defaultdict(dict)
    _add_derivation(rows, F, 0)
    unknowns = N * N
    if with_multiplier:
        lam = N * N
        unknowns += 1
        for key, s in _terms(F):
            row = rows[(0, _own_key(F, key))]
            row[lam] = row.get(lam, 0) - s
    return LieSystem(N, unknowns, dict(rows))


def assemble_GY(n: int, m: int) -> LieSystem:
    """D_X F_{V_j} = Σ_l a_{jl} F_{V_l} for every j, unknowns X and a."""
    if n % m == 0:
        raise ValueError(f"m={m} divides n={n}: use the Gf systems")
    basis = build_form_ideal(n, m)
    forms = basis.forms
    p = len(forms)
    N = forms[0].N
    rows: dict = defaultdict(dict)
    for j, F in enumerate(forms):
        _add_derivation(rows, F, j)
        for l, G in enumerate(forms):
            var = N * N + j * p + l
            for key, s in _terms(G):
                row = rows[(j, _own_key(G, key))]
                row[var] = row.get(var, 0) - s
    # a with X = 0 solves the system iff Σ_l a_{jl} F_{V_l} = 0 for each j
    form_rows = [
        {(_own_key(G, key)): s for key, s in _terms(G)} for G in forms
    ]
    return LieSystem(N, N * N + p * p, dict(rows), auxiliary_kernel=_relations(form_rows, p))


def _relations(form_rows: list[dict], p: int) -> int:
    # forms are ±1 on pairwise disjoint supports, so they are independent over any field;
    # still computed rather than assumed
    from .ring import rationals

    Q = rationals()
    # rank of the p x (monomials) matrix equals the rank of its transpose
    columns: dict = defaultdict(dict)
    for l, row in enumerate(form_rows):
        for mono, s in row.items():
            columns[mono][l] = Q.from_int(s)
    rank = sparse_rank(Q, columns.values())
    return p * (p - rank)


def _field(field) -> RingContext:
    return parse_ring(field) if isinstance(field, str) else field


def lie_dim_Gf(n: int, m: int, field) -> int:
    return assemble_Gf(n, m, with_multiplier=False).x_dimension(_field(field))


def lie_dim_Gf_bar(n: int, m: int, field) -> int:
    return assemble_Gf(n, m, with_multiplier=True).x_dimension(_field(field))


def lie_dim_GY_bar(n: int, m: int, field) -> int:
    return assemble_GY(n, m).x_dimension(_field(field))


@dataclass
class LieReport:
    n: int
    m: int
    field: str
    group: str
    dim: int
    bound: int | None
    elapsed_ms: float

    @property
    def below_bound(self) -> bool:
        return self.bound is not None and self.dim < self.bound

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.dim <= self.bound

    def to_json(self) -> dict:
        return asdict(self)


def lie_dim(n: int, m: int, field, group: str) -> LieReport:
    """Compute one Lie dimension with its upper bound.

    The bound n²-1 (G_f) or n² (Ḡ_f, Ḡ_Y) is only claimed for n > 2m; in half
    dimension the stabilizer is orthogonal or symplectic and can be far larger
    (210 at (6,3)), and below it the forms say little.  There ``bound`` is None.
    """
    ctx = _field(field)
    start = time.perf_counter()
    if group == "Gf":
        dim, bound = lie_dim_Gf(n, m, ctx), n * n - 1
    elif group == "GfBar":
        dim, bound = lie_dim_Gf_bar(n, m, ctx), n * n
    elif group == "GYBar":
        dim, bound = lie_dim_GY_bar(n, m, ctx), n * n
    else:
        raise ValueError(f"group must be one of {GROUPS}")
    elapsed = (time.perf_counter() - start) * 1000
    if n <= 2 * m:
        bound = None
    return LieReport(n, m, str(ctx), group, dim, bound, round(elapsed, 3))
