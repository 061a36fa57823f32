"""Levels of overgroups of the exterior power of the elementary group.

For H between ∧^m E_n(R) and GL_N(R), the set A_{I,J} = {ξ : t_{I,J}(ξ) ∈ H}
is computed for every pair of index sets.  These sets are expected to be
ideals that depend only on d(I, J) = |I ∩ J|, which makes the level a net
(A_0, ..., A_{m-1}).  Everything here runs on finite rings Z/k and F_p.

Two ways to decide A_{I,J} are offered:

* ``"chain"``: build a stabilizer chain of H and sift every t_{I,J}(ξ).
  Exact, and the default; only feasible while H is of moderate size.
* ``"closure"``: for large H (typically H ⊇ SL_N).  Lower bounds come from
  elementary transvections actually produced inside H (conjugating by the
  signed permutations in ∧^m E_n, commutators, sums), each one verified as
  a matrix product.  Upper bounds come from an invariant: if every generator
  of H lies in the congruence group of B, so does H, and any t_{I,J}(ξ)
  outside it is not in H.  When the bounds do not meet the level is
  reported as undecided rather than guessed.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, gcd
from typing import Sequence

import numpy as np
from sympy import isprime

from .engine import ActionDomain, StabilizerChain, domain_cap_from_env, generate_group
from .exterior import compound, distance, index_sets
from .forms import build_form, membership_GY_bar, membership_Gf_bar
from .linalg import Matrix, Transvection, transvection_matrix
from .ring import PrincipalIdeal, RingContext, ideal_normalize, integers_mod, prime_field

__all__ = [
    "Net",
    "parse_net",
    "OvergroupInstance",
    "LevelError",
    "HalfDimensionError",
    "LevelUndecided",
    "wedge_E_generators",
    "compute_level",
    "level_sets",
    "check_admissible",
    "admissible_nets",
    "generate_EwedgeE",
    "congruence_member",
    "duality_matrix",
    "normalizer_evidence",
    "sandwich_check",
]


class LevelError(RuntimeError):
    """A computed level contradicts the expected structure (must never happen)."""


class HalfDimensionError(ValueError):
    pass


class LevelUndecided(RuntimeError):
    """The closure method's lower and upper bounds did not meet."""


@dataclass(frozen=True)
class Net:
    """Ideals A_0, ..., A_{m-1} indexed by distance; A_{I,I} = R is implicit."""

    ideals: tuple[PrincipalIdeal, ...]

    @property
    def m(self) -> int:
        return len(self.ideals)

    @property
    def ring(self) -> RingContext:
        return self.ideals[0].context

    def __getitem__(self, d: int) -> PrincipalIdeal:
        return self.ideals[d]

    def generators(self) -> list[int]:
        return [a.generator for a in self.ideals]

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.ideals)

    def is_constant(self) -> bool:
        return all(a == self.ideals[0] for a in self.ideals)


def parse_net(spec: str, ring: RingContext, m: int | None = None) -> Net:
    """Parse ``"(2),(0)"`` (parentheses optional) into a net over ``ring``."""
    parts = re.findall(r"-?\d+", spec)
    if not parts:
        raise ValueError(f"empty net spec {spec!r}")
    if m is not None and len(parts) != m:
        raise ValueError(f"net {spec!r} has {len(parts)} ideals, expected m={m}")
    return Net(tuple(ideal_normalize(ring, int(p)) for p in parts))


def _pairs(n: int, m: int):
    sets = index_sets(n, m)
    for a, I in enumerate(sets):
        for b, J in enumerate(sets):
            if a != b:
                yield a, b, I, J


def _check_ring(ring: RingContext):
    if not ring.is_finite:
        raise ValueError(f"level computations need a finite ring, got {ring}")


def _transvection(ring: RingContext, N: int, a: int, b: int, xi: int) -> Matrix:
    return transvection_matrix(ring, Transvection(N, a, b, xi))


def wedge_E_generators(n: int, m: int, ring: RingContext) -> list[Matrix]:
    """∧^m t_{i,j}(1) for all i ≠ j; 1 generates Z, Z/k and F_p additively."""
    if not 2 <= m < n:
        raise ValueError(f"need 2 <= m < n, got n={n}, m={m}")
    if ring.kind not in ("Z", "Z/k", "F_p"):
        raise ValueError(f"additive generators of {ring} are not a single element")
    return [
        compound(_transvection(ring, n, i, j, 1), m)
        for i in range(n)
        for j in range(n)
        if i != j
    ]


@dataclass
class OvergroupInstance:
    n: int
    m: int
    ring: RingContext
    generators: list[Matrix]
    cap: int = field(default_factory=domain_cap_from_env)
    label: str = ""

    @property
    def N(self) -> int:
        return comb(self.n, self.m)

    @cached_property
    def domain(self) -> ActionDomain:
        return ActionDomain(self.ring, self.N, self.cap)

    @cached_property
    def chain(self) -> StabilizerChain:
        chain = generate_group(self.generators, self.domain)
        for g in wedge_E_generators(self.n, self.m, self.ring):
            if not chain.contains(g):
                raise ValueError("instance does not contain the exterior power of E_n")
        return chain

    def adjoin(self, *gens: Matrix, label: str = "") -> OvergroupInstance:
        return OvergroupInstance(self.n, self.m, self.ring, self.generators + list(gens), self.cap, label)

    @classmethod
    def wedge_E(cls, n: int, m: int, ring: RingContext, cap: int | None = None) -> OvergroupInstance:
        return cls(n, m, ring, wedge_E_generators(n, m, ring), cap or domain_cap_from_env(), "wedge E")


# ----------------------------------------------------------------- level


def _ideal_from_set(ring: RingContext, xs: set[int]) -> PrincipalIdeal:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return ideal_normalize(ring, g)


def level_sets(inst: OvergroupInstance, method: str = "chain") -> dict[tuple[int, int], set[int]]:
    """A_{I,J} for every ordered pair of distinct index sets (0-based lex ranks)."""
    _check_ring(inst.ring)
    if method == "chain":
        return _level_sets_chain(inst)
    if method == "closure":
        return _level_sets_closure(inst)
    raise ValueError(f"unknown level method {method!r}")


def _level_sets_chain(inst: OvergroupInstance) -> dict[tuple[int, int], set[int]]:
    chain = inst.chain
    N = inst.N
    k = inst.ring.modulus
    out = {}
    eye = np.eye(N, dtype=np.int64)
    for a, b, _, _ in _pairs(inst.n, inst.m):
        found = {0}
        for xi in range(1, k):
            t = eye.copy()
            t[a, b] = xi
            if chain.contains(t):
                found.add(xi)
        out[(a, b)] = found
    return out


def compute_level(inst: OvergroupInstance, method: str = "chain") -> Net:
    """The net of H, after checking each A_{I,J} is an ideal depending only on d(I,J)."""
    sets = level_sets(inst, method)
    return _net_from_sets(inst, sets)


def _net_from_sets(inst: OvergroupInstance, sets: dict) -> Net:
    ring = inst.ring
    by_distance: dict[int, PrincipalIdeal] = {}
    for a, b, I, J in _pairs(inst.n, inst.m):
        xs = sets[(a, b)]
        ideal = _ideal_from_set(ring, xs)
        if xs != ideal.elements():
            raise LevelError(f"A_{{{I},{J}}} = {sorted(xs)} is not an ideal")
        d = distance(I, J)
        if d not in by_distance:
            by_distance[d] = ideal
        elif by_distance[d] != ideal:
            raise LevelError(
                f"level not distance-uniform: distance {d} gives {by_distance[d]} and {ideal} at {I},{J}"
            )
    return Net(tuple(by_distance[d] for d in range(inst.m)))


# ---------------------------------------------------------------- closure


def _weyl_conjugators(inst: OvergroupInstance) -> list[np.ndarray]:
    """∧^m of w_{ij} = t_{ij}(1) t_{ji}(-1) t_{ij}(1): signed permutation matrices in H."""
    ring, n, m = inst.ring, inst.n, inst.m
    out = []
    for i in range(n):
        for j in range(n):
            if i < j:
                w = (
                    _transvection(ring, n, i, j, 1)
                    @ _transvection(ring, n, j, i, -1)
                    @ _transvection(ring, n, i, j, 1)
                )
                out.append(compound(w, m).to_numpy())
    return out


def _as_elementary(g: np.ndarray) -> tuple[int, int, int] | None:
    off = g - np.eye(len(g), dtype=g.dtype)
    nz = np.argwhere(off != 0)
    if len(nz) != 1:
        return None
    a, b = (int(x) for x in nz[0])
    if a == b:
        return None
    return a, b, int(g[a, b])


def _np_inverse(ring: RingContext, g: np.ndarray) -> np.ndarray:
    return Matrix.from_numpy(ring, g).inverse().to_numpy()


def _level_sets_closure(inst: OvergroupInstance) -> dict[tuple[int, int], set[int]]:
    ring = inst.ring
    k = ring.modulus
    N = inst.N
    # no point domain here: closure never enumerates vectors, so the cap does not apply
    gens = [g.to_numpy() for g in inst.generators]
    wedge = {g.to_numpy().tobytes() for g in wedge_E_generators(inst.n, inst.m, ring)}
    if not wedge <= {g.tobytes() for g in gens}:
        raise ValueError("closure method needs the exterior power generators among H's generators")

    conj = [(w, _np_inverse(ring, w)) for w in _weyl_conjugators(inst)]
    found: dict[tuple[int, int], set[int]] = {(a, b): {0} for a, b, _, _ in _pairs(inst.n, inst.m)}
    queue: list[tuple[int, int, int]] = []

    def record(a: int, b: int, xi: int):
        xi %= k
        if xi and xi not in found[(a, b)]:
            found[(a, b)].add(xi)
            queue.append((a, b, xi))

    def mat(a, b, xi):
        t = np.eye(N, dtype=np.int64)
        t[a, b] = xi % k
        return t

    for g in gens:
        e = _as_elementary(g)
        if e:
            record(*e)
    commutator_partners = [(g, _np_inverse(ring, g)) for g in gens]
    while queue:
        a, b, xi = queue.pop(0)
        t = mat(a, b, xi)
        tinv = mat(a, b, -xi)
        # conjugation by signed permutations keeps transvections elementary
        for w, winv in conj:
            e = _as_elementary((w @ t @ winv) % k)
            if e:
                record(*e)
        # sums and multiples within one position
        for other in list(found[(a, b)]):
            record(a, b, xi + other)
        # [t_{ab}(ξ), t_{bc}(η)] = t_{ac}(ξη) and [t_{ca}(η), t_{ab}(ξ)] = t_{cb}(ηξ)
        for (c, d), xs in list(found.items()):
            for eta in list(xs):
                if not eta:
                    continue
                if c == b and d != a:
                    s = mat(c, d, eta)
                    e = _as_elementary((t @ s @ tinv @ mat(c, d, -eta)) % k)
                    if e:
                        record(*e)
                if d == a and c != b:
                    s = mat(c, d, eta)
                    e = _as_elementary((s @ t @ mat(c, d, -eta) @ tinv) % k)
                    if e:
                        record(*e)
        for g, ginv in commutator_partners:
            e = _as_elementary((t @ g @ tinv @ ginv) % k)
            if e:
                record(*e)

    # upper bounds: a congruence group containing H excludes everything outside it
    for (a, b), xs in found.items():
        lower = _ideal_from_set(ring, xs)
        if lower.is_unit:
            continue
        if not _generators_in_congruence(inst, lower):
            raise LevelUndecided(
                f"closure could not decide A at ranks ({a},{b}): lower bound {lower} has no matching invariant"
            )
        for xi in range(k):
            if xi in lower or xi in xs:
                continue
            if congruence_member(Matrix.from_numpy(ring, mat(a, b, xi)), lower, inst.n, inst.m, allow_half=True):
                raise LevelUndecided(f"closure could not exclude ξ={xi} at ranks ({a},{b})")
        found[(a, b)] = lower.elements()
    return found


def _generators_in_congruence(inst: OvergroupInstance, ideal: PrincipalIdeal) -> bool:
    cache = inst.__dict__.setdefault("_congruence_cache", {})
    if ideal.generator not in cache:
        cache[ideal.generator] = all(
            congruence_member(g, ideal, inst.n, inst.m, allow_half=True) for g in inst.generators
        )
    return cache[ideal.generator]


# ------------------------------------------------------------ admissibility


def check_admissible(net: Net, n: int, m: int) -> tuple[bool, list[str]]:
    """Check the relations between the ideals of a level; returns (ok, violations)."""
    if net.m != m:
        raise ValueError(f"net has {net.m} ideals, expected {m}")
    A = net.ideals
    violations = []
    for k in range(m - 1):
        if n >= 3 * m - 2 * k and not A[k] <= A[k + 1]:
            violations.append(f"A_{k} <= A_{k + 1} (n >= 3m-2k) fails: {A[k]} vs {A[k + 1]}")
    for k in range(m - 1):
        if not A[k] >= A[k + 1]:
            violations.append(f"A_{k} >= A_{k + 1} fails: {A[k]} vs {A[k + 1]}")
    if m >= 2:
        c = comb(n - 2, m - 1)
        scaled = A[m - 2].scale(c)
        if not scaled <= A[m - 1]:
            violations.append(f"C({n - 2},{m - 1})*A_{m - 2} = {scaled} is not inside A_{m - 1} = {A[m - 1]}")
    return not violations, violations


def admissible_nets(n: int, m: int, ring: RingContext) -> list[Net]:
    """Every admissible net over Z/k or F_p, ideals ordered by generator."""
    from itertools import product

    k = ring.modulus
    ideals = sorted({ideal_normalize(ring, d).generator for d in range(k + 1)})
    out = []
    for gens in product(ideals, repeat=m):
        net = Net(tuple(ideal_normalize(ring, g) for g in gens))
        if check_admissible(net, n, m)[0]:
            out.append(net)
    return out


def generate_EwedgeE(
    n: int, m: int, ring: RingContext, net: Net, cap: int | None = None
) -> OvergroupInstance:
    """∧^m E_n(R) together with t_{I,J}(a_d) for every pair at distance d."""
    ok, violations = check_admissible(net, n, m)
    if not ok:
        raise ValueError("inadmissible net: " + "; ".join(violations))
    if net.ring != ring:
        raise ValueError(f"net over {net.ring}, instance over {ring}")
    N = comb(n, m)
    gens = wedge_E_generators(n, m, ring)
    for a, b, I, J in _pairs(n, m):
        ideal = net[distance(I, J)]
        if not ideal.is_zero:
            gens.append(_transvection(ring, N, a, b, ideal.generator))
    return OvergroupInstance(n, m, ring, gens, cap or domain_cap_from_env(), f"EwedgeE({net})")


# --------------------------------------------------------------- congruence


def _quotient_ring(ring: RingContext, A: PrincipalIdeal) -> RingContext | None:
    q = A.quotient_modulus()
    if q == 1:
        return None
    if q == ring.modulus:
        return ring
    return prime_field(q) if isprime(q) else integers_mod(q)


def reduce_matrix(g: Matrix, A: PrincipalIdeal) -> Matrix | None:
    """ρ_A(g) over R/A, or None when R/A is the zero ring."""
    target = _quotient_ring(g.context, A)
    if target is None:
        return None
    return g.map(lambda x: x % target.modulus, target)


def congruence_member(g: Matrix, A: PrincipalIdeal, n: int, m: int, allow_half: bool = False) -> bool:
    """Is ρ_A(g) in the stabilizer of the invariant forms over R/A?

    For n = 2m the stabilizer is the full orthogonal/symplectic similitude
    group, strictly larger than ∧^m GL_n; that case needs ``allow_half``.
    """
    if A.context != g.context:
        raise ValueError("ideal and matrix over different rings")
    if n == 2 * m and not allow_half:
        raise HalfDimensionError(
            "stabilizer strictly larger in half dimension (n = 2m); congruence test unavailable"
        )
    if n < 2 * m:
        raise ValueError("congruence test needs n >= 2m")
    reduced = reduce_matrix(g, A)
    if reduced is None:
        return True
    if n % m == 0:
        return membership_Gf_bar(reduced, n, m) is not None
    return membership_GY_bar(reduced, n, m) is not None


def duality_matrix(ring: RingContext, n: int, m: int) -> Matrix:
    """e_I -> sign(I, I^c) e_{I^c} for n = 2m: preserves the half-dimension form up to sign."""
    if n != 2 * m:
        raise ValueError("duality matrix only exists for n = 2m")
    from .exterior import sign_shuffle

    sets = index_sets(n, m)
    rank = {I: r for r, I in enumerate(sets)}
    N = len(sets)
    data = [ring.zero()] * (N * N)
    for I in sets:
        Ic = tuple(x for x in range(1, n + 1) if x not in I)
        data[rank[Ic] * N + rank[I]] = ring.from_int(sign_shuffle((I, Ic)))
    return Matrix(ring, N, N, data)


# --------------------------------------------------------------- normalizer


def _random_matrix(rng: random.Random, ring: RingContext, size: int) -> Matrix:
    k = ring.modulus
    return Matrix(ring, size, size, [rng.randrange(k) for _ in range(size * size)])


def _random_invertible(rng: random.Random, ring: RingContext, size: int) -> Matrix:
    while True:
        g = _random_matrix(rng, ring, size)
        if g.is_invertible():
            return g


def _random_congruence_element(rng, ring, n, m, A: PrincipalIdeal, half: bool) -> Matrix:
    N = comb(n, m)
    g = compound(_random_invertible(rng, ring, n), m)
    units = [u for u in range(1, ring.modulus) if gcd(u, ring.modulus) == 1]
    g = g.scale(rng.choice(units))
    if half and rng.random() < 0.5:
        g = g @ duality_matrix(ring, n, m)
    if not A.is_zero:
        a = A.generator
        kernel = Matrix.identity(ring, N) + _random_matrix(rng, ring, N).scale(a)
        g = g @ kernel
    return g


def _normalizes(chain: StabilizerChain, domain: ActionDomain, g: Matrix, gens: Sequence[np.ndarray]) -> bool:
    k = domain.modulus
    G = domain.as_array(g)
    Ginv = domain.as_array(g.inverse())
    return all(chain.contains((G @ s @ Ginv) % k) for s in gens)


@dataclass
class NormalizerReport:
    n: int
    m: int
    ring: str
    ideal: int
    seed: int
    positives: int
    negatives: int
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "ring": self.ring,
            "ideal": self.ideal,
            "seed": self.seed,
            "positives": self.positives,
            "negatives": self.negatives,
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }


def normalizer_evidence(
    n: int,
    m: int,
    ring: RingContext,
    A: PrincipalIdeal,
    samples: int = 50,
    seed: int = 0,
    allow_half: bool = False,
    cap: int | None = None,
) -> NormalizerReport:
    """Sampled two-sided check that the normalizer of E∧E(R, A) is the congruence group of A.

    ``samples`` positives (members of the congruence group) must normalize;
    ``samples`` negatives (non-members) must fail to normalize.
    """
    _check_ring(ring)
    half = n == 2 * m
    if half and not allow_half:
        raise HalfDimensionError(
            "stabilizer strictly larger in half dimension (n = 2m); congruence test unavailable"
        )
    rng = random.Random(seed)
    N = comb(n, m)
    inst = generate_EwedgeE(n, m, ring, Net((A,) * m), cap)
    chain = inst.chain
    domain = inst.domain
    gens = [domain.as_array(g) for g in inst.generators]
    report = NormalizerReport(n, m, str(ring), A.generator, seed, 0, 0)

    while report.positives < samples:
        g = _random_congruence_element(rng, ring, n, m, A, half)
        if not congruence_member(g, A, n, m, allow_half=True):
            report.counterexamples.append({"kind": "sampler", "matrix": g.to_lists()})
            report.positives += 1
            continue
        report.positives += 1
        if not _normalizes(chain, domain, g, gens):
            report.counterexamples.append({"kind": "positive", "matrix": g.to_lists()})

    # structured negatives: transvections t_{I,J}(u) with u a unit mod A, then random matrices
    structured = []
    for a, b, _, _ in _pairs(n, m):
        structured.append(_transvection(ring, N, a, b, 1))
    rng.shuffle(structured)
    candidates = iter(structured[: samples // 5])
    while report.negatives < samples:
        g = next(candidates, None) or _random_invertible(rng, ring, N)
        if congruence_member(g, A, n, m, allow_half=True):
            continue
        report.negatives += 1
        if _normalizes(chain, domain, g, gens):
            report.counterexamples.append({"kind": "negative", "matrix": g.to_lists()})
    return report


# ----------------------------------------------------------------- sandwich


@dataclass
class SandwichReport:
    net: Net
    lower: bool
    upper: bool
    upper_heuristic: bool
    admissible: bool
    violations: list[str]

    def to_json(self) -> dict:
        return {
            "net": self.net.generators(),
            "lower": self.lower,
            "upper": self.upper,
            "upper_kind": "heuristic upper bound" if self.upper_heuristic else "congruence",
            "admissible": self.admissible,
            "violations": self.violations,
        }


def sandwich_check(inst: OvergroupInstance, net: Net | None = None, method: str = "chain") -> SandwichReport:
    """E∧E(R, level(H)) ≤ H ≤ congruence group of the level.

    ``net`` defaults to the computed level; passing one explicitly tests H
    against a prescribed level instead.
    """
    if net is None:
        net = compute_level(inst, method)
    admissible, violations = check_admissible(net, inst.n, inst.m)
    lower_inst = generate_EwedgeE(inst.n, inst.m, inst.ring, net, inst.cap) if admissible else None
    if lower_inst is None:
        lower = False
    elif method == "chain":
        lower = all(inst.chain.contains(g) for g in lower_inst.generators)
    else:
        found = level_sets(inst, "closure")
        lower = all(
            net[distance(I, J)].elements() <= found[(a, b)] for a, b, I, J in _pairs(inst.n, inst.m)
        )
    heuristic = inst.n < 3 * inst.m
    # below 3m the ideals may differ; the coarsest one, A_0, is what the congruence group can use
    upper = all(
        congruence_member(g, net[0], inst.n, inst.m, allow_half=True) for g in inst.generators
    )
    return SandwichReport(net, lower, upper, heuristic, admissible, violations)
