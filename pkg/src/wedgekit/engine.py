"""Stabilizer chains for matrix groups over Z/k acting on (Z/k)^N.

Points of the module are encoded as integers in mixed radix, little-endian
(coordinate 0 is the least significant digit).  Group elements are N x N
integer arrays (int32 when exact) acting on column vectors.  Base points are standard basis
vectors, so a matrix that fixes every base point of a full base is the
identity and sifting decides membership exactly.

Schreier-Sims here is the deterministic variant: every Schreier generator of
every level is sifted, in batches, before a level is accepted.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import Matrix
from .ring import RingContext

__all__ = [
    "DEFAULT_DOMAIN_CAP",
    "DomainCapExceeded",
    "ActionDomain",
    "StabilizerChain",
    "generate_group",
    "order",
    "contains",
    "orbit",
]

DEFAULT_DOMAIN_CAP = 1 << 20
_CHUNK = 4096


class DomainCapExceeded(ValueError):
    pass


def domain_cap_from_env() -> int:
    value = os.environ.get("WEDGEKIT_DOMAIN_CAP")
    return int(value) if value else DEFAULT_DOMAIN_CAP


@dataclass(frozen=True)
class ActionDomain:
    ring: RingContext
    N: int
    cap: int = field(default_factory=domain_cap_from_env)

    def __post_init__(self):
        if not self.ring.is_finite:
            raise ValueError(f"action domains need a finite ring, got {self.ring}")
        if self.size > self.cap:
            raise DomainCapExceeded(
                f"{self.ring}^{self.N} has {self.size} points, cap is {self.cap}"
            )

    @property
    def modulus(self) -> int:
        return self.ring.modulus

    @property
    def size(self) -> int:
        return self.modulus ** self.N

    @property
    def dtype(self):
        """int32 when every dot product of reduced entries fits, which halves matmul time."""
        return np.int32 if self.N * (self.modulus - 1) ** 2 < 2**31 else np.int64

    @property
    def radix(self) -> np.ndarray:
        return self.modulus ** np.arange(self.N, dtype=np.int64)

    def encode(self, vectors: np.ndarray) -> np.ndarray:
        """Codes of vectors stacked along the last axis."""
        return vectors @ self.radix

    def encode_one(self, vector: Sequence[int]) -> int:
        return int(np.asarray(vector, dtype=np.int64) % self.modulus @ self.radix)

    def decode(self, code: int) -> np.ndarray:
        k = self.modulus
        out = np.empty(self.N, dtype=np.int64)
        for i in range(self.N):
            code, out[i] = divmod(code, k)
        return out

    def basis_point(self, i: int) -> int:
        return self.modulus ** i

    def as_array(self, g) -> np.ndarray:
        if isinstance(g, Matrix):
            if g.context != self.ring:
                raise ValueError(f"matrix over {g.context}, domain over {self.ring}")
            if g.shape != (self.N, self.N):
                raise ValueError(f"matrix is {g.rows}x{g.cols}, domain has rank {self.N}")
            return g.to_numpy().astype(self.dtype)
        arr = (np.asarray(g, dtype=np.int64) % self.modulus).astype(self.dtype)
        if arr.shape != (self.N, self.N):
            raise ValueError(f"matrix is {arr.shape}, domain has rank {self.N}")
        return arr

    def inverse(self, g: np.ndarray) -> np.ndarray:
        mat = Matrix.from_numpy(self.ring, g)
        try:
            inv = mat.inverse()
        except ZeroDivisionError:
            raise ValueError("generator is singular over its ring") from None
        return inv.to_numpy().astype(self.dtype)


class _Level:
    """Orbit of one base point with coset representatives u and their inverses."""

    def __init__(self, domain: ActionDomain, base_index: int):
        self.domain = domain
        self.base_index = base_index
        self.point = domain.basis_point(base_index)
        self.codes = np.array([self.point], dtype=np.int64)
        self.U = np.eye(domain.N, dtype=domain.dtype)[None]
        self.Uinv = self.U.copy()
        self._sorted = self.codes
        self._order = np.array([0])

    @property
    def size(self) -> int:
        return len(self.codes)

    def build(self, gens: list[np.ndarray], invs: list[np.ndarray]) -> None:
        d = self.domain
        k = d.modulus
        b = self.base_index
        eye = np.eye(d.N, dtype=d.dtype)[None]
        codes = [self.point]
        U_parts, Uinv_parts = [eye], [eye]
        seen = {self.point}
        frontier_U, frontier_Uinv = eye, eye
        while len(frontier_U):
            next_U, next_Uinv = [], []
            for s, sinv in zip(gens, invs):
                new_U = (s @ frontier_U) % k
                new_codes = d.encode(new_U[:, :, b])
                keep = []
                for pos, c in enumerate(new_codes.tolist()):
                    if c not in seen:
                        seen.add(c)
                        keep.append(pos)
                        codes.append(c)
                if keep:
                    keep = np.array(keep)
                    next_U.append(new_U[keep])
                    next_Uinv.append((frontier_Uinv[keep] @ sinv) % k)
            if not next_U:
                break
            frontier_U = np.concatenate(next_U)
            frontier_Uinv = np.concatenate(next_Uinv)
            U_parts.append(frontier_U)
            Uinv_parts.append(frontier_Uinv)
        self.codes = np.array(codes, dtype=np.int64)
        self.U = np.concatenate(U_parts)
        self.Uinv = np.concatenate(Uinv_parts)
        self._order = np.argsort(self.codes, kind="stable")
        self._sorted = self.codes[self._order]

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        """Orbit indices of the given points, -1 where absent."""
        pos = np.searchsorted(self._sorted, codes)
        pos = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos] == codes
        return np.where(hit, self._order[pos], -1)


class StabilizerChain:
    """Base, strong generators and transversals of a finite matrix group."""

    def __init__(self, domain: ActionDomain):
        self.domain = domain
        self.base: list[int] = []
        self.strong: list[np.ndarray] = []
        self.strong_inv: list[np.ndarray] = []
        self.levels: list[_Level] = []
        self.input_generators: list[np.ndarray] = []

    # ------------------------------------------------------------------ query

    def order(self) -> int:
        result = 1
        for level in self.levels:
            result *= level.size
        return result

    @property
    def orbit_sizes(self) -> list[int]:
        return [level.size for level in self.levels]

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        """Strip g through levels start..; returns (residue, level where it stopped)."""
        k = self.domain.modulus
        for l in range(start, len(self.levels)):
            level = self.levels[l]
            code = int(g[:, level.base_index] @ self.domain.radix)
            idx = int(level.lookup(np.array([code]))[0])
            if idx < 0:
                return g, l
            g = (level.Uinv[idx] @ g) % k
        return g, len(self.levels)

    def contains(self, g) -> bool:
        arr = self.domain.as_array(g)
        residue, level = self.sift(arr)
        return level == len(self.levels) and _is_identity(residue)

    def fingerprint(self) -> tuple:
        """Base and orbit point sequences; equal fingerprints mean identical chains."""
        return tuple(self.base), tuple(tuple(level.codes.tolist()) for level in self.levels)

    # ------------------------------------------------------------ construction

    def _moved_base_index(self, g: np.ndarray) -> int:
        for j in range(self.domain.N):
            col = g[:, j]
            if col[j] != 1 or np.count_nonzero(col) != 1:
                return j
        raise AssertionError("identity has no moved point")

    def _level_gens(self, i: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
        prefix = self.base[:i]
        gens, invs = [], []
        for s, sinv in zip(self.strong, self.strong_inv):
            if all(_fixes_basis(s, b) for b in prefix):
                gens.append(s)
                invs.append(sinv)
        return gens, invs

    def _add_strong(self, g: np.ndarray, ginv: np.ndarray | None = None) -> None:
        if ginv is None:
            ginv = self.domain.inverse(g)
        self.strong.append(g)
        self.strong_inv.append(ginv)
        if all(_fixes_basis(g, b) for b in self.base):
            j = self._moved_base_index(g)
            self.base.append(j)
            self.levels.append(_Level(self.domain, j))

    def _rebuild(self, i: int) -> None:
        gens, invs = self._level_gens(i)
        self.levels[i].build(gens, invs)

    def _first_failure(self, i: int) -> tuple[np.ndarray, int] | None:
        """Sift every Schreier generator of level i; return the first non-trivial residue."""
        k = self.domain.modulus
        level = self.levels[i]
        gens, _ = self._level_gens(i)
        b = level.base_index
        for s in gens:
            for lo in range(0, level.size, _CHUNK):
                U = level.U[lo:lo + _CHUNK]
                sU = (s @ U) % k
                idx = level.lookup(self.domain.encode(sU[:, :, b]))
                batch = (level.Uinv[idx] @ sU) % k
                hit = self._sift_batch(batch, i + 1)
                if hit is not None:
                    return hit
        return None

    def _sift_batch(self, batch: np.ndarray, start: int) -> tuple[np.ndarray, int] | None:
        """Sift a stack of elements from level ``start``; first failure in stack order."""
        k = self.domain.modulus
        alive = np.arange(len(batch))
        best: tuple[int, int, np.ndarray] | None = None  # (position, level, residue)
        for l in range(start, len(self.levels)):
            if not len(alive):
                break
            level = self.levels[l]
            idx = level.lookup(self.domain.encode(batch[:, :, level.base_index]))
            miss = idx < 0
            if miss.any():
                first = int(np.argmax(miss))
                if best is None or alive[first] < best[0]:
                    best = (int(alive[first]), l, batch[first].copy())
                keep = ~miss
                alive, batch, idx = alive[keep], batch[keep], idx[keep]
            batch = (level.Uinv[idx] @ batch) % k
        if len(alive):
            eye = np.eye(self.domain.N, dtype=np.int64)
            nontrivial = np.flatnonzero(np.any(batch != eye, axis=(1, 2)))
            if len(nontrivial):
                first = int(nontrivial[0])
                if best is None or alive[first] < best[0]:
                    best = (int(alive[first]), len(self.levels), batch[first].copy())
        if best is None:
            return None
        return best[2], best[1]

    def schreier_sims(self) -> None:
        i = len(self.levels) - 1
        for j in range(len(self.levels)):
            self._rebuild(j)
        while i >= 0:
            hit = self._first_failure(i)
            if hit is None:
                i -= 1
                continue
            residue, drop = hit
            self._add_strong(residue)
            for j in range(i + 1, min(drop, len(self.levels) - 1) + 1):
                self._rebuild(j)
            i = min(drop, len(self.levels) - 1)

    def verify(self) -> bool:
        """Every strong generator sifts to the identity and every level's Schreier generators do."""
        if not all(self.contains(g) for g in self.strong):
            return False
        return all(self._first_failure(i) is None for i in range(len(self.levels)))


def _fixes_basis(g: np.ndarray, j: int) -> bool:
    col = g[:, j]
    return col[j] == 1 and np.count_nonzero(col) == 1


def _is_identity(g: np.ndarray) -> bool:
    return bool(np.array_equal(g, np.eye(len(g), dtype=g.dtype)))


def generate_group(gens: Iterable, domain: ActionDomain) -> StabilizerChain:
    """Deterministic Schreier-Sims for the group generated by ``gens``.

    Base points are basis vectors e_1, e_2, ... taken in order of first need:
    each new base point is the first basis vector moved by the generator that
    required it.
    """
    chain = StabilizerChain(domain)
    seen: set[bytes] = set()
    for g in gens:
        arr = domain.as_array(g)
        chain.input_generators.append(arr)
        if _is_identity(arr) or arr.tobytes() in seen:
            continue
        seen.add(arr.tobytes())
        chain._add_strong(arr)
    chain.schreier_sims()
    return chain


def order(chain: StabilizerChain) -> int:
    return chain.order()


def contains(chain: StabilizerChain, g) -> bool:
    return chain.contains(g)


def orbit(point: int, gens: Iterable, domain: ActionDomain) -> list[int]:
    """Breadth-first orbit of an encoded point; generators applied in the given order."""
    mats = [domain.as_array(g) for g in gens]
    k = domain.modulus
    found = [point]
    seen = {point}
    frontier = domain.decode(point)[None]
    while len(frontier):
        nxt = []
        for s in mats:
            images = (frontier @ s.T) % k
            for vec, c in zip(images, domain.encode(images).tolist()):
                if c not in seen:
                    seen.add(c)
                    found.append(c)
                    nxt.append(vec)
        frontier = np.array(nxt, dtype=np.int64).reshape(-1, domain.N)
    return found
