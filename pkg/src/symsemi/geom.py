"""PG(9,q) as the projective space of symmetric 4x4 matrices.

A point is stored by its 10 upper-triangular coordinates read row by row,
``(a11, a12, a13, a14, a22, a23, a24, a33, a34, a44)``, scaled so the first
nonzero coordinate is 1.  Normalized tuples are ranked lexicographically,
which gives every point a dense integer index; index 0 is ``(0, ..., 0, 1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .gf import Field

NCOORD = 10
COORD_PAIRS: tuple[tuple[int, int], ...] = tuple((i, j) for i in range(4) for j in range(i, 4))
PAIR_POS = {pair: c for c, pair in enumerate(COORD_PAIRS)}
for (_i, _j), _c in list(PAIR_POS.items()):
    PAIR_POS[(_j, _i)] = _c


class ZeroVector(ValueError):
    pass


class ZeroMatrix(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


def num_points(q: int, n: int = NCOORD) -> int:
    return (q ** n - 1) // (q - 1)


def normalize(F: Field, v: Sequence[int]) -> tuple[int, ...]:
    for x in v:
        if x:
            inv = F.inv(x)
            return tuple(F.mul(inv, y) for y in v)
    raise ZeroVector("zero vector has no projective point")


@dataclass(frozen=True)
class SymPoint:
    field: Field = dc_field(repr=False)
    coords: tuple[int, ...]

    @classmethod
    def of(cls, F: Field, coords: Sequence[int]) -> "SymPoint":
        return cls(F, normalize(F, [int(c) for c in coords]))

    @cached_property
    def index(self) -> int:
        return point_index(self)

    def __str__(self):
        return "p(" + ",".join(self.field.render(c) for c in self.coords) + ")"


# ---------------------------------------------------------------- indexing

@lru_cache(maxsize=None)
def _index_tables(q: int):
    offsets = np.array([(q ** t - 1) // (q - 1) for t in range(NCOORD + 1)], dtype=np.int64)
    qpow = np.array([q ** t for t in range(NCOORD + 1)], dtype=np.int64)
    weights = np.array([q ** (NCOORD - 1 - j) for j in range(NCOORD)], dtype=np.int64)
    return offsets, qpow, weights


def point_index(p: SymPoint) -> int:
    return _coords_index(p.field.q, p.coords)


def _coords_index(q: int, coords: Sequence[int]) -> int:
    lead = next(j for j, c in enumerate(coords) if c)
    t = NCOORD - 1 - lead
    full = 0
    for c in coords:
        full = full * q + c
    return (q ** t - 1) // (q - 1) + full - q ** t


def vector_index(F: Field, v: Sequence[int]) -> int:
    """Point index of a nonzero vector (scalar fast path of rows_to_indices)."""
    return _coords_index(F.q, normalize(F, [int(c) for c in v]))


def index_point(F: Field, i: int) -> SymPoint:
    q = F.q
    if not 0 <= i < num_points(q):
        raise IndexOutOfRange(f"point index {i} out of range for q={q}")
    return SymPoint(F, tuple(int(c) for c in indices_to_coords(F, np.array([i]))[0]))


def normalize_rows(F: Field, arr: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1.  Rows must be nonzero."""
    arr = np.asarray(arr, dtype=np.uint8)
    lead = (arr != 0).argmax(axis=1)
    lv = arr[np.arange(arr.shape[0]), lead]
    return F.MUL[F.INV[lv][:, None], arr]


def rows_to_indices(F: Field, arr: np.ndarray, normalized: bool = False) -> np.ndarray:
    """Point indices of the (nonzero) coordinate rows of ``arr``."""
    if not normalized:
        arr = normalize_rows(F, arr)
    offsets, qpow, weights = _index_tables(F.q)
    lead = (arr != 0).argmax(axis=1)
    t = NCOORD - 1 - lead
    full = arr.astype(np.int64) @ weights
    return offsets[t] + full - qpow[t]


def indices_to_coords(F: Field, idx: np.ndarray) -> np.ndarray:
    q = F.q
    offsets, qpow, weights = _index_tables(q)
    idx = np.asarray(idx, dtype=np.int64)
    t = np.searchsorted(offsets, idx, side="right") - 1
    full = idx - offsets[t] + qpow[t]
    return ((full[:, None] // weights[None, :]) % q).astype(np.uint8)


# ---------------------------------------------------------------- matrices

def point_to_matrix(p: SymPoint) -> list[list[int]]:
    return [[p.coords[PAIR_POS[(i, j)]] for j in range(4)] for i in range(4)]


def matrix_to_point(F: Field, A: Sequence[Sequence[int]]) -> SymPoint:
    coords = [int(A[i][j]) for (i, j) in COORD_PAIRS]
    if not any(coords):
        raise ZeroMatrix("zero matrix has no projective point")
    return SymPoint.of(F, coords)


def veronese(F: Field, s: Sequence[int]) -> SymPoint:
    if not any(s):
        raise ZeroVector("Veronese map is undefined on the zero vector")
    return SymPoint.of(F, [F.mul(s[i], s[j]) for (i, j) in COORD_PAIRS])


def _eliminate(F: Field, rows: list[list[int]]) -> tuple[int, int]:
    """In-place forward elimination; returns (rank, determinant-of-leading-square)."""
    n, m = len(rows), len(rows[0])
    rank, det = 0, 1
    for col in range(m):
        piv = next((r for r in range(rank, n) if rows[r][col]), None)
        if piv is None:
            det = 0
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            det = F.neg(det)
        pv = rows[rank][col]
        det = F.mul(det, pv)
        inv = F.inv(pv)
        for r in range(rank + 1, n):
            f = rows[r][col]
            if f:
                f = F.mul(f, inv)
                rows[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == n:
            break
    return rank, det


def det_matrix(F: Field, A: Sequence[Sequence[int]]) -> int:
    rows = [list(map(int, r)) for r in A]
    rank, det = _eliminate(F, rows)
    return det if rank == len(rows) else 0


def det4(F: Field, A) -> int:
    if isinstance(A, SymPoint):
        A = point_to_matrix(A)
    return det_matrix(F, A)


def matrix_rank(F: Field, A: Sequence[Sequence[int]]) -> int:
    return _eliminate(F, [list(map(int, r)) for r in A])[0]


def rank_of(p: SymPoint) -> int:
    return matrix_rank(p.field, point_to_matrix(p))


def point_type(p: SymPoint) -> int:
    """Congruence type of a rank-4 point, computable without orbit tables.

    Odd q: 0 if the determinant is a square, else 1.  Even q: 1 for
    alternating matrices (zero diagonal), else 0.  The two values label the
    two orbits of K on nonsingular points.
    """
    F = p.field
    A = point_to_matrix(p)
    if F.p == 2:
        return int(all(A[i][i] == 0 for i in range(4)))
    d = det4(F, A)
    if d == 0:
        raise ValueError("point type is defined for rank-4 points only")
    return 0 if F.is_square(d) else 1


_LAPLACE = [((0, 1), (2, 3), 1), ((0, 2), (1, 3), -1), ((0, 3), (1, 2), 1),
            ((1, 2), (0, 3), 1), ((1, 3), (0, 2), -1), ((2, 3), (0, 1), 1)]


def det_rows(F: Field, arr: np.ndarray) -> np.ndarray:
    """Determinants of the symmetric matrices given by coordinate rows (vectorized)."""
    arr = np.asarray(arr, dtype=np.uint8)
    a = {(i, j): arr[:, PAIR_POS[(i, j)]] for i in range(4) for j in range(4)}
    total = np.zeros(arr.shape[0], dtype=np.uint8)
    for (c1, c2), (d1, d2), sign in _LAPLACE:
        top = F.vsub(F.vmul(a[0, c1], a[1, c2]), F.vmul(a[0, c2], a[1, c1]))
        bot = F.vsub(F.vmul(a[2, d1], a[3, d2]), F.vmul(a[2, d2], a[3, d1]))
        term = F.vmul(top, bot)
        total = F.vadd(total, term) if sign > 0 else F.vsub(total, term)
    return total


# ---------------------------------------------------------------- subspaces

def rref(F: Field, rows: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Reduced row-echelon form with zero rows dropped."""
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return ()
    m = len(rows[0])
    out: list[list[int]] = []
    pivots: list[int] = []
    for col in range(m):
        piv = next((r for r in range(len(out), len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        r0 = len(out)
        rows[r0], rows[piv] = rows[piv], rows[r0]
        inv = F.inv(rows[r0][col])
        prow = [F.mul(inv, x) for x in rows[r0]]
        rows[r0] = prow
        for r in range(len(rows)):
            if r != r0 and rows[r][col]:
                f = rows[r][col]
                rows[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[r], prow)]
        out.append(prow)
        pivots.append(col)
        if len(out) == len(rows):
            break
    return tuple(tuple(r) for r in rows[:len(out)])


@dataclass(frozen=True)
class Subspace:
    """Projective subspace of PG(9,q) held by its RREF basis (identical iff equal)."""

    field: Field = dc_field(repr=False, compare=False, hash=False)
    basis: tuple[tuple[int, ...], ...]
    q: int = dc_field(default=0, repr=False)

    def __post_init__(self):
        if not self.q:
            object.__setattr__(self, "q", self.field.q)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, c in enumerate(r) if c) for r in self.basis)

    def encoding(self) -> tuple[int, ...]:
        return tuple(c for r in self.basis for c in r)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.uint8).reshape(-1, NCOORD)

    def vectors(self) -> np.ndarray:
        """All q**rank vectors of the underlying vector space (first row is zero)."""
        return self.field.matmul(coefficient_grid(self.field.q, self.rank), self.array)

    def point_rows(self) -> np.ndarray:
        """Normalized coordinate rows of all points, sorted by index."""
        F = self.field
        rows = F.matmul(normalized_coefficients(F.q, self.rank), self.array)
        idx = rows_to_indices(F, rows, normalized=True)
        return rows[np.argsort(idx)]

    def point_indices(self) -> np.ndarray:
        F = self.field
        rows = F.matmul(normalized_coefficients(F.q, self.rank), self.array)
        return np.sort(rows_to_indices(F, rows, normalized=True))

    def points(self) -> Iterator[SymPoint]:
        F = self.field
        for row in self.point_rows():
            yield SymPoint(F, tuple(int(c) for c in row))

    def contains_vector(self, v: Sequence[int]) -> bool:
        F = self.field
        r = list(map(int, v))
        for row, piv in zip(self.basis, self.pivots):
            f = r[piv]
            if f:
                r = [F.sub(x, F.mul(f, y)) for x, y in zip(r, row)]
        return not any(r)

    def contains(self, other: "SymPoint | Subspace") -> bool:
        rows = [other.coords] if isinstance(other, SymPoint) else other.basis
        return all(self.contains_vector(r) for r in rows)

    def hyperplanes(self) -> list["Subspace"]:
        """All subspaces of codimension one, in a fixed order."""
        F, r = self.field, self.rank
        out = []
        for c in normalized_coefficients(F.q, r):
            # kernel of the functional c on coefficient space
            lead = next(j for j, x in enumerate(c) if x)
            kern = []
            for j in range(r):
                if j == lead:
                    continue
                e = [0] * r
                e[j] = 1
                e[lead] = F.neg(int(c[j]))
                kern.append(e)
            rows = [[0] * NCOORD for _ in kern]
            for t, e in enumerate(kern):
                acc = [0] * NCOORD
                for j, x in enumerate(e):
                    if x:
                        acc = [F.add(a, F.mul(x, b)) for a, b in zip(acc, self.basis[j])]
                rows[t] = acc
            out.append(Subspace(F, rref(F, rows)))
        return out

    def to_text(self) -> str:
        return "\n".join(" ".join(self.field.render(c) for c in r) for r in self.basis)

    def __str__(self):
        return f"Subspace(dim={self.dim}, q={self.q})\n" + self.to_text()


@lru_cache(maxsize=None)
def coefficient_grid(q: int, r: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=r)), dtype=np.uint8).reshape(-1, r)


@lru_cache(maxsize=None)
def normalized_coefficients(q: int, r: int) -> np.ndarray:
    g = coefficient_grid(q, r)
    nz = g != 0
    lead = nz.argmax(axis=1)
    keep = nz.any(axis=1) & (g[np.arange(len(g)), lead] == 1)
    return g[keep]


def span(F: Field, items: Iterable) -> Subspace:
    rows = []
    for it in items:
        if isinstance(it, SymPoint):
            rows.append(it.coords)
        elif isinstance(it, Subspace):
            rows.extend(it.basis)
        else:
            rows.append(tuple(int(c) for c in it))
    if not rows:
        raise ValueError("span of an empty set is not a projective subspace")
    basis = rref(F, rows)
    if not basis:
        raise ZeroVector("span of zero vectors")
    return Subspace(F, basis)


def enumerate_points(W: Subspace) -> Iterator[SymPoint]:
    return W.points()


def is_semifield_subspace(W: "Subspace | SymPoint") -> bool:
    """True iff every point of ``W`` is a nonsingular symmetric matrix."""
    if isinstance(W, SymPoint):
        return det4(W.field, point_to_matrix(W)) != 0
    F = W.field
    if W.rank > 4:
        # two members share a first row, so their difference is singular
        return False
    for row in W.point_rows():
        if det4(F, point_to_matrix(SymPoint(F, tuple(int(c) for c in row)))) == 0:
            return False
    return True


def is_semifield_subspace_fast(W: Subspace) -> bool:
    return bool(np.all(det_rows(W.field, W.point_rows()) != 0))


def parse_subspace(F: Field, text: str) -> Subspace:
    rows = []
    for line in text.strip().splitlines():
        line = line.strip()
        if line:
            rows.append([F.parse(tok) for tok in line.split()])
    return span(F, rows)
