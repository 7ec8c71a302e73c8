"""The group K = PGL(4,q) acting on PG(9,q) by congruence A -> X A X^T.

Group elements are normalized 4x4 matrices with a cached 10x10 lift.
Orders, membership and uniform random elements come from a faithful
permutation representation on the points of PG(3,q) (sympy Schreier-Sims).
"""

from __future__ import annotations

import itertools
import logging
import struct
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy.combinatorics import Permutation, PermutationGroup

from .gf import Field, make_field
from .geom import (
    COORD_PAIRS, NCOORD, SymPoint, Subspace, det_matrix, indices_to_coords,
    normalized_coefficients, num_points, rows_to_indices, rref,
)

log = logging.getLogger(__name__)


class SingularMatrix(ValueError):
    pass


class MemoryBudgetExceeded(MemoryError):
    pass


class OracleBoundExceeded(RuntimeError):
    pass


class NotClosed(RuntimeError):
    pass


def pgl4_order(q: int) -> int:
    n = 1
    for i in range(4):
        n *= q ** 4 - q ** i
    return n // (q - 1)


# ---------------------------------------------------------------- 4x4 matrices

Mat = tuple[tuple[int, ...], ...]


def mat_mul(F: Field, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    mul, add = F._mul, F._add
    n, m, k = len(A), len(B[0]), len(B)
    out = []
    for i in range(n):
        Ai = A[i]
        row = []
        for j in range(m):
            s = 0
            for t in range(k):
                a = Ai[t]
                if a:
                    s = add[s][mul[a][B[t][j]]]
            row.append(s)
        out.append(row)
    return out


def mat_inv(F: Field, A: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(A)
    M = [list(map(int, A[i])) + [int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise SingularMatrix("matrix is not invertible")
        M[col], M[piv] = M[piv], M[col]
        inv = F.inv(M[col][col])
        M[col] = [F.mul(inv, x) for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def transpose(A):
    return [list(r) for r in zip(*A)]


def normalize_matrix(F: Field, A: Sequence[Sequence[int]]) -> Mat:
    flat = [int(x) for r in A for x in r]
    lead = next((x for x in flat if x), 0)
    if not lead:
        raise SingularMatrix("zero matrix")
    inv = F.inv(lead)
    return tuple(tuple(F.mul(inv, int(x)) for x in r) for r in A)


def lift_matrix(F: Field, X: Sequence[Sequence[int]]) -> np.ndarray:
    """10x10 matrix of A -> X A X^T on upper-triangular coordinates."""
    mul, add = F._mul, F._add
    L = np.zeros((NCOORD, NCOORD), dtype=np.uint8)
    for c, (i, j) in enumerate(COORD_PAIRS):
        for r, (a, b) in enumerate(COORD_PAIRS):
            v = mul[X[a][i]][X[b][j]]
            if i != j:
                v = add[v][mul[X[a][j]][X[b][i]]]
            L[r, c] = v
    return L


def lift_batch(F: Field, Xs: np.ndarray) -> np.ndarray:
    """Lifts of a batch of 4x4 matrices, shape (n, 10, 10)."""
    Xs = np.asarray(Xs, dtype=np.uint8)
    out = np.zeros((Xs.shape[0], NCOORD, NCOORD), dtype=np.uint8)
    for c, (i, j) in enumerate(COORD_PAIRS):
        for r, (a, b) in enumerate(COORD_PAIRS):
            v = F.vmul(Xs[:, a, i], Xs[:, b, j])
            if i != j:
                v = F.vadd(v, F.vmul(Xs[:, a, j], Xs[:, b, i]))
            out[:, r, c] = v
    return out


class GroupElement:
    """Element of K: a normalized invertible 4x4 matrix and its lift to PG(9,q)."""

    __slots__ = ("field", "mat", "_lift", "_inv")

    def __init__(self, F: Field, X: Sequence[Sequence[int]], normalized: bool = False):
        self.field = F
        self.mat: Mat = tuple(tuple(int(x) for x in r) for r in X) if normalized else normalize_matrix(F, X)
        self._lift = None
        self._inv = None

    @classmethod
    def identity(cls, F: Field) -> "GroupElement":
        return cls(F, [[int(i == j) for j in range(4)] for i in range(4)], normalized=True)

    @property
    def lift10(self) -> np.ndarray:
        if self._lift is None:
            self._lift = lift_matrix(self.field, self.mat)
        return self._lift

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.field, mat_mul(self.field, self.mat, other.mat))

    def inverse(self) -> "GroupElement":
        if self._inv is None:
            self._inv = GroupElement(self.field, mat_inv(self.field, self.mat))
        return self._inv

    def is_identity(self) -> bool:
        return all(self.mat[i][j] == int(i == j) for i in range(4) for j in range(4))

    def act_rows(self, rows: np.ndarray) -> np.ndarray:
        return self.field.matmul(rows, self.lift10.T)

    def act_vector(self, v: Sequence[int]) -> list[int]:
        F, L = self.field, self.lift10
        mul, add = F._mul, F._add
        out = []
        for r in range(NCOORD):
            s = 0
            Lr = L[r]
            for c in range(NCOORD):
                if v[c]:
                    s = add[s][mul[int(Lr[c])][v[c]]]
            out.append(s)
        return out

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.field.q == other.field.q and self.mat == other.mat

    def __hash__(self):
        return hash((self.field.q, self.mat))

    def __repr__(self):
        return f"GroupElement({[list(r) for r in self.mat]})"

    def to_text(self) -> str:
        return "\n".join(" ".join(self.field.render(x) for x in r) for r in self.mat)

    def codes(self) -> list[int]:
        return [x for r in self.mat for x in r]


def lift(F: Field, X: Sequence[Sequence[int]]) -> GroupElement:
    if det_matrix(F, X) == 0:
        raise SingularMatrix("lift needs an invertible matrix")
    return GroupElement(F, X)


def act_point(g: GroupElement, p: SymPoint) -> SymPoint:
    return SymPoint.of(g.field, g.act_vector(p.coords))


def act_subspace(g: GroupElement, W: Subspace) -> Subspace:
    F = g.field
    return Subspace(F, rref(F, [g.act_vector(r) for r in W.basis]))


def random_element(F: Field, rng: np.random.Generator) -> GroupElement:
    while True:
        X = rng.integers(0, F.q, size=(4, 4)).tolist()
        if det_matrix(F, X):
            return GroupElement(F, X)


# ---------------------------------------------------------------- PG(3,q) action

class ProjectiveAction:
    """Faithful action of PGL(4,q) on the points of PG(3,q), x -> X x."""

    def __init__(self, F: Field):
        self.field = F
        q = F.q
        pts = normalized_coefficients(q, 4)
        self.points = pts
        self.degree = len(pts)
        codes = pts.astype(np.int64) @ np.array([q ** 3, q ** 2, q, 1])
        self._lookup = np.full(q ** 4, -1, dtype=np.int64)
        self._lookup[codes] = np.arange(len(pts))
        self._weights = np.array([q ** 3, q ** 2, q, 1], dtype=np.int64)
        self._frame = [self.index_of([int(i == j) for j in range(4)]) for i in range(4)]
        self._frame.append(self.index_of([1, 1, 1, 1]))

    def index_of(self, v: Sequence[int]) -> int:
        F = self.field
        lead = next(x for x in v if x)
        inv = F.inv(lead)
        code = 0
        for x in v:
            code = code * F.q + F.mul(inv, int(x))
        return int(self._lookup[code])

    def image_array(self, X) -> np.ndarray:
        F = self.field
        img = F.matmul(self.points, np.array(X, dtype=np.uint8).T)
        lead = (img != 0).argmax(axis=1)
        lv = img[np.arange(len(img)), lead]
        img = F.MUL[F.INV[lv][:, None], img]
        return self._lookup[img.astype(np.int64) @ self._weights]

    def perm(self, g: GroupElement) -> Permutation:
        return Permutation(self.image_array(g.mat).tolist())

    def element(self, perm: Permutation) -> GroupElement:
        """Recover the matrix of a permutation from the images of a frame."""
        F = self.field
        af = perm.array_form
        v = [self.points[af[self._frame[i]]].tolist() for i in range(4)]
        u = self.points[af[self._frame[4]]].tolist()
        # solve sum_i lam_i v_i = u
        M = transpose(v)
        lam = [row[0] for row in mat_mul(F, mat_inv(F, M), [[x] for x in u])]
        X = [[F.mul(lam[j], v[j][i]) for j in range(4)] for i in range(4)]
        return GroupElement(F, X)


@lru_cache(maxsize=None)
def projective_action(q: int) -> ProjectiveAction:
    return ProjectiveAction(make_field(q))


class GeneratingSet:
    """A list of group elements; order/membership via Schreier-Sims on PG(3,q)."""

    def __init__(self, F: Field, gens: Iterable[GroupElement] = (), claimed_order: Optional[int] = None):
        self.field = F
        self.gens: list[GroupElement] = [g for g in gens if not g.is_identity()]
        self.claimed_order = claimed_order
        self._group: Optional[PermutationGroup] = None

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    @property
    def perm_group(self) -> PermutationGroup:
        if self._group is None:
            act = projective_action(self.field.q)
            perms = [act.perm(g) for g in self.gens] or [Permutation(act.degree - 1)]
            self._group = PermutationGroup(perms)
        return self._group

    def order(self) -> int:
        return int(self.perm_group.order())

    def contains(self, g: GroupElement) -> bool:
        return bool(self.perm_group.contains(projective_action(self.field.q).perm(g)))

    def random(self, rng: np.random.Generator) -> GroupElement:
        n = self.order()
        if n == 1:
            return GroupElement.identity(self.field)
        r = int(rng.integers(0, n))
        return projective_action(self.field.q).element(self.perm_group.coset_unrank(r))

    def extended(self, g: GroupElement) -> "GeneratingSet":
        return GeneratingSet(self.field, self.gens + [g])

    def conjugated(self, t: GroupElement) -> "GeneratingSet":
        """Generators of t G t^-1."""
        ti = t.inverse()
        return GeneratingSet(self.field, [t * g * ti for g in self.gens], self.claimed_order)


def pgl4_generators(F: Field) -> GeneratingSet:
    """diag(a,1,1,1), the transvection I+E12 and the 4-cycle; together they generate GL(4,q)."""
    a = F.alpha
    d = [[a, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    t = [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    c = [[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
    # for q = 2 the diagonal generator is the identity and is dropped
    return GeneratingSet(F, [GroupElement(F, m) for m in (d, t, c)], claimed_order=pgl4_order(F.q))


def closure_order(gens: GeneratingSet, bound: int = 10 ** 6) -> int:
    """Order by exhaustive closure (independent of Schreier-Sims); small groups only."""
    F = gens.field
    seen = {GroupElement.identity(F)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = g * h
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
                    if len(seen) > bound:
                        raise OracleBoundExceeded(f"closure exceeded {bound} elements")
        frontier = nxt
    return len(seen)


# ---------------------------------------------------------------- Schreier BFS

def schreier_bfs(perms: Sequence[np.ndarray], n: int,
                 on_step: Optional[Callable[[np.ndarray, np.ndarray, int], None]] = None):
    """Orbits of permutations of range(n) with Schreier data.

    Roots are the minimum elements of their orbits; the tree is built
    breadth-first with the frontier in increasing order and generators tried in
    order, so the output is a pure function of the input.  Returns
    ``(rep_of, schreier, parent)``; ``schreier[x]`` is the generator index
    that reached ``x`` (-1 at roots).
    """
    if n == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z.astype(np.int8), z
    if perms:
        rows = np.concatenate([np.arange(n)] * len(perms))
        cols = np.concatenate(perms)
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
        _, labels = connected_components(graph, directed=True, connection="weak")
        _, roots = np.unique(labels, return_index=True)
    else:
        roots = np.arange(n)
    roots = np.sort(roots)
    idx_dtype = np.int32 if n < 2 ** 31 else np.int64
    rep_of = np.full(n, -1, dtype=idx_dtype)
    parent = np.full(n, -1, dtype=idx_dtype)
    schreier = np.full(n, -1, dtype=np.int8)
    visited = np.zeros(n, dtype=bool)
    visited[roots] = True
    rep_of[roots] = roots
    frontier = roots
    while frontier.size:
        found = []
        for gi, perm in enumerate(perms):
            img = perm[frontier]
            m = ~visited[img]
            new, src = img[m], frontier[m]
            visited[new] = True
            schreier[new] = gi
            parent[new] = src
            rep_of[new] = rep_of[src]
            if on_step is not None and new.size:
                on_step(new, src, gi)
            found.append(new)
        frontier = np.sort(np.concatenate(found)) if found else np.zeros(0, dtype=np.int64)
    return rep_of, schreier, parent


def point_permutation(F: Field, g: GroupElement, coords: np.ndarray, chunk: int = 1 << 20) -> np.ndarray:
    out = np.empty(coords.shape[0], dtype=np.int64)
    LT = g.lift10.T
    for s in range(0, coords.shape[0], chunk):
        out[s:s + chunk] = rows_to_indices(F, F.matmul(coords[s:s + chunk], LT))
    return out


@lru_cache(maxsize=2)
def all_point_rows(q: int) -> np.ndarray:
    F = make_field(q)
    n = num_points(q)
    out = np.empty((n, NCOORD), dtype=np.uint8)
    chunk = 1 << 20
    for s in range(0, n, chunk):
        out[s:s + chunk] = indices_to_coords(F, np.arange(s, min(n, s + chunk)))
    return out


def estimate_orbit_table_bytes(q: int, ngens: int = 3, dense_witness: bool = True) -> int:
    n = num_points(q)
    per_point = NCOORD + 4 + 1 + 4 + 8 * ngens + 40 + (16 if dense_witness else 0)
    return n * per_point


@dataclass
class OrbitTable:
    """Orbits of K on all points of PG(9,q) with Schreier vector and witnesses."""

    field: Field
    gens: GeneratingSet
    rep_of: np.ndarray
    schreier: np.ndarray
    parent: np.ndarray
    reps: np.ndarray
    sizes: np.ndarray
    witness: Optional[np.ndarray] = dc_field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.field.q

    def orbit_size(self, rep_index: int) -> int:
        return int(self.sizes[np.searchsorted(self.reps, rep_index)])

    def witness_of(self, i: int) -> GroupElement:
        """Element mapping point ``i`` to its orbit representative."""
        F = self.field
        if self.witness is not None:
            return GroupElement(F, self.witness[i].reshape(4, 4).tolist())
        ginv = [g.inverse() for g in self.gens.gens]
        acc = GroupElement.identity(F)
        x = int(i)
        while self.schreier[x] >= 0:
            acc = ginv[self.schreier[x]] * acc
            x = int(self.parent[x])
        return acc

    def save(self, path) -> None:
        save_orbit_table(self, path)


def point_orbits(gens: GeneratingSet, F: Optional[Field] = None,
                 memory_budget: int = 4 << 30, dense_witness: Optional[bool] = None) -> OrbitTable:
    F = F or gens.field
    q = F.q
    need = estimate_orbit_table_bytes(q, len(gens), dense_witness is not False)
    if dense_witness is None:
        dense_witness = need <= memory_budget // 2
        if not dense_witness:
            need = estimate_orbit_table_bytes(q, len(gens), False)
    if need > memory_budget:
        raise MemoryBudgetExceeded(
            f"point orbits for q={q} need about {need} bytes; budget is {memory_budget}")
    n = num_points(q)
    coords = all_point_rows(q)
    perms = [point_permutation(F, g, coords) for g in gens.gens]
    wit = None
    on_step = None
    if dense_witness:
        wit = np.zeros((n, 16), dtype=np.uint8)
        wit[:, [0, 5, 10, 15]] = 1
        ginv = [np.array(g.inverse().mat, dtype=np.uint8) for g in gens.gens]

        def on_step(new, src, gi):
            wit[new] = F.matmul(wit[src].reshape(-1, 4, 4), ginv[gi]).reshape(-1, 16)

    rep_of, schreier, parent = schreier_bfs(perms, n, on_step)
    reps, sizes = np.unique(rep_of, return_counts=True)
    log.info("q=%d: %d point orbits", q, len(reps))
    return OrbitTable(F, gens, rep_of, schreier, parent, reps, sizes, wit)


def trace_to_rep(T: OrbitTable, p: SymPoint) -> tuple[SymPoint, GroupElement]:
    i = p.index
    rep = SymPoint(T.field, tuple(int(c) for c in indices_to_coords(T.field, np.array([T.rep_of[i]]))[0]))
    return rep, T.witness_of(i)


def stabilizer(T: OrbitTable, rep: SymPoint, gens: Optional[GeneratingSet] = None,
               rng: Optional[np.random.Generator] = None) -> GeneratingSet:
    """Stabilizer of an orbit representative from random Schreier generators.

    Random uniform g in K give w(g.rep) * g in the stabilizer; generators are
    added until the order reaches |K| / orbit size.
    """
    F = T.field
    rng = rng or np.random.default_rng(rep.index)
    i = rep.index
    if int(T.rep_of[i]) != i:
        raise ValueError("stabilizer needs an orbit representative")
    target = pgl4_order(F.q) // T.orbit_size(i)
    S = GeneratingSet(F)
    while S.order() < target:
        g = random_element(F, rng)
        x = act_point(g, rep)
        h = T.witness_of(x.index) * g
        if act_point(h, rep) != rep:
            raise AssertionError("Schreier generator does not fix the representative")
        if not S.contains(h):
            S = S.extended(h)
    S.claimed_order = target
    return reduce_generators(S, rng)


def reduce_generators(S: GeneratingSet, rng: np.random.Generator, cap: int = 64) -> GeneratingSet:
    """Shrink a generating set above ``cap`` by random subproducts (order preserved)."""
    if len(S) <= cap:
        return S
    order = S.order()
    out = GeneratingSet(S.field)
    while out.order() < order:
        h = GroupElement.identity(S.field)
        for g in S.gens:
            if rng.integers(2):
                h = h * g
        if not out.contains(h):
            out = out.extended(h)
    out.claimed_order = order
    return out


# ---------------------------------------------------------------- subspace orbits

@dataclass
class SubspaceOrbit:
    rep: Subspace
    size: int
    members: list[Subspace]
    witnesses: dict = dc_field(repr=False)

    def witness(self, W: Subspace) -> GroupElement:
        """Element mapping member ``W`` to the representative."""
        return self.witnesses[W]


def orbits_on_subspaces(gens: GeneratingSet, cands: Iterable[Subspace],
                        check_closed: bool = False) -> list[SubspaceOrbit]:
    """Partition ``cands`` into orbits of the group generated by ``gens``.

    Representatives are encoding-minimal; the caller guarantees ``cands`` is
    a union of orbits (``check_closed`` verifies it).
    """
    pool = sorted(set(cands), key=Subspace.encoding)
    pool_set = set(pool)
    done: set[Subspace] = set()
    out = []
    for W in pool:
        if W in done:
            continue
        F = W.field
        # to_root[X] maps X to W (the BFS root, which is encoding-minimal)
        to_root = {W: GroupElement.identity(F)}
        queue = [W]
        for X in queue:
            for g in gens.gens:
                Y = act_subspace(g, X)
                if Y not in to_root:
                    if check_closed and Y not in pool_set:
                        raise NotClosed("candidate image leaves the candidate set")
                    to_root[Y] = to_root[X] * g.inverse()
                    queue.append(Y)
        members = sorted(to_root, key=Subspace.encoding)
        done.update(members)
        out.append(SubspaceOrbit(W, len(members), members, to_root))
    return out


# ---------------------------------------------------------------- brute force

def iter_group_matrices(F: Field, chunk_rows: int = 1 << 18) -> Iterator[np.ndarray]:
    """All normalized invertible 4x4 matrices over F, in chunks of shape (n,4,4)."""
    from .geom import coefficient_grid
    q = F.q
    first = normalized_coefficients(q, 4)
    vecs = coefficient_grid(q, 4)
    nv = len(vecs)
    for r0 in first:
        # rows 2..4 range over all vector triples; chunk over the second row
        for s in range(0, nv, max(1, chunk_rows // (nv * nv))):
            r1 = vecs[s:s + max(1, chunk_rows // (nv * nv))]
            grid = np.stack(np.meshgrid(np.arange(len(r1)), np.arange(nv), np.arange(nv), indexing="ij"), -1).reshape(-1, 3)
            M = np.empty((len(grid), 4, 4), dtype=np.uint8)
            M[:, 0] = r0
            M[:, 1] = r1[grid[:, 0]]
            M[:, 2] = vecs[grid[:, 1]]
            M[:, 3] = vecs[grid[:, 2]]
            d = _det4_batch(F, M)
            yield M[d != 0]


def _det4_batch(F: Field, M: np.ndarray) -> np.ndarray:
    sub, mul, add = F.vsub, F.vmul, F.vadd
    total = np.zeros(M.shape[0], dtype=np.uint8)
    pairs = list(itertools.combinations(range(4), 2))
    for c in pairs:
        rest = tuple(x for x in range(4) if x not in c)
        sign = (-1) ** (c[0] + c[1] + 1)
        top = sub(mul(M[:, 0, c[0]], M[:, 1, c[1]]), mul(M[:, 0, c[1]], M[:, 1, c[0]]))
        bot = sub(mul(M[:, 2, rest[0]], M[:, 3, rest[1]]), mul(M[:, 2, rest[1]], M[:, 3, rest[0]]))
        term = mul(top, bot)
        total = add(total, term) if sign > 0 else sub(total, term)
    return total


@lru_cache(maxsize=4)
def all_group_elements(q: int, bound: int = 10 ** 6) -> np.ndarray:
    """Every element of PGL(4,q) as normalized matrices (small q only)."""
    if pgl4_order(q) > bound:
        raise OracleBoundExceeded(f"|PGL(4,{q})| = {pgl4_order(q)} exceeds {bound}")
    return np.concatenate(list(iter_group_matrices(make_field(q))))


def image_point_sets(F: Field, W: Subspace, mats: np.ndarray) -> np.ndarray:
    """Sorted point-index sets of g W for each matrix g in ``mats`` (one row each)."""
    pts = W.point_rows()
    lifts = lift_batch(F, mats)
    imgs = F.matmul(pts[None, :, :], np.transpose(lifts, (0, 2, 1)))
    idx = rows_to_indices(F, imgs.reshape(-1, NCOORD)).reshape(len(mats), len(pts))
    return np.sort(idx, axis=1)


def brute_force_equivalent(W1: Subspace, W2: Subspace, gens: Optional[GeneratingSet] = None,
                           bound: int = 10 ** 8) -> Optional[GroupElement]:
    """Exhaustive search over K for g with g W1 = W2."""
    F = W1.field
    if W1.dim != W2.dim or W1.q != W2.q:
        return None
    if pgl4_order(F.q) > bound:
        raise OracleBoundExceeded(f"|PGL(4,{F.q})| exceeds oracle bound {bound}")
    target = W2.point_indices()
    for mats in iter_group_matrices(F):
        if not len(mats):
            continue
        hit = np.nonzero((image_point_sets(F, W1, mats) == target).all(axis=1))[0]
        if hit.size:
            return GroupElement(F, mats[hit[0]].tolist())
    return None


def brute_force_orbit(W: Subspace, elements: np.ndarray) -> set[tuple[int, ...]]:
    """Point-index sets of every image of ``W`` under the given group elements."""
    return {tuple(r) for r in image_point_sets(W.field, W, elements).tolist()}


# ---------------------------------------------------------------- persistence

_MAGIC = b"SYMORB\x00\x01"
_VERSION = 1


def save_orbit_table(T: OrbitTable, path) -> None:
    n = len(T.rep_of)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIQI", _VERSION, T.q, n, len(T.gens)))
        for g in T.gens.gens:
            fh.write(bytes(g.codes()))
        fh.write(T.rep_of.astype("<i4").tobytes())
        fh.write(T.schreier.astype("<i4").tobytes())


def load_orbit_table(path) -> OrbitTable:
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError(f"{path}: not an orbit table checkpoint")
        version, q, n, ng = struct.unpack("<IIQI", fh.read(20))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        F = make_field(q)
        gens = []
        for _ in range(ng):
            c = list(fh.read(16))
            gens.append(GroupElement(F, [c[4 * i:4 * i + 4] for i in range(4)], normalized=True))
        rep_of = np.frombuffer(fh.read(4 * n), dtype="<i4").astype(np.int32)
        schreier = np.frombuffer(fh.read(4 * n), dtype="<i4").astype(np.int8)
    G = GeneratingSet(F, gens, claimed_order=pgl4_order(q))
    # parents are recomputed by applying the inverse generator
    parent = np.full(n, -1, dtype=np.int32)
    coords = all_point_rows(q)
    for gi, g in enumerate(G.gens):
        sel = np.nonzero(schreier == gi)[0]
        if sel.size:
            parent[sel] = rows_to_indices(F, g.inverse().act_rows(coords[sel]))
    reps, sizes = np.unique(rep_of, return_counts=True)
    return OrbitTable(F, G, rep_of, schreier, parent, reps, sizes, None)
