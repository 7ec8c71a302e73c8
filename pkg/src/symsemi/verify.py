"""Checks on representative lists: semifield predicate plus pairwise inequivalence.

Inequivalence is certified at one of three levels, strongest first:

* ``classification-keys``: canonical keys from a classification of the same q;
* ``brute-force``: exhaustive search over PGL(4,q) (small q only);
* ``invariants``: K-invariants (point-type counts, and for lines the class of
  the binary quartic ``det(xA + yB)``).  Distinct invariants prove
  inequivalence; pairs with equal invariants stay uncertified.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Optional

import numpy as np

from .gf import Field, make_field
from .geom import (
    PAIR_POS, Subspace, SymPoint, det_rows, is_semifield_subspace, normalized_coefficients,
    point_to_matrix, rref,
)
from .group import OracleBoundExceeded, brute_force_equivalent, pgl4_order

DEFAULT_ORACLE_BOUND = 10 ** 6
_DIAG = [PAIR_POS[(i, i)] for i in range(4)]


def point_type_counts(W: Subspace) -> tuple[int, ...]:
    """(#singular, #type-0, #type-1) points of W; types as in geom.point_type."""
    F = W.field
    rows = W.point_rows()
    d = det_rows(F, rows)
    sing = int(np.count_nonzero(d == 0))
    ok = rows[d != 0]
    if F.p == 2:
        t1 = int(np.count_nonzero(np.all(ok[:, _DIAG] == 0, axis=1)))
    else:
        nonsq = np.array([not F.is_square(int(c)) for c in range(F.q)])
        t1 = int(np.count_nonzero(nonsq[d[d != 0]]))
    return (sing, len(ok) - t1, t1)


def _lin_mats(W: Subspace) -> list[list[list[tuple[int, int]]]]:
    """Entries of xA + yB as coefficient pairs (A, B = the two basis rows)."""
    A, B = W.basis
    M = [[(0, 0)] * 4 for _ in range(4)]
    for (i, j), c in PAIR_POS.items():
        M[i][j] = (A[c], B[c])
    return M


def pencil_quartic(W: Subspace) -> tuple[int, ...]:
    """Coefficients (x^4, x^3 y, ..., y^4) of det(xA + yB) for a line W."""
    F = W.field
    M = _lin_mats(W)
    total = [0] * 5
    for perm in itertools.permutations(range(4)):
        sign = _perm_sign(perm)
        poly = [1]
        for i, j in enumerate(perm):
            a, b = M[i][j]
            poly = _pmul(F, poly, [a, b])
        if sign < 0:
            poly = [F.neg(c) for c in poly]
        total = [F.add(s, c) for s, c in zip(total, poly)]
    return tuple(total)


def _perm_sign(perm) -> int:
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, n = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        s *= -1 if n % 2 == 0 else 1
    return s


def _pmul(F: Field, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


@lru_cache(maxsize=None)
def _gl2(q: int) -> np.ndarray:
    F = make_field(q)
    g = np.array(list(itertools.product(range(q), repeat=4)), dtype=np.uint8)
    det = F.vsub(F.vmul(g[:, 0], g[:, 3]), F.vmul(g[:, 1], g[:, 2]))
    return g[det != 0]


def quartic_class(F: Field, f: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical form of a binary quartic under GL(2,q) substitution and square scalars.

    f'(x,y) = c * f(ax + by, cx + dy) with c a nonzero square; the minimum
    normalized coefficient tuple over all substitutions is returned.  The
    leading nonzero coefficient is scaled to 1, or to the primitive element
    when it lies in the other square class.
    """
    G = _gl2(F.q)
    n = len(G)
    # powers of the two substituted linear forms, coefficients low-to-high in y/x order
    L1 = G[:, [0, 1]]
    L2 = G[:, [2, 3]]

    def vpmul(P, Q):
        out = np.zeros((n, P.shape[1] + Q.shape[1] - 1), dtype=np.uint8)
        for i in range(P.shape[1]):
            for j in range(Q.shape[1]):
                out[:, i + j] = F.vadd(out[:, i + j], F.vmul(P[:, i], Q[:, j]))
        return out

    one = np.ones((n, 1), dtype=np.uint8)
    P1, P2 = [one], [one]
    for _ in range(4):
        P1.append(vpmul(P1[-1], L1))
        P2.append(vpmul(P2[-1], L2))
    acc = np.zeros((n, 5), dtype=np.uint8)
    for i, c in enumerate(f):
        if c:
            term = vpmul(P1[4 - i], P2[i])
            acc = F.vadd(acc, F.vmul(np.uint8(c), term))
    nz = acc != 0
    lead = acc[np.arange(n), nz.argmax(axis=1)]
    if F.p == 2:
        scale = F.INV[lead]
    else:
        sq = np.array([F.is_square(int(c)) for c in range(F.q)])
        target = np.where(sq[lead], 1, F.alpha).astype(np.uint8)
        scale = F.vmul(F.INV[lead], target)
    acc = F.vmul(acc, scale[:, None])
    keys = acc.astype(np.int64) @ (F.q ** np.arange(4, -1, -1, dtype=np.int64))
    return tuple(int(v) for v in acc[int(np.argmin(keys))])


class Undecided(RuntimeError):
    pass


def _nullspace(F: Field, rows: list[list[int]], ncols: int) -> list[list[int]]:
    R = rref(F, rows)
    piv = [next(j for j, c in enumerate(r) if c) for r in R]
    out = []
    for f in (j for j in range(ncols) if j not in piv):
        v = [0] * ncols
        v[f] = 1
        for r, pj in zip(R, piv):
            v[pj] = F.neg(r[f])
        out.append(v)
    return out


def _monic_charpolys(F: Field, f: tuple[int, ...], G: np.ndarray) -> np.ndarray:
    """Monic det(t A' - B') / det(A') for every basis A' = aP + bQ, B' = cP + dQ in G.

    ``f`` is the pencil quartic of (P, Q); rows of G are (a, b, c, d).
    """
    n = len(G)
    X = np.stack([F.NEG[G[:, 2]], G[:, 0]], axis=1)  # a t - c
    Y = np.stack([F.NEG[G[:, 3]], G[:, 1]], axis=1)  # b t - d

    def vpmul(P, Q):
        out = np.zeros((n, P.shape[1] + Q.shape[1] - 1), dtype=np.uint8)
        for i in range(P.shape[1]):
            for j in range(Q.shape[1]):
                out[:, i + j] = F.vadd(out[:, i + j], F.vmul(P[:, i], Q[:, j]))
        return out

    one = np.ones((n, 1), dtype=np.uint8)
    PX, PY = [one], [one]
    for _ in range(4):
        PX.append(vpmul(PX[-1], X))
        PY.append(vpmul(PY[-1], Y))
    acc = np.zeros((n, 5), dtype=np.uint8)
    for i, c in enumerate(f):
        if c:
            acc = F.vadd(acc, F.vmul(np.uint8(c), vpmul(PX[4 - i], PY[i])))
    lead = acc[:, 4]
    acc[lead == 0] = 0
    safe = np.where(lead == 0, 1, lead).astype(np.uint8)
    return F.vmul(acc, F.INV[safe][:, None])


def lines_equivalent(L1: Subspace, L2: Subspace, max_search: int = 1 << 21):
    """A group element mapping line L1 onto line L2, or None if they are not K-equivalent.

    X A X^T = A' and X B X^T = B' force Y = X^T to intertwine A^-1 B with
    A'^-1 B'.  Bases (A', B') of L2 are filtered by characteristic
    polynomial, the intertwiner space is solved linearly and then searched
    exhaustively.  Both lines must consist of nonsingular points.
    """
    from .group import GroupElement, act_subspace, mat_inv, mat_mul
    F = L1.field
    if L1.dim != 1 or L2.dim != 1 or L1.q != L2.q:
        raise ValueError("lines_equivalent needs two lines over the same field")
    if not (is_semifield_subspace(L1) and is_semifield_subspace(L2)):
        raise ValueError("lines_equivalent needs lines of nonsingular points")
    A1, B1 = (point_to_matrix(SymPoint(F, r)) for r in L1.basis)
    M1 = mat_mul(F, mat_inv(F, A1), B1)
    f1, f2 = pencil_quartic(L1), pencil_quartic(L2)
    h = _monic_charpolys(F, f1, np.array([[1, 0, 0, 1]], dtype=np.uint8))[0]
    G = _gl2(F.q)
    ok = np.all(_monic_charpolys(F, f2, G) == h, axis=1)
    P, Q = L2.basis
    for a, b, c, d in G[ok]:
        A2 = [F.add(F.mul(int(a), x), F.mul(int(b), y)) for x, y in zip(P, Q)]
        B2 = [F.add(F.mul(int(c), x), F.mul(int(d), y)) for x, y in zip(P, Q)]
        A2m, B2m = point_to_matrix(SymPoint(F, tuple(A2))), point_to_matrix(SymPoint(F, tuple(B2)))
        M2 = mat_mul(F, mat_inv(F, A2m), B2m)
        # M1 Y - Y M2 = 0 in the 16 entries of Y
        eqs = []
        for i in range(4):
            for j in range(4):
                row = [0] * 16
                for k in range(4):
                    row[4 * k + j] = F.add(row[4 * k + j], M1[i][k])
                    row[4 * i + k] = F.sub(row[4 * i + k], M2[k][j])
                eqs.append(row)
        basis = _nullspace(F, eqs, 16)
        if not basis:
            continue
        if F.q ** len(basis) > max_search:
            raise Undecided(f"intertwiner space of size {F.q}^{len(basis)} is too large to search")
        Yb = np.array(basis, dtype=np.uint8).reshape(-1, 4, 4)
        coeffs = normalized_coefficients(F.q, len(basis))
        # scalars matter here, so expand the normalized combinations by F*
        allc = np.concatenate([F.vmul(coeffs, np.uint8(s)) for s in range(1, F.q)])
        Ys = np.zeros((len(allc), 4, 4), dtype=np.uint8)
        for t in range(len(basis)):
            Ys = F.vadd(Ys, F.vmul(allc[:, t, None, None], Yb[t][None]))
        YT = Ys.transpose(0, 2, 1)
        lhs = F.matmul(F.matmul(YT, np.array(A1, dtype=np.uint8)), Ys)
        hit = np.nonzero(np.all(lhs == np.array(A2m, dtype=np.uint8), axis=(1, 2)))[0]
        if len(hit):
            X = GroupElement(F, YT[hit[0]].tolist())
            if act_subspace(X, L1) != L2:
                raise AssertionError("line equivalence witness does not map L1 onto L2")
            return X
    return None


def invariants(W: Subspace) -> tuple:
    inv = (W.dim, point_type_counts(W))
    if W.dim == 1:
        inv += (quartic_class(W.field, pencil_quartic(W)),)
    return inv


@dataclass
class ItemReport:
    index: int
    dim: int
    semifield: bool
    invariant: tuple
    key: Optional[tuple] = None


@dataclass
class VerifyReport:
    q: int
    claimed: int
    items: list[ItemReport]
    certification: str
    distinct_pairs: int
    uncertified_pairs: list[tuple[int, int]] = dc_field(default_factory=list)
    equivalent_pairs: list[tuple[int, int]] = dc_field(default_factory=list)
    invariant_collisions: int = 0

    @property
    def passed(self) -> int:
        return sum(it.semifield for it in self.items)

    @property
    def all_pass(self) -> bool:
        return self.passed == len(self.items) == self.claimed

    @property
    def certified_inequivalent(self) -> bool:
        return not self.uncertified_pairs and not self.equivalent_pairs

    def statement(self) -> str:
        n = len(self.items)
        total = n * (n - 1) // 2
        if self.equivalent_pairs:
            return (f"{len(self.equivalent_pairs)} of {total} pairs are K-equivalent "
                    f"(certified by {self.certification})")
        if self.uncertified_pairs:
            return (f"{total - len(self.uncertified_pairs)} of {total} pairs certified inequivalent by "
                    f"{self.certification}; inequivalence not certified for {len(self.uncertified_pairs)} pairs")
        return f"all {total} pairs certified inequivalent by {self.certification}"

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "claimed_count": self.claimed,
            "items": len(self.items),
            "semifield_pass": self.passed,
            "failed_items": [it.index for it in self.items if not it.semifield],
            "certification": self.certification,
            "invariant_collisions": self.invariant_collisions,
            "statement": self.statement(),
            "uncertified_pairs": [list(p) for p in self.uncertified_pairs],
            "equivalent_pairs": [list(p) for p in self.equivalent_pairs],
        }

    def to_text(self) -> str:
        lines = [f"q={self.q} items={len(self.items)} claimed={self.claimed}"]
        for it in self.items:
            lines.append(f"item {it.index}: {'pass' if it.semifield else 'FAIL'} semifield check"
                         f"  point types {it.invariant[1][1]}/{it.invariant[1][2]}")
        lines.append(f"semifield check: {self.passed}/{len(self.items)}")
        n = len(self.items)
        lines.append(f"cheap invariants separate {n * (n - 1) // 2 - self.invariant_collisions}"
                     f" of {n * (n - 1) // 2} pairs")
        lines.append(f"certification level: {self.certification}")
        lines.append(self.statement())
        return "\n".join(lines) + "\n"


def verify_subspaces(q: int, subspaces: list[Subspace], claimed: Optional[int] = None,
                     classification=None, oracle_bound: int = DEFAULT_ORACLE_BOUND,
                     line_search: bool = True) -> VerifyReport:
    """Semifield check per item, then pairwise inequivalence at the strongest available level."""
    items = []
    for k, W in enumerate(subspaces, 1):
        items.append(ItemReport(k, W.dim, is_semifield_subspace(W), invariants(W)))
    claimed = len(subspaces) if claimed is None else claimed
    pairs = list(itertools.combinations(range(len(items)), 2))
    dims = {W.dim for W in subspaces}
    coll = sum(items[i].invariant == items[j].invariant for i, j in pairs)

    if classification is not None and classification.q == q and max(dims, default=0) < len(classification.levels) \
            and all(it.semifield for it in items):
        from .classify import engine_for
        eng = engine_for(classification)
        for it, W in zip(items, subspaces):
            it.key = eng.canonicalize(W)[0]
        same = [(i + 1, j + 1) for i, j in pairs if items[i].key == items[j].key]
        return VerifyReport(q, claimed, items, "classification-keys", len(pairs) - len(same), [], same, coll)

    if pgl4_order(q) <= oracle_bound:
        same = []
        for i, j in pairs:
            if items[i].invariant != items[j].invariant:
                continue
            try:
                if brute_force_equivalent(subspaces[i], subspaces[j], bound=oracle_bound):
                    same.append((i + 1, j + 1))
            except OracleBoundExceeded:
                break
        else:
            return VerifyReport(q, claimed, items, "brute-force", len(pairs) - len(same), [], same, coll)

    unc = [(i, j) for i, j in pairs if items[i].invariant == items[j].invariant]
    report = VerifyReport(q, claimed, items, "invariants", len(pairs) - len(unc),
                          [(i + 1, j + 1) for i, j in unc], [], coll)
    if line_search and unc and dims == {1}:
        still, same = [], []
        for i, j in unc:
            if not (items[i].semifield and items[j].semifield):
                still.append((i + 1, j + 1))
                continue
            try:
                X = lines_equivalent(subspaces[i], subspaces[j])
            except Undecided:
                still.append((i + 1, j + 1))
                continue
            if X is not None:
                same.append((i + 1, j + 1))
        report.certification = "invariants+line-search"
        report.uncertified_pairs, report.equivalent_pairs = still, same
        report.distinct_pairs = len(pairs) - len(still) - len(same)
    return report


def verify_representatives(fixture, classification=None, oracle_bound: int = DEFAULT_ORACLE_BOUND,
                           line_search: bool = True) -> VerifyReport:
    return verify_subspaces(fixture.q, fixture.subspaces(), fixture.count, classification, oracle_bound,
                            line_search)
