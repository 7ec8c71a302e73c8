"""Four-dimensional algebras over GF(q) as cubical structure-constant arrays.

``a[i, j, k]`` is the coefficient of ``e_k`` in ``e_i * e_j``.  Commutative
presemifields give symmetric spread sets (solids of PG(9,q)) through the
slot swap ``b[i, j, k] = a[k, j, i]``; those solids are then located in a
classification by canonical keys.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .gf import Field
from .geom import COORD_PAIRS, Subspace, is_semifield_subspace, normalized_coefficients, span
from .group import GroupElement, _det4_batch

# Irreducible quartics over GF(q), low-to-high codes, for the power basis of GF(q^4).
QUARTICS: dict[int, tuple[int, ...]] = {
    2: (1, 0, 0, 1, 1),
    3: (1, 0, 1, 1, 1),
    4: (1, 0, 1, 2, 1),
    5: (1, 0, 1, 1, 1),
    7: (1, 0, 0, 1, 1),
    8: (1, 0, 0, 1, 1),
    9: (1, 0, 3, 3, 1),
}

# Primitive quadratics over GF(q) (q odd) defining GF(q^2) for the Dickson product.
# For q = 3 this is X^2 - X - 1, so the root matches the primitive element of GF(9).
QUADRATICS: dict[int, tuple[int, ...]] = {
    3: (2, 2, 1),
    5: (2, 1, 1),
    7: (3, 1, 1),
    9: (3, 1, 1),
}


class NotCommutative(ValueError):
    pass


class NotPresemifield(ValueError):
    pass


class SolidNotSemifield(AssertionError):
    pass


class EtaIsSquare(ValueError):
    pass


class EvenCharacteristic(ValueError):
    pass


class PolyExtension:
    """GF(q)[X]/(f) for a monic irreducible f; elements are coefficient tuples."""

    def __init__(self, F: Field, modulus: Sequence[int]):
        self.base = F
        self.modulus = tuple(int(c) for c in modulus)
        self.degree = len(self.modulus) - 1

    def zero(self):
        return (0,) * self.degree

    def one(self):
        return (1,) + (0,) * (self.degree - 1)

    def gen(self):
        return (0, 1) + (0,) * (self.degree - 2)

    def basis(self):
        return [tuple(int(i == j) for j in range(self.degree)) for i in range(self.degree)]

    def add(self, a, b):
        F = self.base
        return tuple(F.add(x, y) for x, y in zip(a, b))

    def scale(self, c, a):
        F = self.base
        return tuple(F.mul(c, x) for x in a)

    def mul(self, a, b):
        F, k, f = self.base, self.degree, self.modulus
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = F.add(prod[i + j], F.mul(x, y))
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                for i in range(k + 1):
                    prod[deg - k + i] = F.sub(prod[deg - k + i], F.mul(c, f[i]))
        return tuple(prod[:k])

    def pow(self, a, e: int):
        out, base = self.one(), a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def elements(self):
        return itertools.product(range(self.base.q), repeat=self.degree)

    def is_square(self, a) -> bool:
        if not any(a):
            return True
        order = self.base.q ** self.degree - 1
        return self.pow(a, order // 2) == self.one()


@dataclass
class CubicalArray:
    field: Field
    a: np.ndarray
    basis: str = "e0 e1 e2 e3"

    def product(self, x: Sequence[int], y: Sequence[int]) -> list[int]:
        F = self.field
        out = [0] * 4
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                c = F.mul(xi, yj)
                for k in range(4):
                    out[k] = F.add(out[k], F.mul(c, int(self.a[i, j, k])))
        return out

    def __eq__(self, other):
        return isinstance(other, CubicalArray) and self.field.q == other.field.q and np.array_equal(self.a, other.a)


def field_algebra(F: Field) -> CubicalArray:
    """GF(q^4) on the power basis 1, b, b^2, b^3 of the pinned quartic."""
    E = PolyExtension(F, QUARTICS[F.q])
    B = [E.pow(E.gen(), i) for i in range(4)]
    a = np.zeros((4, 4, 4), dtype=np.uint8)
    for i, j in itertools.product(range(4), repeat=2):
        a[i, j] = E.mul(B[i], B[j])
    return CubicalArray(F, a, "1 b b^2 b^3 mod " + _poly_text(F, QUARTICS[F.q]))


def quadratic_extension(F: Field) -> PolyExtension:
    if F.p == 2:
        raise EvenCharacteristic("the Dickson construction needs odd q")
    return PolyExtension(F, QUADRATICS[F.q])


def dickson_algebra(F: Field, eta=None, sigma: int = 1) -> CubicalArray:
    """(x,y)*(u,v) = (xu + eta (yv)^s, xv + yu) on GF(q^2)^2, with s = t -> t^(q^sigma).

    Basis: (1,0), (b,0), (0,1), (0,b) where b is the root of the pinned
    quadratic; eta defaults to b.
    """
    if F.p == 2:
        raise EvenCharacteristic("the Dickson construction needs odd q")
    E = quadratic_extension(F)
    eta = E.gen() if eta is None else tuple(eta)
    if E.is_square(eta):
        raise EtaIsSquare(f"eta={eta} is a square in GF({F.q}^2)")
    expo = F.q ** (sigma % 2)

    def prod(x, y, u, v):
        first = E.add(E.mul(x, u), E.mul(eta, E.pow(E.mul(y, v), expo)))
        return first, E.add(E.mul(x, v), E.mul(y, u))

    z, one, b = E.zero(), E.one(), E.gen()
    basis = [(one, z), (b, z), (z, one), (z, b)]
    a = np.zeros((4, 4, 4), dtype=np.uint8)
    for i, j in itertools.product(range(4), repeat=2):
        s, t = prod(*basis[i], *basis[j])
        a[i, j] = list(s) + list(t)
    return CubicalArray(F, a, "(1,0) (b,0) (0,1) (0,b) b^2 = " + _poly_text(F, QUADRATICS[F.q]))


def _poly_text(F: Field, c: Sequence[int]) -> str:
    return "[" + " ".join(F.render(x) for x in c) + "]"


def left_multiplication(c: CubicalArray, xs: np.ndarray) -> np.ndarray:
    """Matrices of y -> x*y for each row x of ``xs``; shape (n, 4, 4) indexed [j, k]."""
    F = c.field
    out = np.zeros((len(xs), 4, 4), dtype=np.uint8)
    for i in range(4):
        out = F.vadd(out, F.vmul(xs[:, i, None, None], c.a[i][None, :, :]))
    return out


def is_presemifield(c: CubicalArray) -> bool:
    """No zero divisors: x*y != 0 for all nonzero x, y (tested as det(L_x) != 0)."""
    xs = normalized_coefficients(c.field.q, 4)
    return bool(np.all(_det4_batch(c.field, left_multiplication(c, xs)) != 0))


def is_commutative(c: CubicalArray) -> bool:
    return bool(np.array_equal(c.a, c.a.transpose(1, 0, 2)))


def is_associative(c: CubicalArray) -> bool:
    e = [[int(i == j) for j in range(4)] for i in range(4)]
    for i, j, k in itertools.product(range(4), repeat=3):
        if c.product(c.product(e[i], e[j]), e[k]) != c.product(e[i], c.product(e[j], e[k])):
            return False
    return True


def has_identity(c: CubicalArray) -> Optional[list[int]]:
    """A two-sided identity element, if one exists (brute force over GF(q)^4)."""
    F = c.field
    e = [[int(i == j) for j in range(4)] for i in range(4)]
    for x in itertools.product(range(F.q), repeat=4):
        if all(c.product(x, b) == b and c.product(b, x) == b for b in e):
            return list(x)
    return None


def knuth_permute(c: CubicalArray, perm: Sequence[int]) -> CubicalArray:
    """Permute the three tensor slots: result[i0, i1, i2] = a[j] with j[perm[t]] = i_t."""
    if sorted(perm) != [0, 1, 2]:
        raise ValueError(f"not a permutation of the three slots: {perm}")
    return CubicalArray(c.field, np.ascontiguousarray(c.a.transpose(tuple(perm))), c.basis)


def symmetric_spread_solid(c: CubicalArray, check: bool = True) -> Subspace:
    """Span of the symmetric matrices B_i[j, k] = a[k, j, i] of a commutative presemifield."""
    if not is_commutative(c):
        raise NotCommutative("the slot swap gives symmetric matrices only for commutative arrays")
    if check and not is_presemifield(c):
        raise NotPresemifield("array has zero divisors")
    b = c.a.transpose(2, 1, 0)
    if not np.array_equal(b, b.transpose(0, 2, 1)):
        raise SolidNotSemifield("slot-swapped array is not symmetric")
    rows = [[int(b[i, j, k]) for (j, k) in COORD_PAIRS] for i in range(4)]
    W = span(c.field, rows)
    if W.dim != 3 or not is_semifield_subspace(W):
        raise SolidNotSemifield("symmetric spread set is not a semifield solid")
    return W


def change_basis(c: CubicalArray, M: Sequence[Sequence[int]]) -> CubicalArray:
    """Same algebra on the basis f_i = sum_j M[i][j] e_j (M invertible)."""
    from .group import mat_inv
    F = c.field
    Minv = mat_inv(F, M)
    a = np.zeros((4, 4, 4), dtype=np.uint8)
    for i, j in itertools.product(range(4), repeat=2):
        prod = c.product(M[i], M[j])  # in e-coordinates
        # convert to f-coordinates: coeffs = prod @ Minv
        a[i, j] = [sum_f(F, [F.mul(prod[t], Minv[t][k]) for t in range(4)]) for k in range(4)]
    return CubicalArray(F, a, c.basis + " (rebased)")


def sum_f(F: Field, xs) -> int:
    s = 0
    for x in xs:
        s = F.add(s, x)
    return s


def identify(solid: Subspace, result) -> tuple[int, GroupElement]:
    """Level-3 node containing ``solid`` and an element mapping it onto the node representative."""
    from .classify import NotFound, engine_for
    if result.q != solid.q:
        raise ValueError(f"solid is over GF({solid.q}) but the classification is for q={result.q}")
    if len(result.levels) < 4:
        raise NotFound("classification does not reach dimension 3")
    eng = engine_for(result)
    return eng.node_of(solid)
