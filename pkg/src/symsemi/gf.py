"""Table-driven arithmetic in GF(q) for the small orders used by the classifier.

Elements are integer codes in ``[0, q)``.  A code is the polynomial-basis
expansion of the element in powers of the pinned primitive element ``a``:
``code = sum(d_i * p**i)`` for ``element = sum(d_i * a**i)``.  Addition is
digit-wise mod ``p``; multiplication goes through exp/log tables.
"""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

# Defining polynomials, low-to-high coefficients over GF(p), leading 1 included.
# Prime orders use X - g for the smallest primitive root g.
PINNED_POLYNOMIALS: dict[int, tuple[int, ...]] = {
    2: (1, 1),        # X + 1, a = 1
    3: (1, 1),        # X - 2, a = 2
    4: (1, 1, 1),     # X^2 + X + 1
    5: (3, 1),        # X - 2, a = 2
    7: (4, 1),        # X - 3, a = 3
    8: (1, 1, 0, 1),  # X^3 + X + 1
    9: (2, 2, 1),     # X^2 - X - 1
}


class UnsupportedOrder(ValueError):
    pass


def _factor_prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


class Field:
    """GF(q) with fixed defining polynomial and primitive element ``a``.

    Scalar operations work on plain ints; the ``ADD``/``MUL``/``NEG``/``INV``
    numpy tables back the vectorized helpers used on point arrays.
    """

    def __init__(self, q: int):
        pk = _factor_prime_power(q)
        if pk is None or q not in PINNED_POLYNOMIALS:
            raise UnsupportedOrder(f"unsupported field order q={q}; supported: {sorted(PINNED_POLYNOMIALS)}")
        self.p, self.k = pk
        self.q = q
        self.min_poly = PINNED_POLYNOMIALS[q]
        self.is_prime = self.k == 1
        p = self.p

        add = [[self._digit_add(a, b) for b in range(q)] for a in range(q)]
        # primitive element: X in the polynomial basis, or the root of X - g for prime q
        alpha = (-self.min_poly[0]) % p if self.is_prime else p
        exp = [1]
        for _ in range(q - 2):
            exp.append(self._poly_mul(exp[-1], alpha))
        if len(set(exp)) != q - 1 or 0 in exp:
            raise UnsupportedOrder(f"pinned polynomial for q={q} is not primitive")
        log = [0] * q
        for i, c in enumerate(exp):
            log[c] = i
        self.alpha = alpha
        self.exp_table = np.array(exp, dtype=np.int64)
        self.log_table = np.array(log, dtype=np.int64)
        self._exp = exp
        self._log = log
        self._add = add
        self._neg = [self._digit_neg(a) for a in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(1, q):
            for b in range(1, q):
                mul[a][b] = exp[(log[a] + log[b]) % (q - 1)]
        self._mul = mul
        self._inv = [0] + [exp[(-log[a]) % (q - 1)] for a in range(1, q)]

        self.ADD = np.array(add, dtype=np.uint8)
        self.MUL = np.array(mul, dtype=np.uint8)
        self.NEG = np.array(self._neg, dtype=np.uint8)
        self.INV = np.array(self._inv, dtype=np.uint8)
        self.SUB = self.ADD[:, self.NEG]
        self.squares = frozenset(mul[a][a] for a in range(1, q))

    # -- construction helpers (digit arithmetic on codes) --
    def _digits(self, c: int) -> list[int]:
        return [(c // self.p ** i) % self.p for i in range(self.k)]

    def _from_digits(self, d) -> int:
        return sum(int(x) * self.p ** i for i, x in enumerate(d))

    def _digit_add(self, a: int, b: int) -> int:
        return self._from_digits([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def _digit_neg(self, a: int) -> int:
        return self._from_digits([(-x) % self.p for x in self._digits(a)])

    def _poly_mul(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        if k == 1:
            return a * b % p
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        for deg in range(2 * k - 2, k - 1, -1):
            c = prod[deg]
            if c:
                for i in range(k + 1):
                    prod[deg - k + i] = (prod[deg - k + i] - c * self.min_poly[i]) % p
        return self._from_digits(prod[:k])

    # -- scalar arithmetic --
    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self._mul[a][self.inv(b)]

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        return self._log[a]

    def exp(self, i: int) -> int:
        return self._exp[i % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def is_square(self, a: int) -> bool:
        return a == 0 or a in self.squares

    def elements(self) -> range:
        return range(self.q)

    # -- text --
    def render(self, a: int) -> str:
        if a == 0:
            return "0"
        i = self._log[a]
        return "1" if i == 0 else f"a^{i}"

    def parse(self, token: str) -> int:
        t = token.strip()
        if t in ("0", "1"):
            return int(t)
        m = re.fullmatch(r"a(?:\^(\d+))?", t)
        if m:
            return self.exp(int(m.group(1) or 1))
        if self.is_prime and re.fullmatch(r"-?\d+", t):
            return int(t) % self.p
        raise ValueError(f"bad GF({self.q}) element token {token!r}")

    def poly_str(self) -> str:
        """Defining polynomial as text, e.g. ``X^2-X-1`` (coefficients lifted to (-p/2, p/2])."""
        terms = []
        for deg in range(len(self.min_poly) - 1, -1, -1):
            c = self.min_poly[deg]
            if c == 0:
                continue
            s = c if c <= self.p // 2 else c - self.p
            sign = "-" if s < 0 else "+"
            mag = abs(s)
            mono = "" if deg == 0 else ("X" if deg == 1 else f"X^{deg}")
            body = str(mag) if deg == 0 else (mono if mag == 1 else f"{mag}{mono}")
            terms.append((sign, body))
        out = terms[0][1] if terms[0][0] == "+" else "-" + terms[0][1]
        for sign, body in terms[1:]:
            out += sign + body
        return out

    # -- vectorized helpers on uint8 code arrays --
    def vadd(self, a, b):
        if self.is_prime:
            return ((a.astype(np.int16) + b) % self.p).astype(np.uint8)
        return self.ADD[a, b]

    def vsub(self, a, b):
        if self.is_prime:
            return ((a.astype(np.int16) - b) % self.p).astype(np.uint8)
        return self.SUB[a, b]

    def vmul(self, a, b):
        if self.is_prime:
            return ((a.astype(np.int16) * b) % self.p).astype(np.uint8)
        return self.MUL[a, b]

    def matmul(self, A, B):
        """Product of code matrices ``A @ B`` over GF(q); ``A`` may be a batch (..., n, k)."""
        A = np.asarray(A, dtype=np.uint8)
        B = np.asarray(B, dtype=np.uint8)
        if self.is_prime:
            return ((A.astype(np.int64) @ B.astype(np.int64)) % self.p).astype(np.uint8)
        out = np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.uint8)
        for i in range(A.shape[-1]):
            out = self.ADD[out, self.MUL[A[..., i, None], B[..., i, None, :]]]
        return out

    def __repr__(self):
        return f"GF({self.q})"

    def __reduce__(self):
        return (make_field, (self.q,))


@lru_cache(maxsize=None)
def make_field(q: int) -> Field:
    return Field(q)
