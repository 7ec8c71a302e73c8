import itertools

import numpy as np
import pytest
from sympy import Poly, symbols

from symsemi.gf import PINNED_POLYNOMIALS, UnsupportedOrder, make_field

QS = sorted(PINNED_POLYNOMIALS)
X = symbols("X")


def sympy_mul(q, a, b):
    """Product of two codes through sympy polynomial arithmetic mod the pinned polynomial."""
    F = make_field(q)
    p, k = F.p, F.k
    if k == 1:
        return a * b % p
    digits = lambda c: [(c // p ** i) % p for i in range(k)]
    pa = Poly(list(reversed(digits(a))), X, modulus=p)
    pb = Poly(list(reversed(digits(b))), X, modulus=p)
    m = Poly(list(reversed(F.min_poly)), X, modulus=p)
    r = (pa * pb).rem(m)
    coeffs = [int(c) % p for c in reversed(r.all_coeffs())]
    return sum(c * p ** i for i, c in enumerate(coeffs))


@pytest.mark.parametrize("q", QS)
def test_multiplication_matches_sympy(q):
    F = make_field(q)
    for a, b in itertools.product(range(q), repeat=2):
        assert F.mul(a, b) == sympy_mul(q, a, b)


@pytest.mark.parametrize("q", QS)
def test_field_axioms(q):
    F = make_field(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1
        assert F.add(a, F.neg(a)) == 0


@pytest.mark.parametrize("q", QS)
def test_primitive_element_and_logs(q):
    F = make_field(q)
    assert sorted(F.exp(i) for i in range(q - 1)) == list(range(1, q))
    for a in range(1, q):
        assert F.exp(F.log(a)) == a
        assert F.pow(a, q - 1) == 1
        assert F.pow(a, q) == a
    assert len(F.squares) == (q - 1 if F.p == 2 else (q - 1) // 2)


@pytest.mark.parametrize("q", QS)
def test_render_parse_roundtrip(q):
    F = make_field(q)
    for a in range(q):
        assert F.parse(F.render(a)) == a
    assert F.render(0) == "0" and F.render(1) == "1"


def test_pinned_polynomial_text():
    assert make_field(8).poly_str() == "X^3+X+1"
    assert make_field(9).poly_str() == "X^2-X-1"
    assert make_field(4).poly_str() == "X^2+X+1"


@pytest.mark.parametrize("q", [0, 1, 6, 10, 11, 16, 25])
def test_unsupported_orders(q):
    with pytest.raises(UnsupportedOrder):
        make_field(q)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        make_field(9).inv(0)


@pytest.mark.parametrize("q", QS)
def test_vectorized_ops_match_scalar(q):
    F = make_field(q)
    a, b = np.meshgrid(np.arange(q, dtype=np.uint8), np.arange(q, dtype=np.uint8))
    for vf, sf in ((F.vadd, F.add), (F.vsub, F.sub), (F.vmul, F.mul)):
        out = vf(a, b)
        assert all(out[i, j] == sf(int(a[i, j]), int(b[i, j])) for i in range(q) for j in range(q))


@pytest.mark.parametrize("q", [3, 4, 9])
def test_matmul_batched(q):
    F = make_field(q)
    rng = np.random.default_rng(q)
    A = rng.integers(0, q, (5, 4, 4)).astype(np.uint8)
    B = rng.integers(0, q, (5, 4, 4)).astype(np.uint8)
    C = F.matmul(A, B)
    for n in range(5):
        for i, j in itertools.product(range(4), repeat=2):
            s = 0
            for t in range(4):
                s = F.add(s, F.mul(int(A[n, i, t]), int(B[n, t, j])))
            assert C[n, i, j] == s


def test_frobenius_is_automorphism():
    F = make_field(9)
    for a, b in itertools.product(range(9), repeat=2):
        assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
        assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
