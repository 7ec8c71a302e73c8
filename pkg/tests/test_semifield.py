import itertools

import numpy as np
import pytest

from conftest import classification
from symsemi.geom import COORD_PAIRS, is_semifield_subspace
from symsemi.gf import make_field
from symsemi.group import act_subspace, random_element
from symsemi.semifield import (
    CubicalArray, EtaIsSquare, EvenCharacteristic, NotCommutative, NotPresemifield, change_basis,
    dickson_algebra, field_algebra, has_identity, identify, is_associative, is_commutative,
    is_presemifield, knuth_permute, symmetric_spread_solid,
)

PERMS = list(itertools.permutations(range(3)))


def brute_presemifield(c):
    """Direct product over all nonzero pairs (independent of the determinant route)."""
    F = c.field
    nz = [x for x in itertools.product(range(F.q), repeat=4) if any(x)]
    return all(any(c.product(x, y)) for x in nz for y in nz)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_field_algebra_flags(q):
    c = field_algebra(make_field(q))
    assert (is_presemifield(c), is_commutative(c), is_associative(c)) == (True, True, True)
    e0 = [1, 0, 0, 0]
    for b in itertools.islice(itertools.product(range(q), repeat=4), 200):
        assert c.product(e0, list(b)) == list(b) == c.product(list(b), e0)


def test_field_algebra_q2_exhaustive_zero_divisors():
    assert brute_presemifield(field_algebra(make_field(2)))


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_dickson_flags(q):
    c = dickson_algebra(make_field(q))
    assert (is_presemifield(c), is_commutative(c), is_associative(c)) == (True, True, False)
    assert has_identity(c) == [1, 0, 0, 0]


def test_dickson_q3_exhaustive():
    c = dickson_algebra(make_field(3))
    assert brute_presemifield(c)
    e = [[int(i == j) for j in range(4)] for i in range(4)]
    bad = [(i, j, k) for i, j, k in itertools.product(range(4), repeat=3)
           if c.product(c.product(e[i], e[j]), e[k]) != c.product(e[i], c.product(e[j], e[k]))]
    assert bad


def test_dickson_identity_element_acts_trivially():
    c = dickson_algebra(make_field(5))
    for x in itertools.product(range(5), repeat=4):
        assert c.product([1, 0, 0, 0], list(x)) == list(x)


def test_dickson_without_twist_is_the_field():
    c = dickson_algebra(make_field(3), sigma=0)
    assert is_associative(c) and is_presemifield(c)


def test_dickson_errors():
    with pytest.raises(EvenCharacteristic):
        dickson_algebra(make_field(4))
    with pytest.raises(EtaIsSquare):
        dickson_algebra(make_field(3), eta=(1, 0))


def test_zero_array_flags():
    c = CubicalArray(make_field(3), np.zeros((4, 4, 4), dtype=np.uint8), "zero")
    assert (is_presemifield(c), is_commutative(c), is_associative(c)) == (False, True, True)


def test_knuth_identity_and_involutions():
    c = dickson_algebra(make_field(3))
    assert knuth_permute(c, (0, 1, 2)) == c
    for t in ((1, 0, 2), (2, 1, 0), (0, 2, 1)):
        assert knuth_permute(knuth_permute(c, t), t) == c
    with pytest.raises(ValueError):
        knuth_permute(c, (0, 0, 1))


def test_knuth_is_group_action_on_random_arrays():
    F = make_field(5)
    rng = np.random.default_rng(0)
    for _ in range(10):
        c = CubicalArray(F, rng.integers(0, 5, (4, 4, 4)).astype(np.uint8), "random")
        for p1, p2 in itertools.product(PERMS, repeat=2):
            composed = tuple(p1[p2[t]] for t in range(3))
            assert knuth_permute(knuth_permute(c, p1), p2) == knuth_permute(c, composed)
        i, j, k = 1, 2, 3
        assert knuth_permute(c, (2, 1, 0)).a[i, j, k] == c.a[k, j, i]


@pytest.mark.parametrize("q,kind", [(2, "field"), (3, "field"), (3, "dickson")])
def test_knuth_preserves_presemifield(q, kind):
    F = make_field(q)
    c = field_algebra(F) if kind == "field" else dickson_algebra(F)
    for p in PERMS:
        d = knuth_permute(c, p)
        assert is_presemifield(d)
        if q == 2 or p in ((0, 1, 2), (2, 1, 0)):
            assert brute_presemifield(d)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_spread_solid_is_symmetric_semifield(q):
    F = make_field(q)
    algs = [field_algebra(F)] + ([dickson_algebra(F)] if q % 2 else [])
    for c in algs:
        b = c.a.transpose(2, 1, 0)
        assert np.array_equal(b, b.transpose(0, 2, 1))
        W = symmetric_spread_solid(c)
        assert W.dim == 3 and is_semifield_subspace(W)
        # basis matrix i carries b[i] in the upper-triangular coordinates
        rows = {tuple(int(b[i, j, k]) for (j, k) in COORD_PAIRS) for i in range(4)}
        assert all(W.contains_vector(r) for r in rows)


def test_spread_solid_errors():
    F = make_field(3)
    rng = np.random.default_rng(1)
    with pytest.raises(NotCommutative):
        symmetric_spread_solid(CubicalArray(F, rng.integers(0, 3, (4, 4, 4)).astype(np.uint8), "r"))
    with pytest.raises(NotPresemifield):
        symmetric_spread_solid(CubicalArray(F, np.zeros((4, 4, 4), dtype=np.uint8), "zero"))


def _invertible(F, rng):
    from symsemi.group import SingularMatrix, lift
    while True:
        M = rng.integers(0, F.q, (4, 4)).tolist()
        try:
            lift(F, M)
            return M
        except SingularMatrix:
            continue


@pytest.mark.parametrize("q", [2, 3])
def test_basis_change_lands_in_same_orbit(q):
    F = make_field(q)
    res = classification(q)
    rng = np.random.default_rng(q)
    algs = [field_algebra(F)] + ([dickson_algebra(F)] if q % 2 else [])
    for c in algs:
        base = identify(symmetric_spread_solid(c), res)[0]
        for _ in range(4):
            d = change_basis(c, _invertible(F, rng))
            assert is_commutative(d) and is_presemifield(d)
            assert identify(symmetric_spread_solid(d), res)[0] == base


@pytest.mark.parametrize("q", [2, 3])
def test_identify_well_defined(q):
    F = make_field(q)
    res = classification(q)
    rng = np.random.default_rng(10 + q)
    W = symmetric_spread_solid(field_algebra(F))
    j, g = identify(W, res)
    assert act_subspace(g, W) == res.levels[3][j].rep
    for _ in range(5):
        V = act_subspace(random_element(F, rng), W)
        k, h = identify(V, res)
        assert k == j and act_subspace(h, V) == res.levels[3][j].rep


def test_identify_separates_field_and_dickson_q3():
    F = make_field(3)
    res = classification(3)
    a = identify(symmetric_spread_solid(field_algebra(F)), res)[0]
    b = identify(symmetric_spread_solid(dickson_algebra(F)), res)[0]
    assert {a, b} == {0, 1}


def test_identify_field_mismatch():
    with pytest.raises(ValueError):
        identify(symmetric_spread_solid(field_algebra(make_field(3))), classification(2))
