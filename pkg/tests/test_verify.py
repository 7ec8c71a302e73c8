import itertools

import numpy as np
import pytest

from conftest import builtin, builtin_report, classification
from symsemi.formats import fixture_from_subspaces
from symsemi.geom import span
from symsemi.gf import make_field
from symsemi.group import act_subspace, brute_force_equivalent, random_element
from symsemi.verify import (
    invariants, lines_equivalent, pencil_quartic, point_type_counts, quartic_class,
    verify_representatives, verify_subspaces,
)


@pytest.mark.parametrize("q", [3, 4, 8, 9])
def test_invariants_are_k_invariant(q):
    F = make_field(q)
    rng = np.random.default_rng(q)
    subs = builtin("q8_lines").subspaces()[:4] if q == 8 else builtin("q9_lines").subspaces()[:4] if q == 9 \
        else [n.rep for n in classification(q).levels[1][:4]]
    for W in subs:
        inv = invariants(W)
        for _ in range(3):
            assert invariants(act_subspace(random_element(F, rng), W)) == inv


def test_point_type_counts_sum():
    F = make_field(5)
    W = span(F, [(1, 0, 0, 0, 1, 0, 0, 1, 0, 1), (0, 1, 0, 0, 0, 0, 1, 0, 1, 0)])
    assert sum(point_type_counts(W)) == 6


def test_pencil_quartic_matches_determinant():
    from symsemi.geom import SymPoint, det4, point_to_matrix
    F = make_field(5)
    W = span(F, [(1, 0, 0, 0, 1, 0, 0, 1, 0, 1), (0, 1, 0, 2, 0, 3, 1, 0, 1, 4)])
    f = pencil_quartic(W)
    A, B = W.basis
    for x, y in itertools.product(range(5), repeat=2):
        v = SymPoint(F, tuple(F.add(F.mul(x, a), F.mul(y, b)) for a, b in zip(A, B)))
        val = 0
        for i, c in enumerate(f):
            val = F.add(val, F.mul(c, F.mul(F.pow(x, 4 - i), F.pow(y, i))))
        assert det4(F, point_to_matrix(v)) == val


def test_quartic_class_invariant_under_substitution():
    F = make_field(7)
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = tuple(int(c) for c in rng.integers(0, 7, 5))
        if not any(f):
            continue
        a, b, c, d = 1, 2, 3, 5  # det = 5 - 6 = -1 != 0
        # f(ax + by, cx + dy) times the square 4
        x, y = [a, b], [c, d]
        g = [0] * 5
        for i, ci in enumerate(f):
            term = [1]
            for _ in range(4 - i):
                term = _mul(F, term, x)
            for _ in range(i):
                term = _mul(F, term, y)
            g = [F.add(s, F.mul(ci, t)) for s, t in zip(g, term)]
        g = tuple(F.mul(4, t) for t in g)
        assert quartic_class(F, g) == quartic_class(F, f)


def _mul(F, p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, u in enumerate(p):
        for j, v in enumerate(q):
            out[i + j] = F.add(out[i + j], F.mul(u, v))
    return out


@pytest.mark.parametrize("q", [2, 3])
def test_line_oracle_agrees_with_keys(q):
    res = classification(q)
    F = make_field(q)
    rng = np.random.default_rng(q)
    reps = [n.rep for n in res.levels[1]]
    moved = [act_subspace(random_element(F, rng), L) for L in reps]
    for i, j in itertools.product(range(len(reps)), repeat=2):
        X = lines_equivalent(reps[i], moved[j])
        assert (X is not None) == (i == j)
        if X is not None:
            assert act_subspace(X, reps[i]) == moved[j]


def test_line_oracle_agrees_with_brute_force_q2():
    res = classification(2)
    reps = [n.rep for n in res.levels[1]]
    for L1, L2 in itertools.combinations(reps, 2):
        assert lines_equivalent(L1, L2) is None and brute_force_equivalent(L1, L2) is None


@pytest.mark.slow
def test_line_oracle_agrees_with_keys_q4():
    test_line_oracle_agrees_with_keys(4)


def test_line_oracle_rejects_bad_input():
    F = make_field(3)
    P = span(F, [(1, 0, 0, 0, 1, 0, 0, 1, 0, 1)])
    with pytest.raises(ValueError):
        lines_equivalent(P, P)


def test_verify_q8_lines_certified():
    rep = builtin_report("q8_lines")
    assert rep.passed == 17 and rep.all_pass
    assert rep.certification == "invariants+line-search"
    assert rep.certified_inequivalent and rep.distinct_pairs == 136


def test_verify_q9_lines_certified():
    rep = builtin_report("q9_lines")
    assert rep.passed == 22 and rep.all_pass
    assert rep.certified_inequivalent and rep.distinct_pairs == 231


def test_verify_q9_printed_list_flags_erratum():
    rep = builtin_report("q9_lines_printed")
    assert rep.passed == 21 and [it.index for it in rep.items if not it.semifield] == [12]
    assert rep.equivalent_pairs == [(1, 16)]
    assert not rep.all_pass and not rep.certified_inequivalent


def test_verify_invariants_only_states_uncertified():
    rep = verify_representatives(builtin("q8_lines"), line_search=False)
    assert rep.certification == "invariants"
    assert rep.uncertified_pairs and "not certified" in rep.statement()
    assert rep.invariant_collisions == len(rep.uncertified_pairs)


def test_verify_brute_force_level_q2():
    reps = [n.rep for n in classification(2).levels[1]]
    rep = verify_subspaces(2, reps)
    assert rep.certification == "brute-force" and rep.certified_inequivalent
    F = make_field(2)
    dup = reps + [act_subspace(random_element(F, np.random.default_rng(1)), reps[2])]
    rep = verify_subspaces(2, dup)
    assert rep.equivalent_pairs == [(3, 6)]


@pytest.mark.parametrize("q", [3, pytest.param(5, marks=pytest.mark.slow)])
def test_plane_fixture_certified_by_keys(q):
    res = classification(q)
    fl = fixture_from_subspaces(q, [n.rep for n in res.levels[2]])
    rep = verify_representatives(fl, res)
    assert rep.certification == "classification-keys"
    assert rep.all_pass and rep.certified_inequivalent
    assert rep.passed == len(fl.items) == res.counts[2]
