import itertools

import numpy as np
import pytest

from symsemi.geom import (
    SymPoint, index_point, is_semifield_subspace, num_points, point_to_matrix, rank_of, rows_to_indices,
    span, veronese,
)
from symsemi.gf import make_field
from symsemi.group import (
    GeneratingSet, GroupElement, MemoryBudgetExceeded, OracleBoundExceeded, SingularMatrix, act_point,
    act_subspace, all_group_elements, brute_force_equivalent, closure_order, lift, lift_batch,
    load_orbit_table, mat_mul, orbits_on_subspaces, pgl4_generators, pgl4_order, point_orbits,
    random_element, save_orbit_table, stabilizer, trace_to_rep, transpose,
)
from symsemi.semifield import field_algebra, symmetric_spread_solid

P1 = (1, 0, 0, 0, 1, 0, 0, 1, 0, 1)


@pytest.fixture(scope="module")
def tables():
    return {q: point_orbits(pgl4_generators(make_field(q))) for q in (2, 3)}


def congruence_point(F, X, p):
    A = point_to_matrix(p)
    B = mat_mul(F, mat_mul(F, X, A), transpose(X))
    return SymPoint.of(F, [B[i][j] for i in range(4) for j in range(i, 4)])


def test_pgl4_order_formula():
    assert pgl4_order(2) == 20160
    assert pgl4_order(3) == 12130560


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_generators_generate_pgl4(q):
    G = pgl4_generators(make_field(q))
    assert G.order() == pgl4_order(q)
    assert G.contains(GroupElement.identity(make_field(q)))


def test_closure_order_q2():
    assert closure_order(pgl4_generators(make_field(2))) == 20160


def test_lift_examples():
    F = make_field(5)
    I = GroupElement.identity(F)
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = index_point(F, int(rng.integers(0, num_points(5))))
        assert act_point(I, p) == p
    c = 2
    g = lift(F, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, c]])
    v = g.act_vector(P1)
    assert v[:9] == list(P1[:9]) and v[9] == F.mul(c, c)
    with pytest.raises(SingularMatrix):
        lift(F, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_lift_matches_congruence(q):
    F = make_field(q)
    rng = np.random.default_rng(q)
    for _ in range(200):
        g = random_element(F, rng)
        p = index_point(F, int(rng.integers(0, num_points(q))))
        assert act_point(g, p) == congruence_point(F, g.mat, p)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_lift_homomorphism_random_pairs(q):
    """1000 random pairs: lift(XY) acts as lift(X) lift(Y), and the 10x10 lifts agree up to scalar."""
    F = make_field(q)
    rng = np.random.default_rng(100 + q)
    for _ in range(1000):
        g, h = random_element(F, rng), random_element(F, rng)
        gh = g * h
        prod = F.matmul(g.lift10, h.lift10)
        L = gh.lift10
        nz = np.nonzero(L.reshape(-1))[0][0]
        s = F.div(int(prod.reshape(-1)[nz]), int(L.reshape(-1)[nz]))
        assert np.array_equal(prod, F.vmul(L, np.uint8(s)))
    p = index_point(F, 7)
    assert act_point(gh, p) == act_point(g, act_point(h, p))


def test_batched_lift_agrees():
    F = make_field(4)
    rng = np.random.default_rng(4)
    gs = [random_element(F, rng) for _ in range(20)]
    L = lift_batch(F, np.array([g.mat for g in gs], dtype=np.uint8))
    for g, l in zip(gs, L):
        assert np.array_equal(g.lift10, l)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_rank_invariance(q):
    F = make_field(q)
    rng = np.random.default_rng(200 + q)
    n = 1000 if q == 4 else 300
    for _ in range(n):
        g = random_element(F, rng)
        p = index_point(F, int(rng.integers(0, num_points(q))))
        assert rank_of(act_point(g, p)) == rank_of(p)


@pytest.mark.parametrize("q", [2, 3])
def test_veronese_equivariance_exhaustive(q):
    F = make_field(q)
    G = pgl4_generators(F)
    rng = np.random.default_rng(q)
    elems = list(G.gens) + [random_element(F, rng) for _ in range(5)]
    for s in itertools.product(range(q), repeat=4):
        if not any(s):
            continue
        for g in elems:
            Xs = [sum(F.mul(g.mat[i][j], s[j]) for j in range(4)) % q if F.is_prime else
                  _dot(F, g.mat[i], s) for i in range(4)]
            assert act_point(g, veronese(F, s)) == veronese(F, Xs)


def _dot(F, row, s):
    acc = 0
    for a, b in zip(row, s):
        acc = F.add(acc, F.mul(a, b))
    return acc


def test_action_preserves_semifield_property_q2():
    F = make_field(2)
    rng = np.random.default_rng(2)
    solid = symmetric_spread_solid(field_algebra(F))
    for W in [solid] + solid.hyperplanes()[:5] + [span(F, [P1, veronese(F, (1, 0, 0, 0)).coords])]:
        for _ in range(20):
            assert is_semifield_subspace(act_subspace(random_element(F, rng), W)) == is_semifield_subspace(W)


def test_point_orbits_q2_shape(tables):
    T = tables[2]
    assert len(T.reps) == 6
    F = make_field(2)
    rank1 = {veronese(F, s).index for s in itertools.product(range(2), repeat=4) if any(s)}
    assert len({int(T.rep_of[i]) for i in rank1}) == 1 and len(rank1) == 15
    ranks4 = [int(r) for r in T.reps if rank_of(index_point(F, int(r))) == 4]
    assert sorted(T.orbit_size(r) for r in ranks4) == [28, 420]
    assert sorted(T.sizes.tolist()) == [15, 28, 35, 105, 420, 420]
    assert int(T.sizes.sum()) == 1023


def test_point_orbits_q2_against_brute_force(tables):
    """Every orbit equals the image set of its representative under all 20160 elements."""
    T = tables[2]
    F = make_field(2)
    lifts = lift_batch(F, all_group_elements(2))
    for r in T.reps:
        v = index_point(F, int(r)).coords
        imgs = F.matmul(np.array(v, dtype=np.uint8)[None, None, :], np.transpose(lifts, (0, 2, 1)))[:, 0]
        orbit = set(rows_to_indices(F, imgs).tolist())
        assert orbit == set(np.nonzero(T.rep_of == r)[0].tolist())
        assert min(orbit) == int(r)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_two_rank4_orbits(q):
    T = point_orbits(pgl4_generators(make_field(q)))
    F = make_field(q)
    ranks = [rank_of(index_point(F, int(r))) for r in T.reps]
    assert sorted(ranks) == [1, 2, 2, 3, 4, 4]


def test_trace_to_rep_replay_q3(tables):
    T = tables[3]
    F = make_field(3)
    rng = np.random.default_rng(3)
    for i in rng.integers(0, num_points(3), 10_000):
        p = index_point(F, int(i))
        rep, g = trace_to_rep(T, p)
        assert act_point(g, p) == rep
        assert rep.index == T.rep_of[i]


def test_dense_and_chain_witnesses_agree():
    F = make_field(3)
    G = pgl4_generators(F)
    dense = point_orbits(G, dense_witness=True)
    chain = point_orbits(G, dense_witness=False)
    assert chain.witness is None and dense.witness is not None
    assert np.array_equal(dense.rep_of, chain.rep_of)
    rng = np.random.default_rng(0)
    for i in rng.integers(0, num_points(3), 300):
        assert dense.witness_of(int(i)) == chain.witness_of(int(i))


def test_witness_composition(tables):
    T = tables[3]
    F = make_field(3)
    orbit = np.nonzero(T.rep_of == T.reps[-1])[0]
    a, b = index_point(F, int(orbit[3])), index_point(F, int(orbit[-5]))
    g = trace_to_rep(T, b)[1].inverse() * trace_to_rep(T, a)[1]
    assert act_point(g, a) == b


@pytest.mark.parametrize("q", [2, 3])
def test_orbit_stabilizer_points(tables, q):
    T = tables[q]
    F = make_field(q)
    for r in T.reps:
        rep = index_point(F, int(r))
        S = stabilizer(T, rep, rng=np.random.default_rng(int(r)))
        assert S.order() * T.orbit_size(int(r)) == pgl4_order(q)
        assert all(act_point(g, rep) == rep for g in S.gens)
    if q == 2:
        S = stabilizer(T, index_point(F, int(T.rep_of[SymPoint(F, P1).index])))
        assert closure_order(S) == S.order()


def test_veronese_point_stabilizer_order(tables):
    T = tables[3]
    F = make_field(3)
    v = index_point(F, int(T.rep_of[veronese(F, (1, 0, 0, 0)).index]))
    S = stabilizer(T, v)
    # stabilizer of a point of PG(3,3) in PGL(4,3): |PGL(4,3)| / 40
    assert S.order() == pgl4_order(3) // 40


def test_memory_budget():
    with pytest.raises(MemoryBudgetExceeded, match="bytes"):
        point_orbits(pgl4_generators(make_field(3)), memory_budget=1000)


def test_orbit_table_roundtrip(tmp_path, tables):
    T = tables[3]
    path = tmp_path / "q3.orb"
    save_orbit_table(T, path)
    U = load_orbit_table(path)
    assert np.array_equal(T.rep_of, U.rep_of)
    assert np.array_equal(T.schreier, U.schreier)
    assert path.read_bytes()[:8] == b"SYMORB\x00\x01"
    rng = np.random.default_rng(1)
    F = make_field(3)
    for i in rng.integers(0, num_points(3), 100):
        p = index_point(F, int(i))
        assert act_point(U.witness_of(int(i)), p).index == T.rep_of[i]


def test_orbits_on_subspaces_partition():
    F = make_field(2)
    G = pgl4_generators(F)
    solid = symmetric_spread_solid(field_algebra(F))
    cands = set()
    for g in all_group_elements(2)[::50]:
        cands.add(act_subspace(GroupElement(F, g.tolist()), solid))
    # close the candidate set under the generators
    frontier = list(cands)
    while frontier:
        nxt = []
        for W in frontier:
            for g in G:
                V = act_subspace(g, W)
                if V not in cands:
                    cands.add(V)
                    nxt.append(V)
        frontier = nxt
    orbs = orbits_on_subspaces(G, cands, check_closed=True)
    assert sum(o.size for o in orbs) == len(cands)
    assert len(orbs) == 1
    o = orbs[0]
    for W in list(cands)[:10]:
        assert act_subspace(o.witness(W), W) == o.rep
    fixed = orbits_on_subspaces(GeneratingSet(F), [solid])
    assert len(fixed) == 1 and fixed[0].size == 1


def test_brute_force_oracle_examples():
    F = make_field(2)
    rng = np.random.default_rng(9)
    solid = symmetric_spread_solid(field_algebra(F))
    L = solid.hyperplanes()[0].hyperplanes()[0]
    g = brute_force_equivalent(L, L)
    assert g is not None and act_subspace(g, L) == L
    h = random_element(F, rng)
    w = brute_force_equivalent(L, act_subspace(h, L))
    assert w is not None and act_subspace(w, L) == act_subspace(h, L)
    assert brute_force_equivalent(solid, L) is None
    with pytest.raises(OracleBoundExceeded):
        brute_force_equivalent(span(make_field(4), [P1]), span(make_field(4), [P1]), bound=10 ** 6)
