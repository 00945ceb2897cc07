"""Isomorphism, automorphisms, rigidity, groups and actions on the oracle."""

import pytest

from framewise import (
    InvalidAction,
    LazyLimit,
    NotFree,
    PartialAction,
    Seed,
    audit_action,
    automorphism_group,
    complex_on,
    cyclic_embedding,
    cyclic_group,
    direct_limit_action,
    empty_action,
    extend_action,
    induce_action,
    is_rigid,
    isomorphic,
    rigidity_experiment,
    simplicial_class,
    swap_pair_action,
    symmetric_embedding,
    symmetric_group,
    trivial_embedding,
    trivial_group,
    members_on,
)
from framewise.symmetry import FiniteGroup, GroupEmbedding

from oracles import brute_automorphisms, brute_isomorphism_exists

SC = simplicial_class()

FILLED = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2], [0, 1, 2]])
PATH = complex_on([0, 1, 2], [[0, 1], [1, 2]])


def test_isomorphic_examples():
    assert isomorphic(FILLED, FILLED) is not None
    relabeled = complex_on([3, 5, 9], [[3, 5], [5, 9]])
    iso = isomorphic(PATH, relabeled)
    assert iso is not None and iso[1] == 5
    boundary = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2]])
    assert isomorphic(boundary, PATH) is None


def test_isomorphic_against_brute():
    pool = list(members_on(range(3), SC)) + list(members_on(range(4), SC))[:40]
    for A in pool:
        for B in pool:
            got = isomorphic(A, B)
            want = brute_isomorphism_exists(A, B)
            assert (got is not None) == want
            if got is not None:
                # the returned map is a genuine isomorphism
                assert {frozenset(got[v] for v in f) for f in A.faces} == set(B.faces)


def test_isomorphic_is_an_equivalence_on_corpus():
    pool = list(members_on(range(3), SC))
    for A in pool:
        assert isomorphic(A, A) is not None
        for B in pool:
            assert (isomorphic(A, B) is None) == (isomorphic(B, A) is None)


def test_automorphism_group_examples():
    order, gens = automorphism_group(complex_on(range(4), []))
    assert order == 24
    order, gens = automorphism_group(PATH)
    assert order == 2
    order, gens = automorphism_group(FILLED)
    assert order == 6
    assert len(gens) <= 2


def test_automorphism_group_against_brute():
    for S in members_on(range(4), SC):
        order, gens = automorphism_group(S)
        assert order == len(brute_automorphisms(S))
        for g in gens:
            mapping = dict(zip(S.universe, g))
            assert {frozenset(mapping[v] for v in f) for f in S.faces} == set(S.faces)


def test_generators_generate():
    from framewise.symmetry import _closure

    for S in (FILLED, PATH, complex_on(range(4), []), complex_on(range(5), [[0, 1]])):
        order, gens = automorphism_group(S)
        index = {v: i for i, v in enumerate(S.universe)}
        identity = tuple(S.universe)
        assert len(_closure(gens, identity, index, S.universe)) == order


def test_is_rigid():
    assert is_rigid(complex_on([0], []))
    assert not is_rigid(complex_on([0, 1], []))
    assert not is_rigid(complex_on([0, 1], [[0, 1]]))
    assert not is_rigid(PATH)
    rigid5 = complex_on(range(5), [[0, 4], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4], [2, 3, 4]])
    order, _ = automorphism_group(rigid5)
    assert order == 1 and is_rigid(rigid5)
    # a symmetric graph whose only symmetry is broken by a higher face
    broken = complex_on(range(5), [[0, 4], [1, 2], [1, 4], [2, 3], [2, 4], [3, 4], [2, 3, 4]])
    assert is_rigid(broken) == (automorphism_group(broken)[0] == 1)
    assert not is_rigid(FILLED)


def test_rigid_iff_trivial_group_small():
    for S in members_on(range(4), SC):
        order, _ = automorphism_group(S)
        assert is_rigid(S) == (order == 1)


def test_rigidity_experiment_rows():
    res = rigidity_experiment([1, 2], 150, Seed(88))
    assert res.rows[0].estimate == 1.0
    assert res.rows[1].estimate == 0.0
    assert res.limit == 1


def test_group_constructors_and_validation():
    z4 = cyclic_group(4)
    assert z4.order == 4 and z4.mul(3, 2) == 1 and z4.inv(1) == 3
    s3 = symmetric_group(3)
    assert s3.order == 6
    assert trivial_group().order == 1
    with pytest.raises(ValueError):
        FiniteGroup(((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        FiniteGroup(((1, 0), (0, 1)))


def test_group_embeddings():
    emb = cyclic_embedding(2, 4)
    assert emb.mapping == (0, 2)
    emb = symmetric_embedding(2, 3)
    assert emb.sub.order == 2 and emb.group.order == 6
    with pytest.raises(ValueError):
        cyclic_embedding(3, 4)
    with pytest.raises(ValueError):
        GroupEmbedding(cyclic_group(2), cyclic_group(4), (0, 1))


def _adjacent_pair(L):
    v = 1
    while not L.is_face((0, v)):
        v += 1
    return (0, v)


def test_extend_trivial_group_adds_one_vertex():
    L = LazyLimit(SC, Seed(70))
    base = PartialAction(trivial_group(), (0,), {(0, 0): 0})
    L.restriction([0])
    act = extend_action(L, base, 1)
    assert act.domain == (0, 1)


def test_extend_swap_action():
    L = LazyLimit(SC, Seed(71))
    pair = _adjacent_pair(L)
    act = swap_pair_action(cyclic_group(2), 1, pair)
    out = extend_action(L, act, max(pair) + 1)
    assert len(out.domain) == len(pair) + 2
    audit = audit_action(L, out, base=act)
    assert audit.ok and audit.free_off_base_ok
    # every decided face inside the domain has an equal-status mirror
    assert audit.memo_equivariant_ok


def test_extend_z4_double_transposition():
    # the generator acts on a pair by the transposition; the extension
    # realises genuine order-4 behaviour off the pair
    L = LazyLimit(SC, Seed(72))
    pair = _adjacent_pair(L)
    z4 = cyclic_group(4)
    act = swap_pair_action(z4, 1, pair)
    out = extend_action(L, act, max(pair) + 1)
    assert len(out.domain) == 6
    audit = audit_action(L, out, base=act)
    assert audit.ok
    orbit = [v for v in out.domain if v not in pair]
    for v in orbit:
        assert out.stabilizer(v) == [0]
    v0 = orbit[0]
    cycle = {out.apply(g, v0) for g in range(4)}
    assert len(cycle) == 4


def test_extend_s3_orbit():
    L = LazyLimit(SC, Seed(73))
    out = extend_action(L, empty_action(symmetric_group(3)), 0)
    assert len(out.domain) == 6
    assert out.is_free()
    assert audit_action(L, out, base=empty_action(symmetric_group(3))).ok


def test_extend_rejects_bad_inputs():
    L = LazyLimit(SC, Seed(74))
    base = PartialAction(trivial_group(), (0,), {(0, 0): 0})
    L.restriction([0])
    with pytest.raises(InvalidAction):
        extend_action(L, base, 0)
    # an action that does not respect decided faces is rejected
    L2 = LazyLimit(SC, Seed(75))
    tri = None
    for v in range(1, 30):
        for w in range(v + 1, 30):
            window = L2.restriction([0, v, w])
            degs = sorted(len([f for f in window.faces if u in f]) for u in (0, v, w))
            if degs[0] != degs[2]:
                tri = (0, v, w)
                break
        if tri:
            break
    z3 = cyclic_group(3)
    mapping = {}
    for g in range(3):
        for i, u in enumerate(tri):
            mapping[(g, u)] = tri[(i + g) % 3]
    rotate = PartialAction(z3, tuple(sorted(tri)), mapping)
    with pytest.raises(InvalidAction):
        extend_action(L2, rotate, max(tri) + 1)


def test_induce_same_group_is_identity():
    L = LazyLimit(SC, Seed(76))
    pair = _adjacent_pair(L)
    z2 = cyclic_group(2)
    act = swap_pair_action(z2, 1, pair)
    out = induce_action(z2, GroupEmbedding(z2, z2, (0, 1)), act, L)
    assert out.domain == tuple(sorted(pair))
    assert all(out.apply(g, v) == act.apply(g, v) for g in range(2) for v in pair)


def test_induce_from_trivial():
    L = LazyLimit(SC, Seed(77))
    base = PartialAction(trivial_group(), (0,), {(0, 0): 0})
    L.restriction([0])
    out = induce_action(cyclic_group(2), trivial_embedding(cyclic_group(2)), base, L)
    assert len(out.domain) == 2
    assert out.is_free()
    v, w = out.domain
    assert out.apply(1, v) == w and out.apply(1, w) == v


def test_induce_z2_to_z4():
    L = LazyLimit(SC, Seed(78))
    pair = _adjacent_pair(L)
    act = swap_pair_action(cyclic_group(2), 1, pair)
    emb = cyclic_embedding(2, 4)
    out = induce_action(emb.group, emb, act, L)
    assert len(out.domain) == 4
    assert out.is_free()
    audit = audit_action(L, out, base=act, base_embedding=emb)
    assert audit.ok and audit.restriction_ok and audit.free_ok


def test_induce_requires_freeness():
    L = LazyLimit(SC, Seed(79))
    L.restriction([0])
    stuck = PartialAction(cyclic_group(2), (0,), {(0, 0): 0, (1, 0): 0})
    with pytest.raises(NotFree):
        induce_action(cyclic_group(4), cyclic_embedding(2, 4), stuck, L)


def test_direct_limit_trivial_chain():
    L = LazyLimit(SC, Seed(80))
    chain = [trivial_embedding(trivial_group())] * 3
    stages = direct_limit_action(chain, 3, L)
    assert [len(s.domain) for s in stages] == [2, 3, 4]


def test_direct_limit_z2_z4():
    L = LazyLimit(SC, Seed(81))
    chain = [trivial_embedding(cyclic_group(2)), cyclic_embedding(2, 4)]
    stages = direct_limit_action(chain, 2, L)
    assert stages[0].group.order == 2 and stages[1].group.order == 4
    assert all(s.is_free() for s in stages)
    # each stage restricts to the previous one through the chain embedding
    prev, cur = stages
    emb = chain[1]
    for h in range(prev.group.order):
        for v in prev.domain:
            assert cur.apply(emb.mapping[h], v) == prev.apply(h, v)
    audit = audit_action(L, cur, base=prev, base_embedding=emb)
    assert audit.ok


def test_direct_limit_symmetric_groups():
    L = LazyLimit(SC, Seed(82))
    chain = [trivial_embedding(symmetric_group(1)), symmetric_embedding(1, 2), symmetric_embedding(2, 3)]
    stages = direct_limit_action(chain, 3, L)
    assert [s.group.order for s in stages] == [1, 2, 6]
    assert all(s.is_free() for s in stages)
    assert audit_action(L, stages[-1], base=stages[-2], base_embedding=chain[2]).ok
