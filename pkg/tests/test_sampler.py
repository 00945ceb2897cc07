"""Seed determinism, sample distribution, the lazy oracle, witness search."""

import math
from collections import Counter
from fractions import Fraction

import pytest

from framewise import (
    LazyLimit,
    Seed,
    WitnessNotFound,
    complex_on,
    empty_structure,
    exact_distribution,
    find_witness,
    hypergraph_class,
    oracle_is_face,
    sample_finite,
    simplicial_class,
    sperner_class,
    validate,
)
from framewise.sampler import extension_probability, realise_pattern

SC = simplicial_class()
HG = hypergraph_class()
SP = sperner_class()

FILLED = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2], [0, 1, 2]])


def test_seed_is_replayable():
    a = Seed(123, ("x", 1))
    b = Seed(123, ("x", 1))
    assert [a.bit("face", (0, i)) for i in range(1, 50)] == [b.bit("face", (0, i)) for i in range(1, 50)]
    assert a.child("y").bit("k") == Seed(123, ("x", 1, "y")).bit("k")
    assert Seed(124, ("x", 1)).path == ("x", 1)


def test_seed_bits_are_balanced():
    seed = Seed(7)
    bits = [seed.bit("face", (0, i)) for i in range(4000)]
    frac = sum(bits) / len(bits)
    assert abs(frac - 0.5) < 4 * math.sqrt(0.25 / 4000)


def test_randrange_uniform():
    seed = Seed(8)
    counts = Counter(seed.randrange(3, "pick", i) for i in range(9000))
    for v in range(3):
        assert abs(counts[v] / 9000 - 1 / 3) < 4 * math.sqrt((1 / 3) * (2 / 3) / 9000)


def test_sample_finite_edges():
    assert sample_finite(0, SC, Seed(1)) == empty_structure()
    for t in range(50):
        S = sample_finite(5, SC, Seed(1).child("t", t))
        assert validate(S, SC) == []


def test_sample_distribution_matches_exact():
    trials = 100000
    seed = Seed(20240809)
    counts = Counter(sample_finite(4, SC, seed.child("trial", t)) for t in range(trials))
    for S, mu in exact_distribution(4, SC):
        sigma = math.sqrt(float(mu) * (1 - float(mu)) / trials)
        assert abs(counts[S] / trials - float(mu)) <= 4 * sigma + 1e-12, S


def test_sample_distribution_other_kinds():
    trials = 20000
    for spec, n in ((HG, 2), (SP, 2)):
        seed = Seed(5150)
        counts = Counter(sample_finite(n, spec, seed.child("trial", t)) for t in range(trials))
        for S, mu in exact_distribution(n, spec):
            sigma = math.sqrt(float(mu) * (1 - float(mu)) / trials)
            assert abs(counts[S] / trials - float(mu)) <= 4 * sigma + 1e-12


def test_oracle_memoised_and_deterministic():
    L = LazyLimit(SC, Seed(3))
    assert oracle_is_face(L, (0, 1)) == oracle_is_face(L, (0, 1))
    # query order does not matter for disjoint faces
    L1 = LazyLimit(SC, Seed(4))
    a1 = [L1.is_face((0, 1)), L1.is_face((2, 3)), L1.is_face((4, 5, 6))]
    L2 = LazyLimit(SC, Seed(4))
    a2 = [L2.is_face((4, 5, 6)), L2.is_face((2, 3)), L2.is_face((0, 1))]
    assert a1 == list(reversed(a2))


def test_oracle_subset_closure_forced():
    for root in range(40):
        L = LazyLimit(SC, Seed(root))
        if not L.is_face((0, 1)):
            assert not L.is_face((0, 1, 2))
    # closure holds on the whole memo after arbitrary queries
    L = LazyLimit(SC, Seed(99))
    for f in [(0, 1, 2), (1, 2, 3), (0, 1, 2, 3), (4, 5)]:
        L.is_face(f)
    for f, val in L.memo.items():
        if val and len(f) >= 3:
            assert all(L.memo[f - {v}] for v in f)


def test_oracle_triangle_frequency():
    hits = sum(LazyLimit(SC, Seed(r)).is_face((0, 1, 2)) for r in range(1500))
    p = 1 / 16
    assert abs(hits / 1500 - p) <= 4 * math.sqrt(p * (1 - p) / 1500)


def test_oracle_conditional_independence():
    # P(face X | face Y) = P(face X) for disjoint X, Y
    with_y = both = 0
    for r in range(4000):
        L = LazyLimit(SC, Seed(r).child("ci"))
        y = L.is_face((2, 3))
        x = L.is_face((0, 1))
        with_y += y
        both += x and y
    cond = both / with_y
    assert abs(cond - 0.5) <= 4 * math.sqrt(0.25 / with_y)


def test_oracle_restriction_equals_finite_sample():
    for root in (5, 6, 7):
        L = LazyLimit(SC, Seed(root))
        assert L.restriction(range(5)) == sample_finite(5, SC, Seed(root))


def test_oracle_other_kinds():
    L = LazyLimit(SP, Seed(12))
    # a singleton face blocks all supersets
    for v in range(20):
        if L.is_face((v,)):
            assert not L.is_face((v, v + 1))
            break
    L = LazyLimit(HG, Seed(13))
    vals = [L.is_face((i,)) for i in range(30)]
    assert any(vals) and not all(vals)
    with pytest.raises(ValueError):
        LazyLimit(SC, Seed(1)).is_face((3,))


def test_find_witness_first_vertex():
    L = LazyLimit(SC, Seed(21))
    single = complex_on([0], [])
    assert find_witness(L, {}, single) == 0


def test_find_witness_filled_triangle():
    L = LazyLimit(SC, Seed(2))
    # embed the base edge as oracle vertices with an actual edge
    v = 1
    while not L.is_face((0, v)):
        v += 1
    emb = {0: 0, 1: v}
    w = find_witness(L, emb, FILLED)
    assert L.is_face((0, w)) and L.is_face((v, w)) and L.is_face((0, v, w))
    assert extension_probability(FILLED, SC) == Fraction(1, 8)


def test_find_witness_respects_negative_constraints():
    L = LazyLimit(SC, Seed(31))
    v = 1
    while not L.is_face((0, v)):
        v += 1
    boundary_only = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2]])
    w = find_witness(L, {0: 0, 1: v}, boundary_only)
    assert L.is_face((0, w)) and L.is_face((v, w)) and not L.is_face((0, v, w))


def test_witness_not_found_reports_bound():
    L = LazyLimit(SC, Seed(41))
    with pytest.raises(WitnessNotFound) as err:
        find_witness(L, {0: 0, 1: 1}, FILLED, cap=0)
    assert err.value.cap == 0
    assert err.value.p == Fraction(1, 8)
    assert err.value.bound == 1.0


def test_realise_pattern_round_trip():
    L = LazyLimit(SC, Seed(55))
    old = L.restriction(range(3))
    pattern_faces = set(old.faces) | {frozenset((v, 5)) for v in range(3)}
    pattern = complex_on([0, 1, 2, 5], pattern_faces)
    emb = realise_pattern(L, pattern, [0, 1, 2])
    w = emb[5]
    assert all(L.is_face((v, w)) for v in range(3))
