"""Exact measures, extension counts, and the frame-extension families."""

from fractions import Fraction
from itertools import combinations

import pytest

from framewise import (
    BaseSet,
    SizeLimit,
    complex_on,
    count_frame_extensions,
    enumerate_frame_extensions,
    exact_distribution,
    face_probability,
    family_on,
    hypergraph_class,
    induced_substructure,
    k_frame,
    members_on,
    mu_base,
    simplicial_class,
    singleton_measure,
    sperner_class,
)
from framewise.core import (
    Atom,
    LocalSentence,
    Not,
    RelationSymbol,
    Signature,
    Structure,
    custom_class,
    empty_structure,
)

from oracles import brute_count_extensions, brute_members, brute_singleton_measure

SC = simplicial_class()
HG = hypergraph_class()
SP = sperner_class()

FILLED = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2], [0, 1, 2]])
BOUNDARY = complex_on([0, 1, 2], [[0, 1], [0, 2], [1, 2]])
EDGE = complex_on([0, 1], [[0, 1]])


def test_count_examples():
    assert count_frame_extensions(BOUNDARY, 2, SC) == 2
    two_edges = complex_on([0, 1, 2], [[0, 1], [1, 2]])
    assert count_frame_extensions(two_edges, 2, SC) == 1
    assert count_frame_extensions(FILLED, 0, SC) == 1
    assert count_frame_extensions(EDGE, 1, SC) == 2


def test_mu_examples():
    assert mu_base(BaseSet(FILLED, 0), SC) == 1
    assert mu_base(BaseSet(FILLED, 3), SC) == Fraction(1, 16)
    assert mu_base(BaseSet(EDGE, 2), SC) == Fraction(1, 2)
    # level above the anchor size stabilises
    assert mu_base(BaseSet(EDGE, 9), SC) == Fraction(1, 2)


def test_mu_ambient_independent():
    for ambient in (3, 5, 17, None):
        assert mu_base(BaseSet(FILLED, 3, ambient), SC) == Fraction(1, 16)
    with pytest.raises(ValueError):
        BaseSet(FILLED, 3, 2)


def test_counts_against_brute():
    for kind, spec in (("simplicial", SC), ("hypergraph", HG), ("sperner", SP)):
        for n in range(1, 4):
            for S in brute_members(range(n), kind):
                for k in range(n):
                    assert count_frame_extensions(S, k, spec) == brute_count_extensions(S, k, kind)


def test_measures_against_brute():
    for kind, spec in (("simplicial", SC), ("hypergraph", HG), ("sperner", SP)):
        for n in range(4):
            for S in brute_members(range(n), kind):
                assert singleton_measure(S, spec) == brute_singleton_measure(S, kind)


def test_enumeration_matches_brute():
    for kind, spec in (("simplicial", SC), ("hypergraph", HG), ("sperner", SP)):
        for n in range(4):
            ours = set(members_on(range(n), spec))
            brute = set(brute_members(range(n), kind))
            assert ours == brute


def test_distribution_sums_to_one():
    for spec, n in ((SC, 4), (HG, 3), (SP, 4)):
        dist = exact_distribution(n, spec)
        assert sum(m for _, m in dist) == 1
        assert all(0 < m <= 1 for _, m in dist)


def test_distribution_examples():
    two = exact_distribution(2, SC)
    assert len(two) == 2 and all(m == Fraction(1, 2) for _, m in two)
    zero = exact_distribution(0, SC)
    assert len(zero) == 1 and zero[0][1] == 1
    three = exact_distribution(3, SC)
    assert len(three) == 9
    assert sum(m for _, m in three) == 1
    lookup = dict(three)
    assert lookup[FILLED] == Fraction(1, 16)


def test_member_counts_frozen():
    assert sum(1 for _ in members_on(range(4), SC)) == 114
    assert sum(1 for _ in members_on(range(5), SC)) == 6894
    assert sum(1 for _ in members_on(range(4), HG)) == 2 ** 15
    assert sum(1 for _ in members_on(range(4), SP)) == 167


def test_product_rule_small():
    for spec in (SC, SP):
        for n in range(1, 5):
            for S in members_on(range(n), spec, cap=4):
                for k in range(n):
                    lhs = count_frame_extensions(S, k, spec, check=False)
                    rhs = 1
                    for X in combinations(S.universe, k + 1):
                        rhs *= count_frame_extensions(induced_substructure(S, X), k, spec, check=False)
                    assert lhs == rhs


def test_uniformity_small():
    # family sizes factor through the anchor's own extension count
    for spec in (SC, SP):
        for n in range(1, 5):
            for S in members_on(range(n), spec, cap=4):
                for size in range(1, n + 1):
                    for sub in combinations(S.universe, size):
                        A = induced_substructure(S, sub)
                        for k in range(1, size + 1):
                            big = enumerate_frame_extensions(S.universe, k, S, k - 1, spec)
                            anchored = enumerate_frame_extensions(S.universe, k, A, k, spec)
                            inter = big.keys() & anchored.keys()
                            assert len(big) == count_frame_extensions(A, k - 1, spec, check=False) * len(inter)


def test_additivity():
    # the measure of a base set is the sum over its refinements on a larger set
    cases = [
        (EDGE, 2, (0, 1, 2)),
        (EDGE, 1, (0, 1, 2, 3)),
        (FILLED, 3, (0, 1, 2, 3)),
        (complex_on([1], []), 1, (0, 1, 2)),
    ]
    for A, k, X in cases:
        total = sum(mu_base(BaseSet(S, k), SC, check=False)
                    for S in enumerate_frame_extensions(X, k, A, k, SC))
        assert total == mu_base(BaseSet(A, k), SC)


def test_enumerate_frame_extensions_examples():
    fam = enumerate_frame_extensions((0, 1), 2, empty_structure([0, 1]), 1, SC)
    assert len(fam) == 2

    fam = enumerate_frame_extensions((0, 1), 2, EDGE, 2, SC)
    assert fam.keys() == frozenset({EDGE})

    fam = enumerate_frame_extensions((0, 1, 2), 2, EDGE, 2, SC)
    assert len(fam) == 4
    assert all(frozenset((0, 1)) in S.faces for S in fam)


def test_enumerate_frame_extensions_preconditions():
    with pytest.raises(ValueError):
        enumerate_frame_extensions((0, 1), 1, complex_on([0, 2], []), 1, SC)
    with pytest.raises(SizeLimit):
        enumerate_frame_extensions(tuple(range(9)), 2, EDGE, 1, SC)
    with pytest.raises(SizeLimit):
        exact_distribution(8, SC)


def test_face_probability():
    assert face_probability((0, 1), SC) == Fraction(1, 2)
    assert face_probability((0, 1, 2), SC) == Fraction(1, 16)
    assert face_probability((0, 1), HG) == Fraction(1, 2)
    assert face_probability((0,), HG) == Fraction(1, 2)
    assert face_probability((0, 1, 2), SP) == Fraction(1, 128)


def _oriented_graphs():
    sig = Signature([RelationSymbol("E", 2, symmetric=False)])
    return custom_class(sig, [LocalSentence(Atom("E", (0, 1)), Not(Atom("E", (1, 0))), name="antisym")])


def test_custom_class_measures():
    spec = _oriented_graphs()
    empty2 = empty_structure([0, 1])
    assert count_frame_extensions(empty2, 1, spec) == 3
    assert singleton_measure(empty2, spec) == Fraction(1, 3)
    dist = exact_distribution(3, spec)
    assert len(dist) == 27
    assert sum(m for _, m in dist) == 1
    one_arc = Structure.make([0, 1], {"E": [(0, 1)]})
    assert singleton_measure(one_arc, spec) == Fraction(1, 3)
