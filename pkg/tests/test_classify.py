import itertools

import pytest
from hypothesis import given, settings

import brute
from conftest import A, B, D, coxeter_matrices, disjoint
from coxgalaxy.classify import (
    Compatible,
    Incompatible,
    NotIrreducible,
    SphericalType,
    basic_subsets,
    expanded_label_filter,
    group_order,
    is_directly_decomposable_irreducible,
    is_spherical,
    matching_filter,
    spherical_type,
    type_multiset,
    types_match,
    visible_splittings,
)
from coxgalaxy.coxsys import INF, CoxeterMatrix, dihedral, irreducible_components, subsystem, triangle
from coxgalaxy.galaxy import starlet
from coxgalaxy.moves import all_moves

H3 = CoxeterMatrix.from_edges(3, {(0, 1): 5, (1, 2): 3})
H4 = CoxeterMatrix.from_edges(4, {(0, 1): 5, (1, 2): 3, (2, 3): 3})
F4 = CoxeterMatrix.from_edges(4, {(0, 1): 3, (1, 2): 4, (2, 3): 3})
E6 = CoxeterMatrix.from_edges(6, {(0, 1): 3, (1, 2): 3, (2, 3): 3, (3, 4): 3, (2, 5): 3})
E7 = CoxeterMatrix.from_edges(7, {(0, 1): 3, (1, 2): 3, (2, 3): 3, (3, 4): 3, (4, 5): 3, (2, 6): 3})
E8 = CoxeterMatrix.from_edges(8, {(0, 1): 3, (1, 2): 3, (2, 3): 3, (3, 4): 3, (4, 5): 3, (5, 6): 3, (2, 7): 3})


def full(m):
    return frozenset(range(m.rank))


class TestSphericalType:
    @pytest.mark.parametrize(
        "m, name, order",
        [
            (B(5), "B5", 3840),
            (dihedral(6), "I2(6)", 12),
            (dihedral(3), "A2", 6),
            (dihedral(4), "B2", 8),
            (A(4), "A4", 120),
            (D(5), "D5", 1920),
            (D(4), "D4", 192),
            (H3, "H3", 120),
            (H4, "H4", 14400),
            (F4, "F4", 1152),
            (E6, "E6", 51840),
            (E7, "E7", 2903040),
            (E8, "E8", 696729600),
            (CoxeterMatrix.from_rows([[1]]), "A1", 2),
        ],
    )
    def test_recognises_classical_shapes(self, m, name, order):
        t = spherical_type(m, full(m))
        assert t.name == name
        assert t.order == order

    @pytest.mark.parametrize(
        "m",
        [
            dihedral(INF),
            triangle(3, 3, 3),
            CoxeterMatrix.from_edges(3, {(0, 1): 5, (1, 2): 5}),
            CoxeterMatrix.from_edges(4, {(0, 1): 4, (1, 2): 3, (2, 3): 4}),
            CoxeterMatrix.from_edges(5, {(0, 1): 5, (1, 2): 3, (2, 3): 3, (3, 4): 3}),
        ],
    )
    def test_infinite(self, m):
        assert spherical_type(m, full(m)) is None

    def test_reducible_raises(self):
        m = triangle(2, 2, 2)
        with pytest.raises(NotIrreducible):
            spherical_type(m, full(m))

    def test_d3_is_a3(self):
        # the D-shape with 3 nodes is the path A3
        assert spherical_type(A(3), full(A(3))).name == "A3"

    def test_validation(self):
        with pytest.raises(ValueError):
            SphericalType("D", 3)
        with pytest.raises(ValueError):
            SphericalType("E", 9)

    # orders frozen from Todd-Coxeter runs in tests/brute.py
    @pytest.mark.parametrize(
        "m, order",
        [
            (A(3), 24),
            (B(3), 48),
            (H3, 120),
            (D(4), 192),
            (F4, 1152),
            (triangle(5, 2, 2), 20),
            (triangle(3, 2, 2), 12),
            (triangle(2, 2, 2), 8),
            (disjoint(dihedral(6), B(3)), 576),
        ],
    )
    def test_orders_frozen(self, m, order):
        assert group_order(m) == order

    @settings(max_examples=30)
    @given(coxeter_matrices(max_rank=4, labels=(2, 3, 4, 5, 6)))
    def test_order_matches_coset_enumeration(self, m):
        expected = brute.coset_order(m, cap=2000)
        got = group_order(m)
        if got is not None and got <= 2000:
            assert got == expected
        else:
            assert expected is None


class TestSphericity:
    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_triangle_dihedral_product(self, l):
        m = triangle(2 * l + 1, 2, 2)
        assert is_spherical(m) and group_order(m) == 8 * l + 4

    def test_rank_zero(self):
        m = CoxeterMatrix.from_rows([])
        assert is_spherical(m) and group_order(m) == 1

    def test_euclidean(self):
        assert not is_spherical(triangle(2, 3, 6))
        assert group_order(triangle(2, 3, 6)) is None

    def test_type_multiset(self):
        names = [t.name for t in type_multiset(disjoint(dihedral(6), B(5)))]
        assert sorted(names) == ["B5", "I2(6)"]


def _brute_basic(m):
    cands = []
    for k in range(2, m.rank + 1):
        for T in itertools.combinations(range(m.rank), k):
            sub = subsystem(m, T)
            if len(irreducible_components(sub)) == 1 and brute.coset_order(sub, cap=200):
                cands.append(frozenset(T))
    return {c for c in cands if not any(c < d for d in cands)}


class TestBasicSubsets:
    def test_triangle_522(self):
        bs = basic_subsets(triangle(5, 2, 2))
        assert [(sorted(b.members), b.type.name) for b in bs] == [([0, 1], "I2(5)")]

    def test_starlet(self):
        bs = basic_subsets(starlet([1, 2]))
        assert sorted(b.type.name for b in bs) == ["I2(10)", "I2(6)"]

    def test_all_commuting(self):
        assert basic_subsets(triangle(2, 2, 2)) == []

    @given(coxeter_matrices(max_rank=3, labels=(2, 3, 4, 5, 6, INF)))
    def test_matches_brute_force(self, m):
        assert {b.members for b in basic_subsets(m)} == _brute_basic(m)

    @given(coxeter_matrices(max_rank=6))
    def test_antichain(self, m):
        bs = basic_subsets(m)
        for a, b in itertools.permutations(bs, 2):
            assert not a.members <= b.members
        for b in bs:
            assert is_spherical(m, b.members)
            assert len(irreducible_components(m, b.members)) == 1


class TestDecomposable:
    @pytest.mark.parametrize(
        "m, expected",
        [
            (dihedral(6), True),
            (dihedral(10), True),
            (dihedral(5), False),
            (dihedral(8), False),
            (A(3), False),
            (B(3), True),
            (B(5), True),
            (B(4), False),
            (E7, True),
            (H3, True),
            (H4, False),
            (D(5), False),
            (triangle(3, 3, 3), False),
        ],
    )
    def test_listed_types(self, m, expected):
        assert is_directly_decomposable_irreducible(m) is expected

    def test_reducible(self):
        with pytest.raises(NotIrreducible):
            is_directly_decomposable_irreducible(triangle(2, 2, 2))


class TestSplittings:
    def test_infinite_edge(self):
        m = triangle(5, 3, INF)  # m(a,b)=5, m(b,c)=3, m(c,a)=inf
        splits = visible_splittings(m)
        ab, bc, b = m.indices("ab"), m.indices("bc"), m.indices("b")
        assert (ab, bc, b) in splits or (bc, ab, b) in splits

    def test_no_infinity(self):
        assert visible_splittings(triangle(3, 3, 3)) == []

    def test_two_splittings_of_rank_four_example(self):
        m = CoxeterMatrix.from_edges(
            4,
            {(0, 1): 3, (1, 2): 6, (0, 3): 2, (1, 3): 2, (0, 2): INF, (2, 3): INF},
            generators=list("xcbw"),
        )
        splits = {(s1, s2, t) for s1, s2, t in visible_splittings(m)}
        T = m.indices("cw")
        assert (m.indices("xcw"), m.indices("cbw"), T) in splits
        assert (m.indices("xcb"), m.indices("xcw"), m.indices("xc")) in splits or (
            m.indices("xcw"),
            m.indices("xcb"),
            m.indices("xc"),
        ) in splits

    @given(coxeter_matrices(max_rank=5))
    def test_postconditions(self, m):
        S = full(m)
        for s1, s2, t in visible_splittings(m):
            assert s1 | s2 == S and s1 & s2 == t
            assert s1 - t and s2 - t
            assert is_spherical(m, t)
            for a in s1 - t:
                for b in s2 - t:
                    assert m.m[a][b] is INF


class TestMatching:
    def test_dihedral_vs_triangle(self):
        assert isinstance(matching_filter(dihedral(10), triangle(5, 2, 2)), Compatible)

    def test_incompatible(self):
        res = matching_filter(triangle(3, 3, 3), triangle(2, 4, 4))
        assert isinstance(res, Incompatible)
        assert not res

    def test_self(self):
        m = starlet([1, 2])
        assert matching_filter(m, m)

    def test_type_pairs(self):
        assert types_match(SphericalType("D", 5), SphericalType("B", 5))
        assert types_match(SphericalType("B", 3), SphericalType("A", 3))
        assert not types_match(SphericalType("D", 4), SphericalType("B", 4))
        assert types_match(SphericalType.dihedral(3), SphericalType.dihedral(6))
        assert not types_match(SphericalType.dihedral(5), SphericalType.dihedral(20))

    @given(coxeter_matrices(max_rank=5), coxeter_matrices(max_rank=5))
    def test_symmetric(self, m1, m2):
        assert bool(matching_filter(m1, m2)) == bool(matching_filter(m2, m1))

    @given(coxeter_matrices(max_rank=4))
    def test_moves_keep_compatibility(self, m):
        for rec, m2 in all_moves(m):
            assert matching_filter(m, m2), rec.kind


class TestExpandedFilter:
    def test_expanded_pair_with_different_labels(self):
        assert expanded_label_filter(triangle(2, 3, 7), triangle(2, 3, 8), True, True)

    def test_lower_rank_expanded(self):
        assert expanded_label_filter(triangle(2, 3, 7), dihedral(7), False, True)

    def test_nothing_to_say(self):
        assert expanded_label_filter(dihedral(6), triangle(3, 2, 2), False, True) is None
