import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

import brute
from conftest import B, coxeter_matrices, disjoint
from coxgalaxy.coxsys import (
    INF,
    CoxeterMatrix,
    GalaxyVertex,
    InvalidMatrix,
    MalformedInput,
    abelianization_rank,
    are_graph_isomorphic,
    canonical_form,
    canonical_matrix,
    dihedral,
    dump_system,
    irreducible_components,
    parse_system,
    subsystem,
    triangle,
    vertex_from_hex,
)
from coxgalaxy.galaxy import starlet


class TestParse:
    def test_rank_two(self):
        m = parse_system('{"generators":["a","b"],"matrix":[[1,6],[6,1]]}')
        assert m.generators == ("a", "b")
        assert m[0, 1] == 6

    def test_zero_means_infinity(self):
        m = parse_system('{"generators":["a","b","c"],"matrix":[[1,6,0],[6,1,10],[0,10,1]]}')
        assert m.m[0][2] is INF
        assert canonical_form(m) == canonical_form(starlet([1, 2]))

    def test_rank_mismatch(self):
        with pytest.raises(InvalidMatrix):
            parse_system('{"generators":["a"],"matrix":[[1,2],[2,1]]}')

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            '{"generators":["a"]}',
            '{"matrix": 3}',
            '{"matrix": [[1, "x"], ["x", 1]]}',
            '{"matrix": [[1, true], [true, 1]]}',
            '{"generators": [1, 2], "matrix": [[1, 2], [2, 1]]}',
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedInput):
            parse_system(text)

    @pytest.mark.parametrize(
        "rows",
        [
            [[1, 3], [4, 1]],  # asymmetric
            [[2, 3], [3, 1]],  # diagonal
            [[1, 1], [1, 1]],  # label below 2
            [[1, -3], [-3, 1]],
        ],
    )
    def test_invalid(self, rows):
        with pytest.raises(InvalidMatrix):
            parse_system(json.dumps({"matrix": rows}))

    def test_duplicate_names(self):
        with pytest.raises(InvalidMatrix):
            CoxeterMatrix.from_rows([[1, 3], [3, 1]], ["a", "a"])

    def test_default_names(self):
        assert parse_system('{"matrix":[[1,0],[0,1]]}').generators == ("s0", "s1")

    @given(coxeter_matrices(min_rank=0, max_rank=6))
    def test_round_trip(self, m):
        assert parse_system(dump_system(m)) == m


class TestCanonicalForm:
    def test_starlet_relabel(self):
        s = starlet([1, 2])
        assert canonical_form(s) == canonical_form(s.permute([1, 0, 2]))

    def test_distinct_triangles(self):
        assert canonical_form(triangle(2, 4, 4)) != canonical_form(triangle(2, 2, INF))

    def test_permuted_triangle(self):
        assert canonical_form(triangle(3, 5, 7)) == canonical_form(triangle(7, 3, 5))

    def test_names_ignored(self):
        m = dihedral(6)
        assert canonical_form(m) == canonical_form(m.rename(["x", "y"]))

    def test_layer_is_rank(self):
        assert canonical_form(B(5)).rank == 5

    def test_hex_round_trip(self):
        v = canonical_form(starlet([1, 2, 3]))
        assert vertex_from_hex(v.hex) == v
        assert isinstance(v, GalaxyVertex)

    def test_canonical_matrix_is_fixed_point(self):
        m = starlet([3, 1, 2])
        c = canonical_matrix(m)
        assert canonical_form(c) == canonical_form(m)
        assert canonical_matrix(c).m == c.m

    @given(coxeter_matrices(max_rank=8), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, m, rnd):
        order = list(range(m.rank))
        rnd.shuffle(order)
        assert canonical_form(m) == canonical_form(m.permute(order))

    @given(coxeter_matrices(max_rank=5, labels=(2, 3, INF)), coxeter_matrices(max_rank=5, labels=(2, 3, INF)))
    def test_agrees_with_brute_force(self, m1, m2):
        assert (canonical_form(m1) == canonical_form(m2)) == brute.graph_isomorphic(m1, m2)

    @given(coxeter_matrices(max_rank=6))
    def test_multiset_preserved(self, m):
        assert canonical_matrix(m).label_multiset() == m.label_multiset()


class TestGraphIsomorphism:
    def test_identity(self):
        m = starlet([1, 2])
        assert are_graph_isomorphic(m, m) is not None

    def test_rank_mismatch(self):
        assert are_graph_isomorphic(dihedral(6), triangle(3, 2, 2)) is None

    def test_figure_rank_four_graphs_differ(self):
        # the two one-step blow-ups of starlet(6,10)
        g1 = CoxeterMatrix.from_edges(4, {(0, 1): 3, (0, 2): 10, (1, 2): INF, (2, 3): INF})
        g2 = CoxeterMatrix.from_edges(4, {(0, 1): 6, (0, 2): 5, (1, 2): INF, (1, 3): INF})
        assert g1.label_multiset() != g2.label_multiset()
        assert are_graph_isomorphic(g1, g2) is None

    @given(coxeter_matrices(max_rank=6), st.randoms(use_true_random=False))
    def test_bijection_reproduces_target(self, m1, rnd):
        order = list(range(m1.rank))
        rnd.shuffle(order)
        m2 = m1.permute(order)
        bij = are_graph_isomorphic(m1, m2)
        assert bij is not None
        n = m1.rank
        assert all(m1.m[i][j] == m2.m[bij[i]][bij[j]] for i in range(n) for j in range(n))

    @given(coxeter_matrices(max_rank=5), coxeter_matrices(max_rank=5))
    def test_consistent_with_canon(self, m1, m2):
        assert (are_graph_isomorphic(m1, m2) is not None) == (canonical_form(m1) == canonical_form(m2))


class TestComponents:
    def test_i2_6_plus_b5(self):
        comps = irreducible_components(disjoint(dihedral(6), B(5)))
        assert sorted(len(c) for c in comps) == [2, 5]

    def test_all_twos(self):
        assert len(irreducible_components(triangle(2, 2, 2))) == 3

    def test_starlet(self):
        assert len(irreducible_components(starlet([1, 2]))) == 1

    @given(coxeter_matrices(max_rank=7))
    def test_partition(self, m):
        comps = irreducible_components(m)
        flat = sorted(i for c in comps for i in c)
        assert flat == list(range(m.rank))
        # no non-2 edge crosses components
        where = {i: k for k, c in enumerate(comps) for i in c}
        for i in range(m.rank):
            for j in range(m.rank):
                if where[i] != where[j]:
                    assert m.m[i][j] == 2
        for c in comps:
            assert len(irreducible_components(subsystem(m, c))) == 1


class TestSubsystem:
    def test_starlet_restriction(self):
        s = starlet([1, 2])
        sub = subsystem(s, s.indices(["s0", "s1"]))
        assert sub.rank == 2 and sub.m[0][1] == 6
        assert sub.generators == ("s0", "s1")

    def test_empty(self):
        assert subsystem(B(5), []).rank == 0

    def test_full(self):
        m = starlet([1, 2])
        assert subsystem(m, range(m.rank)) == m


class TestAbelianization:
    @pytest.mark.parametrize(
        "m, r",
        [
            (triangle(2, 3, 6), 2),
            (triangle(2, 4, 4), 3),
            (triangle(3, 3, 3), 1),
            (CoxeterMatrix.from_rows([[1]]), 1),
            (triangle(3, 5, INF), 1),
            (triangle(2, 2, INF), 3),
        ],
    )
    def test_examples(self, m, r):
        assert abelianization_rank(m) == r

    @given(coxeter_matrices(max_rank=6))
    def test_matches_sign_homomorphisms(self, m):
        assert abelianization_rank(m) == brute.abelianization_rank(m)

    @given(coxeter_matrices(max_rank=6), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, m, rnd):
        order = list(range(m.rank))
        rnd.shuffle(order)
        assert abelianization_rank(m) == abelianization_rank(m.permute(order))
