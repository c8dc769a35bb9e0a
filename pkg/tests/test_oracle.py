import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import brute
from conftest import A, B, D, coxeter_matrices
from coxgalaxy.classify import group_order, is_spherical
from coxgalaxy.coxsys import INF, CoxeterMatrix, dihedral, triangle
from coxgalaxy.moves import apply_twist, blow_up, blow_up_words, enumerate_twists, find_pseudo_transpositions, twist_words
from coxgalaxy.oracle import (
    CapExceeded,
    ExceedsCap,
    Finite,
    element_order,
    enumerate_group,
    finite_group,
    finite_isomorphic,
    longest_word,
    normal_form,
    oracle_for,
    tits_normal_form,
    verify_generating_set,
)


@st.composite
def system_and_word(draw, max_rank=4, labels=(2, 3, 4, 5, 6, INF), max_len=12):
    m = draw(coxeter_matrices(min_rank=1, max_rank=max_rank, labels=labels))
    w = draw(st.lists(st.integers(0, m.rank - 1), max_size=max_len))
    return m, tuple(w)


class TestNormalForm:
    def test_involution(self):
        assert normal_form(dihedral(5), "aa") == ()

    def test_braid(self):
        m = dihedral(3)
        assert normal_form(m, "aba") == normal_form(m, "bab") == (0, 1, 0)

    def test_longest_dihedral_six(self):
        m = dihedral(6)
        w = normal_form(m, "ab" * 3)
        assert len(w) == 6
        assert w == longest_word(m)
        # central: commutes with both generators
        for s in "ab":
            assert normal_form(m, s + "ababab") == normal_form(m, "ababab" + s)

    def test_names_with_spaces(self):
        m = CoxeterMatrix.from_rows([[1, 3], [3, 1]], ["x1", "x2"])
        assert normal_form(m, "x1 x2 x1") == normal_form(m, "x2 x1 x2")

    def test_bad_index(self):
        with pytest.raises(IndexError):
            normal_form(dihedral(3), [5])

    def test_tits_cap(self):
        with pytest.raises(CapExceeded):
            tits_normal_form(B(5), longest_word(B(5)), cap=10)
        with pytest.raises(CapExceeded):
            tits_normal_form(dihedral(3), (0,) * 80)

    @given(system_and_word())
    def test_idempotent(self, mw):
        m, w = mw
        nf = normal_form(m, w)
        assert normal_form(m, nf) == nf
        assert len(nf) <= len(w) and len(nf) % 2 == len(w) % 2

    @given(system_and_word(), st.randoms(use_true_random=False))
    def test_braid_shuffle_invariant(self, mw, rnd):
        from coxgalaxy.oracle import _braid_moves

        m, w = mw
        shuffled = w
        for _ in range(5):
            opts = list(_braid_moves(m, shuffled))
            if opts:
                shuffled = rnd.choice(opts)
        assert normal_form(m, shuffled) == normal_form(m, w)

    @given(system_and_word(max_len=10))
    def test_tits_and_geometric_agree(self, mw):
        m, w = mw
        assert tits_normal_form(m, w) == normal_form(m, w)

    @given(system_and_word(max_rank=3, labels=(2, 3, 4, 5)))
    def test_equality_agrees_with_permutation_action(self, mw):
        m, w = mw
        perms = brute.coset_table(m, cap=200)
        assume(perms is not None)
        size = len(perms[0])

        def act(word):
            g = list(range(size))
            for s in word:
                g = [perms[s][x] for x in g]
            return g

        assert act(normal_form(m, w)) == act(w)


class TestElementOrder:
    @pytest.mark.parametrize("k", [2, 3, 5, 7, 10])
    def test_dihedral(self, k):
        assert element_order(dihedral(k), "ab") == Finite(k)

    def test_infinite(self):
        assert element_order(dihedral(INF), "ab", cap=50) == ExceedsCap(50)

    def test_blow_up_product(self):
        m = dihedral(6)
        # (tvt) v with t = a, v = b
        assert element_order(m, "abab") == Finite(3)

    def test_identity(self):
        assert element_order(dihedral(6), "") == Finite(1)

    @settings(max_examples=40)
    @given(system_and_word(max_rank=3, labels=(2, 3, 4, 5, 6)))
    def test_matches_permutation_action(self, mw):
        m, w = mw
        want = brute.element_order(m, w, cap=300)
        assume(want is not None)
        assert element_order(m, w, cap=1000) == Finite(want)

    @given(system_and_word(), st.lists(st.integers(0, 3), max_size=6))
    def test_conjugation_invariant(self, mw, g):
        m, w = mw
        g = tuple(x % m.rank for x in g)
        conj = g + w + tuple(reversed(g))
        assert element_order(m, w, cap=200) == element_order(m, conj, cap=200)

    def test_long_conjugate_in_hyperbolic_group(self):
        # float powers of the conjugate carry rounding far above 1e-6
        m = CoxeterMatrix.from_rows([[1, 4, 5, 3], [4, 1, 4, 6], [5, 4, 1, 4], [3, 6, 4, 1]])
        g = (1, 0, 3, 1)
        conj = g + (0, 2) + tuple(reversed(g))
        assert element_order(m, conj, cap=200) == Finite(5)
        assert element_order(m, g + (0, 1, 2) + g[::-1], cap=1000) == ExceedsCap(1000)

    @pytest.mark.parametrize("m", [A(4), B(4), D(4), triangle(2, 3, 5), dihedral(12)], ids=str)
    def test_order_bound_dominates(self, m):
        grp = finite_group(m)
        top = max(grp.element_order(g) for g in range(grp.order))
        assert top <= oracle_for(m)._finite_order_bound()


class TestEnumerate:
    @pytest.mark.parametrize(
        "m, order",
        [(dihedral(6), 12), (triangle(3, 2, 2), 12), (B(5), 3840), (A(4), 120), (D(4), 192)],
    )
    def test_orders(self, m, order):
        assert enumerate_group(m) == order

    def test_cap(self):
        assert enumerate_group(B(5), cap=100) == ExceedsCap(100)
        assert enumerate_group(triangle(2, 3, 7), cap=500) == ExceedsCap(500)

    @settings(max_examples=40)
    @given(coxeter_matrices(max_rank=5, labels=(2, 3, 4, 5, 6)))
    def test_agrees_with_classification(self, m):
        order = group_order(m)
        assume(order is not None and order <= 5000)
        assert enumerate_group(m, cap=5000) == order

    def test_longest_word_length(self):
        # length of w_0 = number of reflections; B5 has 25
        assert len(longest_word(B(5))) == 25
        assert len(longest_word(A(4))) == 10

    def test_abelianization_of_enumerated_group(self):
        assert finite_group(B(3)).abelianization_rank() == 2
        assert finite_group(A(3)).abelianization_rank() == 1

    def test_finite_isomorphic(self):
        assert finite_isomorphic(dihedral(6), triangle(3, 2, 2)) is not None
        assert finite_isomorphic(triangle(2, 2, 6), A(3)) is None
        assert finite_isomorphic(B(3), disjoint_a1_a3()) is not None


def disjoint_a1_a3():
    return CoxeterMatrix.from_edges(4, {(1, 2): 3, (2, 3): 3})


class TestVerify:
    def test_blow_up_of_dihedral_six(self):
        m = dihedral(6)
        (pt,) = find_pseudo_transpositions(m)
        rep = verify_generating_set(m, blow_up_words(m, pt), blow_up(m, pt))
        assert rep.exact and rep.generation
        assert rep.group_order == rep.claimed_order == 12

    def test_identity(self):
        m = triangle(3, 4, 2)
        rep = verify_generating_set(m, [(i,) for i in range(3)], m)
        assert rep.exact and rep.generation

    def test_twist_on_spherical(self):
        # A4 with J = middle A2 would have empty complement; use an H3 + A1 chain instead
        m = CoxeterMatrix.from_edges(4, {(0, 1): 3, (1, 2): 3, (2, 3): 3})
        for tw in enumerate_twists(m, include_trivial=True):
            rep = verify_generating_set(m, twist_words(m, tw), apply_twist(m, tw))
            assert rep.exact and rep.generation

    def test_mismatch(self):
        m = dihedral(6)
        wrong = dihedral(3)
        rep = verify_generating_set(m, [(0,), (1,)], wrong)
        assert not rep.ok
        assert rep.pairs[0].status == "mismatch"

    def test_not_generating(self):
        m = triangle(3, 2, 2)
        rep = verify_generating_set(m, [(0,), (1,)], dihedral(3))
        assert rep.generation is False and not rep.ok

    def test_infinite_consistent(self):
        m = dihedral(INF)
        rep = verify_generating_set(m, [(0,), (1,)], m)
        assert rep.ok and not rep.exact
        assert rep.pairs[0].status == "consistent"

    def test_word_count(self):
        with pytest.raises(ValueError):
            verify_generating_set(dihedral(3), [(0,)], dihedral(3))

    def test_oracle_cache(self):
        assert oracle_for(dihedral(5)) is oracle_for(dihedral(5))

    @settings(max_examples=25)
    @given(coxeter_matrices(max_rank=4, labels=(2, 3, 4, 5, 6, 10)))
    def test_all_spherical_blow_ups_verify(self, m):
        assume(is_spherical(m) and group_order(m) <= 5000)
        for pt in find_pseudo_transpositions(m):
            rep = verify_generating_set(m, blow_up_words(m, pt), blow_up(m, pt))
            assert rep.exact and rep.generation and rep.group_order == rep.claimed_order


def test_pairwise_orders_of_generators_are_labels():
    for m in (B(3), D(4), triangle(5, 2, 2)):
        for i, j in itertools.combinations(range(m.rank), 2):
            assert element_order(m, (i, j)) == Finite(m.m[i][j])


@given(system_and_word(labels=(2, 3, 4, 5, 6, 7, 10, INF), max_len=30))
def test_float_products_are_exact(mw):
    m, w = mw
    orc = oracle_for(m)
    fast = orc.matrix(w)
    M = orc.identity().astype(object)
    for s in w:
        M = M.copy()
        col = M[:, s, :].copy()
        for j, t in orc._nbrs[s]:
            M[:, j, :] += col @ t.T.astype(object)
        M[:, s, :] = -col
    assert (fast.astype(object) == M).all()
