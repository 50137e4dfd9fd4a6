import random

import pytest
from hypothesis import given, settings, strategies as st

from grassmacs.constructions import blocks_b, cone_singleton, fano
from grassmacs.errors import EmptyFamily, EvenMemberPresent, GroundTooLargeForEnumeration, WrongCardinality
from grassmacs.grassmann import family_to_dimension, subalgebra_commutes_iff_intersecting
from grassmacs.predicates import (
    ViolationKind,
    disjoint_partner,
    first_disjoint_pair,
    is_algebraic_system,
    is_bicommutative,
    is_commutative_system,
    is_maximal_system,
    verify_macs,
)
from grassmacs.setcore import SetFamily, SubsetMask, cone_closure, mask_from_indices


def fam(n, *sets):
    return SetFamily.from_sets(n, sets)


def brute_first_disjoint(F):
    masks = [int(m) for m in F.masks]
    for i, a in enumerate(masks):
        for j in range(i + 1, len(masks)):
            if not a & masks[j]:
                return i, j
    return None


def brute_uncovered(F):
    members = {int(m) for m in F.masks}
    odd = sorted((m for m in range(1 << F.n) if bin(m).count("1") % 2), key=lambda m: (bin(m).count("1"), m))
    return [s for s in odd if s not in members and all(s & t for t in members)]


odd_families = st.integers(2, 9).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=25))
).map(lambda c: SetFamily(c[0], [m for m in c[1] if bin(m).count("1") % 2] or [1]))


class TestCommutative:
    def test_fano(self):
        assert is_commutative_system(fano(0).as_family(7))

    def test_disjoint_witness(self):
        r = is_commutative_system(fam(4, [1], [2, 3, 4]))
        assert not r
        assert r.violation.kind is ViolationKind.DISJOINT_PAIR
        assert [s.indices for s in r.violation.subjects] == [[1], [2, 3, 4]]

    def test_single_member(self):
        assert is_commutative_system(fam(3, [1, 2, 3]))

    def test_errors(self):
        with pytest.raises(EmptyFamily):
            is_commutative_system(SetFamily(4))
        with pytest.raises(EvenMemberPresent):
            is_commutative_system(fam(4, [1, 2]))

    @settings(max_examples=150, deadline=None)
    @given(odd_families)
    def test_matches_brute_force(self, F):
        assert first_disjoint_pair(F, threads=1) == brute_first_disjoint(F)

    @settings(max_examples=60, deadline=None)
    @given(odd_families, st.integers(2, 7))
    def test_thread_count_irrelevant(self, F, threads):
        assert first_disjoint_pair(F, threads=threads) == first_disjoint_pair(F, threads=1)

    def test_large_family_threads(self):
        rng = random.Random(11)
        F = SetFamily(16, [m for m in (rng.getrandbits(16) for _ in range(3000)) if bin(m).count("1") % 2])
        assert first_disjoint_pair(F, 5) == first_disjoint_pair(F, 1) == brute_first_disjoint(F)

    @settings(max_examples=300)
    @given(st.integers(2, 63).flatmap(lambda n: st.tuples(
        st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))))
    def test_pigeonhole_shortcut_sound(self, case):
        n, a, b = case
        if bin(a).count("1") + bin(b).count("1") > n:
            assert a & b


class TestAlgebraic:
    def test_cone_example(self, delta_example1):
        assert is_algebraic_system(delta_example1)

    def test_missing_union(self, d_example1):
        r = is_algebraic_system(d_example1)
        assert not r
        assert r.violation.kind is ViolationKind.MISSING_ALGEBRAIC_UNION
        assert [s.indices for s in r.violation.subjects] == [[2], [1, 4], [1, 2, 4]]

    def test_full_set(self):
        assert is_algebraic_system(fam(5, [1, 2, 3, 4, 5]))

    def test_errors(self):
        with pytest.raises(EmptyFamily):
            is_algebraic_system(SetFamily(4))
        with pytest.raises(EvenMemberPresent):
            is_algebraic_system(fam(4, [1, 2, 3, 4]))

    @settings(max_examples=80, deadline=None)
    @given(odd_families)
    def test_closures_are_algebraic(self, F):
        assert is_algebraic_system(cone_closure(F))


class TestMaximal:
    def test_cone_singleton(self):
        assert is_maximal_system(cone_singleton(5, 3))

    def test_all_odd_containing_1_n3(self):
        assert is_maximal_system(fam(3, [1], [1, 2, 3]))

    def test_fano_not_maximal_among_all_odd_sets(self):
        F = fano(0).as_family(7)
        r = is_maximal_system(F)
        assert not r
        expected = brute_uncovered(F)[0]
        assert r.violation.subjects[0].bits == expected
        assert r.violation.subjects[0].indices == [1, 2, 3, 4, 5]

    @settings(max_examples=80, deadline=None)
    @given(odd_families)
    def test_witness_matches_brute_force(self, F):
        r = is_maximal_system(F)
        bad = brute_uncovered(F)
        assert r.ok == (not bad)
        if bad:
            assert r.violation.subjects[0].bits == bad[0]

    def test_cap(self):
        with pytest.raises(GroundTooLargeForEnumeration):
            is_maximal_system(SetFamily(25, [1]))

    @pytest.mark.parametrize("n,i", [(5, 1), (6, 4), (7, 7)])
    def test_no_odd_set_can_be_added(self, n, i):
        F = cone_singleton(n, i)
        members = {int(m) for m in F.masks}
        for s in range(1, 1 << n):
            if bin(s).count("1") % 2 and s not in members:
                grown = SetFamily(n, list(members) + [s])
                assert not is_commutative_system(grown)


class TestBicommutative:
    def test_fano(self):
        assert is_bicommutative(fano(0).as_family(7), 3)

    def test_am(self):
        assert is_bicommutative(blocks_b(2).am, 7)

    def test_shifted_fano_in_window(self):
        window = SubsetMask(((1 << 7) - 1) << 10, 17)
        assert is_bicommutative(fano(10).as_family(17), 3, within=window)

    def test_not_maximal_without_a_line(self):
        F = SetFamily(7, list(fano(0).triples[:6]))
        r = is_bicommutative(F, 3)
        assert not r
        assert r.violation.kind is ViolationKind.MAXIMALITY_WITNESS_MISSING

    def test_wrong_cardinality(self):
        with pytest.raises(WrongCardinality):
            is_bicommutative(fam(7, [1, 2, 5], [1]), 3)

    def test_outside_window(self):
        window = SubsetMask(((1 << 7) - 1) << 10, 17)
        with pytest.raises(WrongCardinality):
            is_bicommutative(fano(0).as_family(17), 3, within=window)

    def test_disjoint_partner(self):
        F = fano(0).as_family(7)
        assert disjoint_partner(F, mask_from_indices([1, 2, 3], 7)).indices == [5, 6, 7]
        assert disjoint_partner(F, mask_from_indices([1, 2, 5], 7)) is None


class TestVerifyMacs:
    def test_cone_example(self, delta_example1):
        report = verify_macs(delta_example1)
        assert report.passed
        assert report.dimension == 12

    def test_report_serialization(self, d_example1):
        d = verify_macs(d_example1).to_dict()
        assert d["algebraic"] is False
        assert d["witnesses"]["algebraic"]["subjects"] == [[2], [1, 4], [1, 2, 4]]

    @settings(max_examples=60, deadline=None)
    @given(odd_families)
    def test_passing_families_satisfy_bridge(self, F):
        F = cone_closure(F)
        report = verify_macs(F)
        if report.passed:
            assert subalgebra_commutes_iff_intersecting(F)
            assert family_to_dimension(F) == 2 ** (F.n - 1) + len(F)
