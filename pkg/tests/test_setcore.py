import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from grassmacs import counts
from grassmacs.errors import (
    DuplicateIndex,
    EmptyFamily,
    GroundMismatch,
    GroundTooLargeForEnumeration,
    IndexOutOfRange,
    InvalidParams,
    SizeOutOfRange,
)
from grassmacs.setcore import (
    ConstructionParams,
    SetFamily,
    SubsetMask,
    Variant,
    cone_closure,
    dumps_family,
    enumerate_subsets,
    join_one,
    loads_family,
    mask_from_indices,
    read_family,
    set_algebra,
    subset_array,
    write_family,
)


def fam(n, *sets):
    return SetFamily.from_sets(n, sets)


class TestSubsetMask:
    def test_fano_line(self):
        m = mask_from_indices([1, 2, 5], 7)
        assert m.cardinality == 3
        assert m.indices == [1, 2, 5]

    def test_empty_and_full(self):
        assert mask_from_indices([], 5).bits == 0
        assert mask_from_indices([1, 2, 3, 4, 5], 5).bits == 0b11111

    def test_errors(self):
        with pytest.raises(IndexOutOfRange):
            mask_from_indices([0], 5)
        with pytest.raises(IndexOutOfRange):
            mask_from_indices([6], 5)
        with pytest.raises(DuplicateIndex):
            mask_from_indices([2, 2], 5)
        with pytest.raises(IndexOutOfRange):
            SubsetMask(1 << 5, 5)
        with pytest.raises(InvalidParams):
            SubsetMask(0, 64)

    @given(st.integers(2, 63).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1))))
    def test_roundtrip_and_popcount(self, case):
        n, bits = case
        m = SubsetMask(bits, n)
        assert mask_from_indices(m.indices, n) == m
        assert m.cardinality == bin(bits).count("1")
        assert m.bits >> n == 0


class TestSetAlgebra:
    def test_fano_lines_meet_in_one(self):
        a1, a2 = mask_from_indices([1, 2, 5], 7), mask_from_indices([1, 3, 6], 7)
        r = set_algebra(a1, a2)
        assert r.intersection.indices == [1]
        assert not r.is_disjoint

    def test_disjoint(self):
        r = set_algebra(mask_from_indices([1, 2, 3], 7), mask_from_indices([5, 6, 7], 7))
        assert r.is_disjoint
        assert r.complement_of_a.indices == [4, 5, 6, 7]
        assert (r.cardinality_of_a, r.parity_of_a) == (3, 1)

    def test_idempotent(self):
        a = mask_from_indices([2, 4], 6)
        assert set_algebra(a, a).intersection == a
        assert set_algebra(a, a).union == a

    def test_ground_mismatch(self):
        with pytest.raises(GroundMismatch):
            set_algebra(SubsetMask(1, 4), SubsetMask(1, 5))


class TestEnumerateSubsets:
    def test_small(self):
        assert len(list(enumerate_subsets(7, 3))) == 35
        assert [m.bits for m in enumerate_subsets(5, 0)] == [0]
        assert len(list(enumerate_subsets(4, 3))) == 4

    def test_canonical_and_distinct(self):
        seq = [m.bits for m in enumerate_subsets(9, 4)]
        assert seq == sorted(set(seq))
        assert all(bin(b).count("1") == 4 for b in seq)

    def test_counts_match_binom(self):
        for n in range(2, 25):
            for size in range(n + 1):
                if n > 18 and 4 < size < n - 4:
                    continue
                assert subset_array(n, size).size == counts.binom(n, size)

    @pytest.mark.parametrize("n", [19, 20, 21, 22, 23, 24])
    def test_counts_match_binom_large_rows(self, n):
        total = sum(subset_array(n, size).size for size in range(n + 1))
        assert total == 2 ** n

    def test_errors(self):
        with pytest.raises(SizeOutOfRange):
            next(enumerate_subsets(5, 6))
        with pytest.raises(GroundTooLargeForEnumeration):
            next(enumerate_subsets(64, 1))


class TestSetFamily:
    def test_canonical_order_and_dedup(self):
        F = fam(5, [1, 2, 3], [4], [1], [1])
        assert F.as_sets() == [[1], [4], [1, 2, 3]]

    def test_membership_matches_scan(self):
        rng = random.Random(3)
        masks = [rng.getrandbits(10) for _ in range(200)]
        F = SetFamily(10, masks)
        for q in range(1 << 10):
            assert (q in F) == (q in set(masks))

    def test_ground_checks(self):
        with pytest.raises(IndexOutOfRange):
            SetFamily(3, [0b1000])
        with pytest.raises(GroundMismatch):
            SetFamily(4, [SubsetMask(1, 5)])

    def test_layers(self):
        F = fam(5, [1], [2], [1, 2, 3])
        assert F.layer_sizes() == {1: 2, 3: 1}


class TestJoinOne:
    def test_singleton_n4(self):
        assert join_one(fam(4, [1])) == fam(4, [1], [1, 2, 3], [1, 3, 4], [1, 2, 4])

    def test_full_set_fixed(self):
        full = fam(6, range(1, 7))
        assert join_one(full) == full

    def test_singleton_n5(self):
        out = join_one(fam(5, [2]))
        assert out == fam(5, [2], [1, 2, 3], [1, 2, 4], [1, 2, 5], [2, 3, 4], [2, 3, 5], [2, 4, 5])

    def test_empty(self):
        with pytest.raises(EmptyFamily):
            join_one(SetFamily(4))

    def test_input_unchanged(self):
        F = fam(5, [2])
        join_one(F)
        assert F.as_sets() == [[2]]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 12).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=12),
                            st.lists(st.integers(1, (1 << n) - 1), max_size=6))))
    def test_extensive_and_monotone(self, case):
        n, a, extra = case
        A = SetFamily(n, a)
        B = SetFamily(n, a + extra)
        assert A.issubset(join_one(A))
        assert join_one(A).issubset(join_one(B))


class TestConeClosure:
    def test_cone_2_n5(self):
        cone = cone_closure(fam(5, [2]))
        assert len(cone) == 8
        assert cone.as_sets()[-1] == [1, 2, 3, 4, 5]

    def test_cone_1_n4_is_example(self, delta_example1):
        assert cone_closure(fam(4, [1])) == delta_example1

    def test_closed_seed_fixed(self, delta_example1):
        assert cone_closure(delta_example1) == delta_example1

    def test_empty(self):
        with pytest.raises(EmptyFamily):
            cone_closure(SetFamily(4))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 12).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=5))))
    def test_idempotent_and_closed(self, case):
        n, seeds = case
        C = cone_closure(SetFamily(n, seeds))
        assert cone_closure(C) == C
        assert join_one(C) == C

    @settings(max_examples=60, deadline=None)
    @given(st.integers(3, 12).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=5))))
    def test_odd_seeds_stay_odd(self, case):
        n, seeds = case
        odd = [s for s in seeds if bin(s).count("1") % 2 == 1] or [1]
        C = cone_closure(SetFamily(n, odd))
        assert C.all_odd()


class TestFamilyFile:
    def test_roundtrip(self, tmp_path, delta_example1):
        path = tmp_path / "d.fam"
        write_family(delta_example1, path)
        assert path.read_text().splitlines() == ["n=4", "1", "1,2,3", "1,2,4", "1,3,4"]
        assert read_family(path) == delta_example1

    def test_any_order_accepted(self):
        F = loads_family("n=4\n1,3,4\n\n1\n1,2,3\n")
        assert dumps_family(F) == "n=4\n1\n1,2,3\n1,3,4\n"

    def test_empty_set_not_writable(self):
        with pytest.raises(ValueError):
            dumps_family(SetFamily(4, [0]))

    def test_bad_header(self):
        with pytest.raises(ValueError):
            loads_family("1,2\n")


class TestConstructionParams:
    @pytest.mark.parametrize("variant,k,n", [
        (Variant.N4K, 1, 4), (Variant.N4K2, 1, 6), (Variant.N4K7, 2, 15), (Variant.N4K9, 2, 17),
    ])
    def test_ground(self, variant, k, n):
        assert ConstructionParams(k, variant).n == n

    @pytest.mark.parametrize("variant,k", [
        (Variant.N4K, 0), (Variant.N4K2, 0), (Variant.N4K7, 1), (Variant.N4K9, 1),
    ])
    def test_rejects_small_k(self, variant, k):
        with pytest.raises(InvalidParams):
            ConstructionParams(k, variant)

    def test_materialization_cap(self):
        with pytest.raises(GroundTooLargeForEnumeration):
            ConstructionParams(5, Variant.N4K7).require_materializable()
