import logging
import math
import os
import sys
import unittest
from unittest import mock

from hypothesis import given, settings
from hypothesis import strategies as st

from datatypes import SubgroupSpec, Trit
from fairlattice import lattice
from fairlattice.exceptions import CapacityError, InvalidSplitError, LevelBoundsError

if len(sys.argv) > 1 and sys.argv[1] == 'test':
    logging.disable(logging.CRITICAL)

specs = st.lists(st.sampled_from(list(Trit)), min_size=1, max_size=6).map(lambda c: SubgroupSpec(tuple(c)))


class SubgroupSpecTest(unittest.TestCase):
    def test_parse_both_forms(self):
        assert SubgroupSpec.parse("01*") == SubgroupSpec.parse("(0,1,*)")
        assert str(SubgroupSpec.parse("1*0")) == "(1,*,0)"

    def test_level_and_kind(self):
        spec = SubgroupSpec.parse("*1*")
        assert spec.level == 2
        assert spec.star_positions == (0, 2)
        assert SubgroupSpec.main(4).is_main
        assert SubgroupSpec.parse("0110").is_vertex

    def test_from_vertex_number_puts_attribute_one_first(self):
        assert SubgroupSpec.from_vertex_number(4, 3) == SubgroupSpec.parse("100")
        assert SubgroupSpec.from_vertex_number(1, 3) == SubgroupSpec.parse("001")

    def test_parse_rejects_empty(self):
        with self.assertRaises(ValueError):
            SubgroupSpec.parse("()")


class EnumerateLevelTest(unittest.TestCase):
    def test_two_attributes_level_one(self):
        got = [str(s) for s in lattice.enumerate_level(2, 1)]
        assert got == ["(0,*)", "(1,*)", "(*,0)", "(*,1)"]

    def test_vertices_of_ten_attributes(self):
        vertices = lattice.enumerate_level(10, 0)
        assert len(vertices) == 1024
        assert all(v.is_vertex for v in vertices)

    def test_main_hypercube_is_alone(self):
        assert lattice.enumerate_level(4, 4) == (SubgroupSpec.main(4),)

    def test_ascending_index_order(self):
        indices = [lattice.encode(s) for s in lattice.enumerate_level(5, 2)]
        assert indices == sorted(indices)
        assert len(set(indices)) == math.comb(5, 2) * 2 ** 3

    def test_level_out_of_range(self):
        with self.assertRaises(LevelBoundsError):
            lattice.enumerate_level(3, 4)
        with self.assertRaises(LevelBoundsError):
            lattice.enumerate_level(3, -1)


class SplitTest(unittest.TestCase):
    def test_split_main_of_two(self):
        low, high = lattice.split(SubgroupSpec.parse("**"), 0)
        assert (str(low), str(high)) == ("(0,*)", "(1,*)")

    def test_split_middle_star(self):
        low, high = lattice.split(SubgroupSpec.parse("1*0"), 1)
        assert (low, high) == (SubgroupSpec.parse("100"), SubgroupSpec.parse("110"))

    def test_split_vertex_fails(self):
        for position in (0, 1):
            with self.assertRaises(InvalidSplitError):
                lattice.split(SubgroupSpec.parse("01"), position)
        with self.assertRaises(ValueError):
            lattice.split(SubgroupSpec.parse("01"), 5)

    def test_first_star(self):
        assert lattice.first_star(SubgroupSpec.parse("0**")) == 1
        assert lattice.first_star(SubgroupSpec.parse("*00")) == 0
        assert lattice.first_star(SubgroupSpec.parse("111")) is None

    @given(specs)
    @settings(max_examples=200)
    def test_split_halves_partition_the_spec(self, spec):
        covered = set(lattice.covered_vertices(spec))
        assert len(covered) == 2 ** spec.level
        for _, low, high in lattice.splits(spec):
            assert low.level == high.level == spec.level - 1
            low_set, high_set = set(lattice.covered_vertices(low)), set(lattice.covered_vertices(high))
            assert not low_set & high_set
            assert low_set | high_set == covered


class ShapeTest(unittest.TestCase):
    def test_two_attributes(self):
        shape = lattice.shape(2)
        assert shape.h_total == 9
        assert shape.h_per_level == (4, 4, 1)
        # 4 level-1 cubes with 2 edges each, the main cube with 4
        assert shape.edge_count == 12

    def test_ten_attributes(self):
        assert lattice.shape(10).h_total == 59049

    def test_four_attributes(self):
        assert lattice.shape(4).h_per_level == (16, 32, 24, 8, 1)

    def test_totals_and_edge_bound(self):
        for m in range(1, 13):
            shape = lattice.shape(m)
            assert sum(shape.h_per_level) == shape.h_total == 3 ** m
            assert shape.edge_count <= shape.edge_bound == 2 * m * 3 ** m

    def test_capacity_guard(self):
        with mock.patch.dict(os.environ, {'FAIRLATTICE_MAX_M': '3'}):
            with self.assertRaises(CapacityError):
                lattice.shape(4)
        with mock.patch.dict(os.environ, {'FAIRLATTICE_MEMORY_BUDGET': '1000'}):
            with self.assertRaises(CapacityError):
                lattice.shape(5)

    def test_hard_ceiling_wins_over_env(self):
        with mock.patch.dict(os.environ, {'FAIRLATTICE_MAX_M': '40'}):
            with self.assertRaises(CapacityError):
                lattice.check_attribute_count(21)

    def test_no_attributes(self):
        with self.assertRaises(LevelBoundsError):
            lattice.shape(0)


class IndexTest(unittest.TestCase):
    def test_round_trip_exhaustive(self):
        for m in range(1, 9):
            for index in range(3 ** m):
                assert lattice.encode(lattice.decode(index, m)) == index

    def test_decode_out_of_range(self):
        with self.assertRaises(LevelBoundsError):
            lattice.decode(27, 3)

    def test_lookup_arrays_match_specs(self):
        m = 5
        codes, powers = lattice.level_codes(m), lattice.first_star_powers(m)
        for index in range(3 ** m):
            spec = lattice.decode(index, m)
            assert codes[index] == spec.level
            position = lattice.first_star(spec)
            assert powers[index] == (0 if position is None else 3 ** (m - 1 - position))

    def test_level_indices_cover_the_lattice(self):
        m = 6
        sizes = [lattice.level_indices(m, k).size for k in range(m + 1)]
        assert sizes == list(lattice.shape(m).h_per_level)

    def test_lookup_arrays_are_read_only(self):
        with self.assertRaises(ValueError):
            lattice.level_codes(3)[0] = 1

    @given(specs)
    def test_encode_is_base_three(self, spec):
        assert lattice.encode(spec) == int("".join(str(c.value) for c in spec.codes), 3)


if __name__ == '__main__':
    unittest.main()
