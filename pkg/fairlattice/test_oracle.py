import logging
import os
import sys
import unittest
from unittest import mock

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from datatypes import SubgroupSpec
from fairlattice import lattice, oracle, synth
from fairlattice.exceptions import CapacityError
from fairlattice.models import DatasetView
from fairlattice.tally import TallyMode, build_table

if len(sys.argv) > 1 and sys.argv[1] == 'test':
    logging.disable(logging.CRITICAL)


class BruteForceTest(unittest.TestCase):
    @given(st.integers(1, 6), st.integers(1, 2000), st.integers(0, 2 ** 32 - 1), st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_equals_propagation(self, m, n_rows, seed, predictions):
        data = synth.random_dataset(m, n_rows, seed, predictions=predictions)
        expected = oracle.brute_force_counts(data)
        assert build_table(data).same_counts(expected)

    def test_single_row(self):
        data = DatasetView.from_rows([[1, 0, 1]], y_true=[1])
        table = oracle.brute_force_counts(data)
        assert table.n.sum() == 2 ** 3
        for index in np.flatnonzero(table.n):
            spec = lattice.decode(int(index), 3)
            assert all(c.value in (2, bit) for c, bit in zip(spec.codes, (1, 0, 1)))

    def test_empty_regions_are_zero(self):
        data = DatasetView.from_rows([[0, 0]] * 3, y_true=[1, 0, 1])
        table = oracle.brute_force_counts(data)
        for text, n in (("00", 3), ("01", 0), ("1*", 0), ("*1", 0), ("**", 3)):
            assert table.n[lattice.encode(SubgroupSpec.parse(text))] == n

    def test_confusion_mode_follows_predictions(self):
        assert oracle.brute_force_counts(synth.random_dataset(2, 10, 1)).mode == TallyMode.CONFUSION
        outcome = oracle.brute_force_counts(synth.random_dataset(2, 10, 1, predictions=False))
        assert outcome.mode == TallyMode.OUTCOME

    def test_budget_guard(self):
        with mock.patch.dict(os.environ, {'FAIRLATTICE_ORACLE_BUDGET': '100'}):
            with self.assertRaises(CapacityError):
                oracle.brute_force_counts(synth.random_dataset(3, 10, 1))
        assert oracle.work(12, 100_000) > 10 ** 9

    def test_work_grows_faster_than_propagation(self):
        # one pass over the rows plus two edges per non-vertex hypercube
        propagation = [1000 + 2 * (3 ** m - 2 ** m) for m in range(2, 10)]
        ratios = [oracle.comparison_count(m, 1000) / p for m, p in zip(range(2, 10), propagation)]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        assert ratios[0] > 10


if __name__ == '__main__':
    unittest.main()
